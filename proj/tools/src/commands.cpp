#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>

#include "anthro/analysis.hpp"
#include "anthro/body_model.hpp"
#include "anthro/dataset_gen.hpp"
#include "anthro/dataset_io.hpp"
#include "anthro/error.hpp"
#include "anthro/features.hpp"
#include "anthro/fitting.hpp"
#include "anthro/mlp.hpp"
#include "anthro/parallel.hpp"
#include "anthro/rng.hpp"
#include "anthro/text_format.hpp"
#include "config_file.hpp"

namespace anthro::cli {

namespace fs = std::filesystem;

LogLevel Common::level() const {
  if (log_level == "quiet") return LogLevel::Quiet;
  if (log_level == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

namespace {

void add_common(CLI::App& sub, Common& common) {
  sub.add_option("--threads", common.threads,
                 "Worker threads; 0 uses ANTHROKIT_THREADS, else all cores. Results do not depend on it");
  sub.add_option("--log-level", common.log_level, "quiet, info or debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));
  sub.add_option("--config", common.config,
                 "key=value file (e.g. a manifest) supplying options not given as flags");
}

class Log {
 public:
  explicit Log(const Common& c) : level_(c.level()) {}
  template <typename... Args>
  void info(const Args&... args) const {
    if (level_ != LogLevel::Quiet) ((std::cerr << args), ...) << '\n';
  }
  template <typename... Args>
  void debug(const Args&... args) const {
    if (level_ == LogLevel::Debug) ((std::cerr << args), ...) << '\n';
  }

 private:
  LogLevel level_;
};

BodyModel model_from(const std::string& path, std::uint64_t seed) {
  if (path.empty()) return make_default_model(seed);
  auto in = open_input(path);
  return load_model(in);
}

fs::path sibling(const fs::path& p, const std::string& suffix) { return fs::path(p.string() + suffix); }

std::vector<LabeledMeasurements> truth_of(const std::vector<LandmarkRecord>& records) {
  std::vector<LabeledMeasurements> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.measurements) {
      throw Error(ErrorKind::InsufficientData, "record " + std::to_string(i + 1) + " has no measurements");
    }
    out.push_back({r.landmarks.subject_id(), r.landmarks.pose_id(), *r.measurements, r.sex});
  }
  return out;
}

void write_predictions_file(const fs::path& path, const std::vector<LabeledMeasurements>& rows) {
  auto out = open_output(path);
  write_predictions_csv(out, rows);
}

// --- gen -------------------------------------------------------------------

void register_gen(CLI::App& app) {
  struct Opts {
    Common common;
    std::string out_dir;
    std::size_t subjects = 50;
    std::size_t poses = 40;
    std::string pose_mix = "1/12,1/12,10/12";
    std::uint64_t seed = 0;
    double test_fraction = 0.2;
    bool include_apose = false;
    std::string model;
    std::uint64_t model_seed = 0;
    std::size_t first_subject = 0;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("gen", "Generate a synthetic landmark dataset split into train and test subjects");
  sub->add_option("--out-dir", o->out_dir, "Output directory")->required();
  sub->add_option("--subjects", o->subjects, "Number of subjects")->check(CLI::PositiveNumber);
  sub->add_option("--poses", o->poses, "Poses per subject")->check(CLI::PositiveNumber);
  sub->add_option("--pose-mix", o->pose_mix,
                  "Standing,sitting,varied fractions; default mirrors 1000/1000/10000 poses");
  sub->add_option("--seed", o->seed, "Random seed");
  sub->add_option("--test-fraction", o->test_fraction, "Fraction of subjects in the test split")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_flag("--include-apose", o->include_apose, "Add one A-pose record (pose id 'apose') per subject");
  sub->add_option("--model", o->model, "Body model file; default is the built-in model")->check(CLI::ExistingFile);
  sub->add_option("--model-seed", o->model_seed, "Seed of the built-in model");
  sub->add_option("--first-subject", o->first_subject, "Offset of the first subject index");
  add_common(*sub, o->common);
  sub->callback([o, sub] {
    const Log log(o->common);
    const BodyModel model = model_from(o->model, o->model_seed);
    GenerateOptions g;
    g.n_subjects = o->subjects;
    g.poses_per_subject = o->poses;
    g.mix = parse_pose_mix(o->pose_mix);
    g.seed = o->seed;
    g.include_apose = o->include_apose;
    g.first_subject = o->first_subject;
    g.threads = o->common.threads;
    log.info("generating ", g.n_subjects, " subjects x ", g.poses_per_subject, " poses (seed ", g.seed, ")");
    const GeneratedDataset data = generate_dataset(model, g);
    const auto test_ids = test_subjects(data.records, o->test_fraction, o->seed);
    const std::set<std::string> test(test_ids.begin(), test_ids.end());
    std::vector<LandmarkRecord> train_records, test_records;
    std::vector<RecordParams> train_params, test_params;
    for (std::size_t i = 0; i < data.records.size(); ++i) {
      const bool is_test = test.count(data.records[i].landmarks.subject_id()) > 0;
      (is_test ? test_records : train_records).push_back(data.records[i]);
      (is_test ? test_params : train_params).push_back(data.params[i]);
    }
    const fs::path dir(o->out_dir);
    write_dataset(dir / "train.tsv", train_records);
    write_dataset(dir / "test.tsv", test_records);
    write_params(dir / "train.params", train_params);
    write_params(dir / "test.params", test_params);
    {
      auto out = open_output(dir / "model.txt");
      save_model(out, model);
    }
    write_manifest(dir / "manifest.txt", *sub,
                   {"train_records=" + std::to_string(train_records.size()),
                    "test_records=" + std::to_string(test_records.size()),
                    "test_subjects=" + std::to_string(test_ids.size())});
    std::cout << "records " << data.records.size() << " train " << train_records.size() << " test "
              << test_records.size() << '\n';
  });
}

// --- select ----------------------------------------------------------------

void register_select(CLI::App& app) {
  struct Opts {
    Common common;
    std::string data, out, subject;
    double threshold = 10.0;
    std::string reference_pose_id = "apose";
    std::size_t memory_cap = 20000;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("select", "Select pose-independent landmark distances from one subject's poses");
  sub->add_option("--data", o->data, "Dataset with one subject's posed records")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o->out, "Selection file to write")->required();
  sub->add_option("--threshold", o->threshold, "Median deviation threshold in mm (10 mm = 1 cm)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--reference-pose-id", o->reference_pose_id, "Pose id of the A-pose reference record");
  sub->add_option("--subject", o->subject, "Subject to use when the dataset holds several");
  sub->add_option("--memory-cap", o->memory_cap, "Samples kept in memory before spilling to disk")
      ->check(CLI::PositiveNumber);
  add_common(*sub, o->common);
  sub->callback([o, sub] {
    const Log log(o->common);
    const auto records = read_dataset(fs::path(o->data));
    std::set<std::string> subjects;
    for (const auto& r : records) subjects.insert(r.landmarks.subject_id());
    std::string subject = o->subject;
    if (subject.empty()) {
      if (subjects.size() != 1) {
        throw Error(ErrorKind::InvalidArgument, "selection uses a single subject; the dataset has " +
                                                    std::to_string(subjects.size()) + ", pick one with --subject");
      }
      subject = *subjects.begin();
    } else if (!subjects.count(subject)) {
      throw Error(ErrorKind::InvalidArgument, "subject '" + subject + "' not in dataset");
    }
    const LandmarkSet* reference = nullptr;
    std::vector<LandmarkSet> samples;
    for (const auto& r : records) {
      if (r.landmarks.subject_id() != subject) continue;
      if (r.landmarks.pose_id() == o->reference_pose_id && reference == nullptr) {
        reference = &r.landmarks;
      } else {
        samples.push_back(r.landmarks);
      }
    }
    if (reference == nullptr) {
      throw Error(ErrorKind::InvalidArgument, "no record with pose id '" + o->reference_pose_id + "' for subject " +
                                                  subject);
    }
    SelectorOptions so;
    so.memory_cap_samples = o->memory_cap;
    so.threads = o->common.threads;
    FeatureSelector selector(*reference, so);
    selector.add(samples);
    const FeatureSelection sel = selector.finish(o->threshold);
    save_selection(fs::path(o->out), sel);
    write_manifest(sibling(o->out, ".manifest"), *sub);
    log.debug("spilled to disk: ", selector.spilled() ? "yes" : "no");
    std::cout << "selected " << sel.pairs.size() << " of " << kNumPairs << " pairs from " << sel.n_poses
              << " poses; " << sel.feature_count() << " features\n";
  });
}

// --- train -----------------------------------------------------------------

void register_train(CLI::App& app) {
  struct Opts {
    Common common;
    std::string data, selection, out, log;
    TrainConfig config;
    std::string hidden = "194,97";
    std::string optimizer = "adam";
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("train", "Train the measurement regressor (368-194-97-11 when 158 pairs are selected)");
  sub->add_option("--data", o->data, "Training dataset with measurements")->required()->check(CLI::ExistingFile);
  sub->add_option("--selection", o->selection, "Feature selection file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o->out, "Model file to write")->required();
  sub->add_option("--log", o->log, "Training log CSV; default <out>.log.csv");
  sub->add_option("--hidden", o->hidden, "Hidden layer sizes");
  sub->add_option("--epochs", o->config.epochs, "Maximum epochs")->check(CLI::PositiveNumber);
  sub->add_option("--batch-size", o->config.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  sub->add_option("--learning-rate", o->config.learning_rate, "Step size");
  sub->add_option("--optimizer", o->optimizer, "adam or sgd-momentum")->check(CLI::IsMember({"adam", "sgd-momentum"}));
  sub->add_option("--seed", o->config.seed, "Initialization, split and shuffling seed");
  sub->add_option("--validation-fraction", o->config.validation_fraction, "Fraction of subjects held out, 0 to 0.5");
  sub->add_option("--patience", o->config.early_stop_patience, "Epochs without validation improvement before stopping");
  sub->add_option("--min-feature-scale", o->config.min_feature_scale, "Floor of feature standard deviations (mm)");
  add_common(*sub, o->common);
  sub->callback([o, sub] {
    const Log log(o->common);
    TrainConfig config = o->config;
    config.threads = o->common.threads;
    config.optimizer = optimizer_from_string(o->optimizer);
    config.hidden.clear();
    for (auto t : split(o->hidden, ',')) config.hidden.push_back(static_cast<int>(parse_integer(trim(t))));
    const auto records = read_dataset(fs::path(o->data));
    const FeatureSelection selection = load_selection(fs::path(o->selection));
    log.info("training on ", records.size(), " records with ", selection.feature_count(), " features");
    const TrainResult result = train(records, selection, config);
    save_mlp(fs::path(o->out), result.model);
    {
      auto out = open_output(o->log.empty() ? sibling(o->out, ".log.csv") : fs::path(o->log));
      write_training_log(out, result.log);
    }
    write_manifest(sibling(o->out, ".manifest"), *sub);
    const auto& last = result.log.back();
    std::cout << "epochs " << result.log.size() << " best_epoch " << result.best_epoch << " train_mse "
              << format_real(last.train_mse) << " val_mse " << format_real(last.val_mse) << '\n';
  });
}

// --- predict ---------------------------------------------------------------

void register_predict(CLI::App& app) {
  struct Opts {
    Common common;
    std::string model, selection, data, out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("predict", "Predict the 11 measurements for every record");
  sub->add_option("--model", o->model, "Trained model file")->required()->check(CLI::ExistingFile);
  sub->add_option("--selection", o->selection, "Feature selection used in training")->required()->check(CLI::ExistingFile);
  sub->add_option("--data", o->data, "Landmark dataset")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o->out, "Predictions CSV to write")->required();
  add_common(*sub, o->common);
  sub->callback([o, sub] {
    const MlpModel model = load_mlp(fs::path(o->model));
    const FeatureSelection selection = load_selection(fs::path(o->selection));
    const auto records = read_dataset(fs::path(o->data));
    std::vector<LabeledMeasurements> rows(records.size());
    parallel_for(records.size(), resolve_threads(o->common.threads), [&](std::size_t i) {
      const auto& l = records[i].landmarks;
      rows[i] = {l.subject_id(), l.pose_id(), predict(model, l, selection), records[i].sex};
    });
    write_predictions_file(o->out, rows);
    write_manifest(sibling(o->out, ".manifest"), *sub);
    std::cout << "predicted " << rows.size() << " records\n";
  });
}

// --- eval ------------------------------------------------------------------

void register_eval(CLI::App& app) {
  struct Opts {
    Common common;
    std::string truth, pred, out;
    std::string mode = "static";
    bool by_sex = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("eval", "MAE/aMAE against ground truth, or per-subject sequence stability");
  sub->add_option("--pred", o->pred, "Predictions CSV")->required()->check(CLI::ExistingFile);
  sub->add_option("--truth", o->truth, "Dataset with ground-truth measurements (required for static mode)")
      ->check(CLI::ExistingFile);
  sub->add_option("--mode", o->mode, "static (MAE) or sequence (std of frame minus first frame)")
      ->check(CLI::IsMember({"static", "sequence"}));
  sub->add_flag("--by-sex", o->by_sex, "Add per-sex columns");
  sub->add_option("--out", o->out, "Report CSV; a text twin is written next to it")->required();
  add_common(*sub, o->common);
  sub->callback([o, sub] {
    std::vector<LabeledMeasurements> pred;
    {
      auto in = open_input(o->pred);
      pred = read_predictions_csv(in, o->pred);
    }
    EvalReport report;
    if (o->mode == "static") {
      if (o->truth.empty()) throw Error(ErrorKind::InvalidArgument, "static evaluation needs --truth");
      const auto truth = truth_of(read_dataset(fs::path(o->truth)));
      report = mae(truth, pred, o->by_sex);
    } else {
      if (!o->truth.empty()) {
        const auto records = read_dataset(fs::path(o->truth));
        std::map<std::string, char> sex;
        for (const auto& r : records) sex[r.landmarks.subject_id()] = r.sex;
        for (auto& p : pred) {
          if (auto it = sex.find(p.subject_id); it != sex.end()) p.sex = it->second;
        }
      }
      report = sequence_report(pred, o->by_sex);
    }
    {
      auto out = open_output(o->out);
      write_report_csv(out, report);
    }
    {
      auto out = open_output(fs::path(o->out).replace_extension(".txt"));
      write_report_text(out, report);
    }
    write_manifest(sibling(o->out, ".manifest"), *sub);
    std::cout << (report.mode == "static" ? "aMAE " : "mean_std ") << format_real(report.average) << " mm\n";
  });
}

// --- noise -----------------------------------------------------------------

void register_noise(CLI::App& app) {
  struct Opts {
    Common common;
    std::string data, params, model, out;
    double max_dist = 5.6;
    std::uint64_t seed = 0;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("noise", "Move every landmark along the body surface by up to --max-dist mm");
  sub->add_option("--data", o->data, "Landmark dataset")->required()->check(CLI::ExistingFile);
  sub->add_option("--params", o->params, "Generator parameters; default: the dataset path with .params")
      ->check(CLI::ExistingFile);
  sub->add_option("--model", o->model, "Body model file the dataset was generated with")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o->out, "Augmented dataset to write")->required();
  sub->add_option("--max-dist", o->max_dist, "Maximum walk along the surface in mm (5.6 mm = 0.56 cm)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", o->seed, "Random seed");
  add_common(*sub, o->common);
  sub->callback([o, sub] {
    const BodyModel model = model_from(o->model, 0);
    auto records = read_dataset(fs::path(o->data));
    const fs::path params_path = o->params.empty() ? fs::path(o->data).replace_extension(".params") : fs::path(o->params);
    const auto params = read_params(params_path);
    if (params.size() != records.size()) {
      throw Error(ErrorKind::LengthMismatch, std::to_string(records.size()) + " records but " +
                                                 std::to_string(params.size()) + " parameter rows");
    }
    for (std::size_t r = 0; r < records.size(); ++r) {
      if (params[r].subject_id != records[r].landmarks.subject_id() || params[r].pose_id != records[r].landmarks.pose_id()) {
        throw Error(ErrorKind::IdMismatch, "parameter row " + std::to_string(r + 1) + " does not match its record");
      }
    }
    parallel_for(records.size(), resolve_threads(o->common.threads), [&](std::size_t r) {
      const TriMesh mesh = pose_mesh(model, params[r].shape, params[r].pose);
      Points coords = records[r].landmarks.coords();
      for (std::size_t i = 0; i < kNumLandmarks; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const auto moved = perturb_landmark_on_surface(mesh, coords.row(row).transpose(), o->max_dist,
                                                       derive_seed(o->seed, RngStream::Noise, r * kNumLandmarks + i));
        coords.row(row) = moved.point.transpose();
      }
      records[r].landmarks = LandmarkSet(std::move(coords), records[r].landmarks.subject_id(),
                                         records[r].landmarks.pose_id());
    });
    write_dataset(fs::path(o->out), records);
    write_params(fs::path(o->out).replace_extension(".params"), params);
    write_manifest(sibling(o->out, ".manifest"), *sub);
    std::cout << "perturbed " << records.size() << " records\n";
  });
}

// --- baseline --------------------------------------------------------------

void register_baseline(CLI::App& app) {
  struct Opts {
    Common common;
    std::string data, model, out;
    OptimConfig config = OptimConfig::fitting_defaults();
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("baseline", "Fit the body model to each record, repose to A-pose and measure");
  sub->add_option("--data", o->data, "Landmark dataset")->required()->check(CLI::ExistingFile);
  sub->add_option("--model", o->model, "Body model file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o->out, "Predictions CSV; residuals go to <out>.residuals.csv")->required();
  sub->add_option("--max-iterations", o->config.max_iterations, "Optimizer iterations")->check(CLI::PositiveNumber);
  sub->add_option("--learning-rate", o->config.learning_rate, "Initial step size");
  sub->add_option("--tolerance", o->config.tolerance, "Relative improvement per window below which fitting stops");
  add_common(*sub, o->common);
  sub->callback([o, sub] {
    const BodyModel model = model_from(o->model, 0);
    const auto records = read_dataset(fs::path(o->data));
    std::vector<LabeledMeasurements> rows(records.size());
    std::vector<FitResult> fits(records.size());
    parallel_for(records.size(), resolve_threads(o->common.threads), [&](std::size_t i) {
      const auto& l = records[i].landmarks;
      fits[i] = fit_body_to_landmarks(model, l, ShapeParams::zero(model.num_shape()),
                                      PoseParams::zero(model.num_joints()), o->config);
      rows[i] = {l.subject_id(), l.pose_id(), measure_ground_truth(model, fits[i].shape), records[i].sex};
    });
    write_predictions_file(o->out, rows);
    {
      auto out = open_output(sibling(o->out, ".residuals.csv"));
      out << "# anthro-fit-residuals v1 unit=mm\nsubject_id,pose_id,rms_residual_mm,iterations\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        out << rows[i].subject_id << ',' << rows[i].pose_id << ',' << format_real(fits[i].rms_residual_mm) << ','
            << fits[i].iterations << '\n';
      }
    }
    write_manifest(sibling(o->out, ".manifest"), *sub);
    std::cout << "fitted " << rows.size() << " records\n";
  });
}

// --- ambiguity -------------------------------------------------------------

void register_ambiguity(CLI::App& app) {
  struct Opts {
    Common common;
    std::string model, beta_ref, out;
    std::uint64_t model_seed = 0;
    double k_max = 25.0;
    std::size_t k_steps = 51;
    OptimConfig config = OptimConfig::ambiguity_defaults();
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("ambiguity", "Find the shape direction that barely moves landmarks and sweep it");
  sub->add_option("--model", o->model, "Body model file; default is the built-in model")->check(CLI::ExistingFile);
  sub->add_option("--model-seed", o->model_seed, "Seed of the built-in model");
  sub->add_option("--beta-ref", o->beta_ref, "Comma-separated reference shape; default all zeros");
  sub->add_option("--k-max", o->k_max, "Largest step along the direction")->check(CLI::PositiveNumber);
  sub->add_option("--k-steps", o->k_steps, "Number of uniform steps from 0 to --k-max")->check(CLI::Range(2, 100000));
  sub->add_option("--seed", o->config.seed, "Seed of the random starts");
  sub->add_option("--restarts", o->config.restarts, "Number of random starts")->check(CLI::PositiveNumber);
  sub->add_option("--max-iterations", o->config.max_iterations, "Iterations per start")->check(CLI::PositiveNumber);
  sub->add_option("--out", o->out, "Curve CSV to write")->required();
  add_common(*sub, o->common);
  sub->callback([o, sub] {
    const BodyModel model = model_from(o->model, o->model_seed);
    ShapeParams beta_ref = ShapeParams::zero(model.num_shape());
    if (!o->beta_ref.empty()) {
      const auto parts = split(o->beta_ref, ',');
      if (parts.size() != model.num_shape()) {
        throw Error(ErrorKind::DimensionMismatch, "--beta-ref needs " + std::to_string(model.num_shape()) + " values");
      }
      for (std::size_t k = 0; k < parts.size(); ++k) beta_ref.coeffs[static_cast<Eigen::Index>(k)] = parse_real(trim(parts[k]));
    }
    const AmbiguityDirection dir = optimize_ambiguity_direction(model, beta_ref, o->config, o->common.threads);
    std::vector<double> ks(o->k_steps);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      ks[i] = o->k_max * static_cast<double>(i) / static_cast<double>(ks.size() - 1);
    }
    AmbiguityCurve curve = sweep_ambiguity(model, beta_ref, dir.delta, ks, o->common.threads);
    curve.residual = dir.objective;
    {
      auto out = open_output(o->out);
      write_curve_csv(out, curve);
    }
    write_manifest(sibling(o->out, ".manifest"), *sub);
    std::cout << "objective " << format_real(dir.objective) << '\n';
  });
}

}  // namespace

void register_commands(CLI::App& app) {
  register_gen(app);
  register_select(app);
  register_train(app);
  register_predict(app);
  register_eval(app);
  register_noise(app);
  register_baseline(app);
  register_ambiguity(app);
}

}  // namespace anthro::cli
