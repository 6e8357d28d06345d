#include <doctest.h>

#include <cmath>

#include "anthro/analysis.hpp"
#include "anthro/dataset_io.hpp"
#include "cli_runner.hpp"
#include "test_support.hpp"

using namespace anthro;
using test::quote;
using test::run_cli;

namespace {

struct Pipeline {
  std::filesystem::path dir;
  std::string p(const std::string& name) const { return quote((dir / name).string()); }
};

// gen + select + short train, shared by the checks below.
const Pipeline& pipeline() {
  static const Pipeline pl = [] {
    Pipeline x{test::scratch_dir("cli")};
    REQUIRE(run_cli("gen --out-dir " + x.p("") + " --subjects 8 --poses 12 --include-apose --seed 3") == 0);
    REQUIRE(run_cli("select --data " + x.p("train.tsv") + " --subject S0001 --out " + x.p("sel.txt")) == 0);
    REQUIRE(run_cli("train --data " + x.p("train.tsv") + " --selection " + x.p("sel.txt") + " --out " +
                    x.p("mlp.txt") + " --epochs 15 --batch-size 32") == 0);
    return x;
  }();
  return pl;
}

std::vector<LabeledMeasurements> truth_rows(const std::filesystem::path& dataset) {
  std::vector<LabeledMeasurements> rows;
  for (const auto& r : read_dataset(dataset)) {
    rows.push_back({r.landmarks.subject_id(), r.landmarks.pose_id(), *r.measurements, r.sex});
  }
  return rows;
}

}  // namespace

TEST_CASE("gen defaults produce 2000 records and echo the seed") {
  const auto dir = test::scratch_dir("cli-gen");
  REQUIRE(run_cli("gen --out-dir " + quote(dir.string()) + " --seed 17") == 0);
  const auto train = read_dataset(dir / "train.tsv");
  const auto test_records = read_dataset(dir / "test.tsv");
  CHECK(train.size() + test_records.size() == 2000);
  CHECK(test_records.size() == 400);
  const auto manifest = test::read_file(dir / "manifest.txt");
  CHECK(manifest.find("\nseed=17\n") != std::string::npos);
  CHECK(manifest.find("\npose-mix=1/12,1/12,10/12\n") != std::string::npos);
}

TEST_CASE("full pipeline runs and eval is finite") {
  const auto& pl = pipeline();
  REQUIRE(run_cli("predict --model " + pl.p("mlp.txt") + " --selection " + pl.p("sel.txt") + " --data " +
                  pl.p("test.tsv") + " --out " + pl.p("pred.csv")) == 0);
  REQUIRE(run_cli("eval --truth " + pl.p("test.tsv") + " --pred " + pl.p("pred.csv") + " --out " +
                  pl.p("eval.csv") + " --by-sex") == 0);
  std::ifstream in(pl.dir / "eval.csv");
  std::string line, last;
  while (std::getline(in, line)) {
    if (line.rfind("aMAE", 0) == 0) last = line;
  }
  REQUIRE_FALSE(last.empty());
  CHECK(std::isfinite(std::stod(last.substr(last.find(',') + 1))));
  CHECK(std::filesystem::exists(pl.dir / "eval.txt"));
  REQUIRE(run_cli("eval --mode sequence --pred " + pl.p("pred.csv") + " --out " + pl.p("seq.csv")) == 0);
}

TEST_CASE("eval of ground truth gives zero aMAE") {
  const auto& pl = pipeline();
  {
    std::ofstream out(pl.dir / "truth.csv");
    write_predictions_csv(out, truth_rows(pl.dir / "test.tsv"));
  }
  REQUIRE(run_cli("eval --truth " + pl.p("test.tsv") + " --pred " + pl.p("truth.csv") + " --out " +
                  pl.p("zero.csv")) == 0);
  CHECK(test::read_file(pl.dir / "zero.csv").find("\naMAE,0\n") != std::string::npos);
}

TEST_CASE("predictions are byte-identical for rigidly moved landmarks") {
  const auto& pl = pipeline();
  auto records = read_dataset(pl.dir / "test.tsv");
  Rng rng(5);
  for (auto& r : records) r.landmarks = test::transform(r.landmarks, test::random_rigid(rng));
  write_dataset(pl.dir / "moved.tsv", records);
  const std::string common = " --model " + pl.p("mlp.txt") + " --selection " + pl.p("sel.txt");
  REQUIRE(run_cli("predict" + common + " --data " + pl.p("test.tsv") + " --out " + pl.p("a.csv")) == 0);
  REQUIRE(run_cli("predict" + common + " --data " + pl.p("moved.tsv") + " --out " + pl.p("b.csv")) == 0);
  CHECK(test::read_file(pl.dir / "a.csv") == test::read_file(pl.dir / "b.csv"));
}

TEST_CASE("rerun from a manifest reproduces outputs") {
  const auto& pl = pipeline();
  const auto first = test::read_file(pl.dir / "mlp.txt");
  std::filesystem::rename(pl.dir / "mlp.txt", pl.dir / "mlp.first.txt");
  REQUIRE(run_cli("train --config " + pl.p("mlp.txt.manifest") + " --threads 1") == 0);
  CHECK(test::read_file(pl.dir / "mlp.txt") == first);
}

TEST_CASE("gen manifest with unset options replays") {
  const auto& pl = pipeline();
  const auto first = test::read_file(pl.dir / "train.tsv");
  CHECK(test::read_file(pl.dir / "manifest.txt").find("\nmodel=\n") != std::string::npos);
  REQUIRE(run_cli("gen --config " + pl.p("manifest.txt") + " --threads 1") == 0);
  CHECK(test::read_file(pl.dir / "train.tsv") == first);
}

TEST_CASE("noise, baseline and ambiguity subcommands") {
  const auto& pl = pipeline();
  REQUIRE(run_cli("noise --data " + pl.p("test.tsv") + " --model " + pl.p("model.txt") + " --out " +
                  pl.p("noisy.tsv") + " --max-dist 5.6 --seed 2") == 0);
  const auto clean = read_dataset(pl.dir / "test.tsv");
  const auto noisy = read_dataset(pl.dir / "noisy.tsv");
  REQUIRE(clean.size() == noisy.size());
  double worst = 0.0;
  for (std::size_t r = 0; r < clean.size(); ++r) {
    worst = std::max(worst, (clean[r].landmarks.coords() - noisy[r].landmarks.coords()).rowwise().norm().maxCoeff());
  }
  CHECK(worst > 0.0);
  CHECK(worst <= 5.6 + 1e-6);

  // A-pose records only, to keep the fits short.
  std::vector<LandmarkRecord> apose;
  for (const auto& r : clean) {
    if (r.landmarks.pose_id() == "apose") apose.push_back(r);
  }
  write_dataset(pl.dir / "apose.tsv", apose);
  REQUIRE(run_cli("baseline --data " + pl.p("apose.tsv") + " --model " + pl.p("model.txt") + " --out " +
                  pl.p("base.csv") + " --max-iterations 300") == 0);
  CHECK(read_predictions_csv(*std::make_unique<std::ifstream>(pl.dir / "base.csv")).size() == apose.size());
  CHECK(std::filesystem::exists(pl.dir / "base.csv.residuals.csv"));

  REQUIRE(run_cli("ambiguity --out " + pl.p("amb.csv") + " --max-iterations 300 --k-steps 6 --k-max 5") == 0);
  CHECK(test::read_file(pl.dir / "amb.csv").find("\n0,0,0,0,0,0,0,0,0,0,0,0,0\n") != std::string::npos);
}

TEST_CASE("exit codes") {
  const auto& pl = pipeline();
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("gen") == 2);
  CHECK(run_cli("gen --out-dir x --pose-mix 0.5,0.6,0") == 2);
  CHECK(run_cli("select --data " + pl.p("train.tsv") + " --out " + pl.p("x.txt")) == 2);
  CHECK(run_cli("eval --pred " + pl.p("missing.csv") + " --out " + pl.p("x.csv")) == 2);
  {
    std::ofstream bad(pl.dir / "bad.cfg");
    bad << "not-an-option=1\n";
  }
  CHECK(run_cli("gen --out-dir " + pl.p("x") + " --config " + pl.p("bad.cfg")) == 2);
}
