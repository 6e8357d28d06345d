#include "config_file.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "anthro/dataset_io.hpp"
#include "anthro/error.hpp"
#include "anthro/text_format.hpp"

namespace anthro::cli {
namespace {

bool is_flag(const CLI::Option* opt) { return opt->get_expected_min() == 0; }

std::string long_name(const CLI::Option* opt) {
  const auto& names = opt->get_lnames();
  return names.empty() ? std::string() : names.front();
}

}  // namespace

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  KeyValues out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    out.emplace_back(std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1))));
  }
  return out;
}

std::vector<std::string> merge_config(const CLI::App& sub, std::vector<std::string> args) {
  std::string config_path;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(key);
    if (key == "config") {
      if (eq != std::string::npos) {
        config_path = a.substr(eq + 1);
      } else if (i + 1 < args.size()) {
        config_path = args[i + 1];
      }
    }
  }
  if (config_path.empty()) return args;

  for (const auto& [key, value] : read_key_values(config_path)) {
    if (key == "command") {
      if (value != sub.get_name()) {
        throw Error(ErrorKind::InvalidArgument, "config file is for '" + value + "', not '" + sub.get_name() + "'");
      }
      continue;
    }
    const CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw Error(ErrorKind::InvalidArgument, "unknown config key '" + key + "' for '" + sub.get_name() + "'");
    }
    if (given.count(key)) continue;
    if (is_flag(opt)) {
      if (value == "true" || value == "1") {
        args.push_back("--" + key);
      } else if (value != "false" && value != "0") {
        throw Error(ErrorKind::InvalidArgument, "config key '" + key + "' needs true or false");
      }
    } else if (!value.empty()) {
      // An empty value is an unset option; "--key=" would swallow the next argument.
      args.push_back("--" + key + "=" + value);
    }
  }
  return args;
}

std::string manifest_text(const CLI::App& sub, const std::vector<std::string>& comments) {
  std::ostringstream out;
  out << "# anthro-manifest v1\n";
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "command=" << sub.get_name() << '\n';
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string key = long_name(opt);
    if (key.empty() || key == "help" || key == "config") continue;
    std::string value;
    if (is_flag(opt)) {
      value = opt->count() > 0 ? "true" : "false";
    } else if (!opt->results().empty()) {
      value = opt->results().back();
    } else {
      value = opt->get_default_str();
    }
    out << key << '=' << value << '\n';
  }
  return out.str();
}

void write_manifest(const std::filesystem::path& path, const CLI::App& sub, const std::vector<std::string>& comments) {
  auto out = open_output(path);
  out << manifest_text(sub, comments);
  if (!out) throw Error(ErrorKind::Io, "failed writing manifest " + path.string());
}

}  // namespace anthro::cli
