#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

#include "anthro/error.hpp"
#include "commands.hpp"
#include "config_file.hpp"

namespace {

constexpr int kValidationExit = 2;
constexpr int kComputationExit = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anthro: landmark-based body measurement toolkit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", "anthro 0.1.0");
  anthro::cli::register_commands(app);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    // Options from --config are appended to the subcommand's arguments.
    if (!args.empty()) {
      if (const CLI::App* sub = app.get_subcommand_no_throw(args.front()); sub != nullptr) {
        std::vector<std::string> rest(args.begin() + 1, args.end());
        rest = anthro::cli::merge_config(*sub, std::move(rest));
        args.resize(1);
        args.insert(args.end(), rest.begin(), rest.end());
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationExit;
  } catch (const anthro::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return anthro::is_validation_error(e.kind()) ? kValidationExit : kComputationExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kComputationExit;
  }
  return 0;
}
