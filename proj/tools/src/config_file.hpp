#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace CLI {
class App;
}

namespace anthro::cli {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Reads "key=value" lines; blank lines and lines starting with '#' are
/// skipped. Throws Error(Parse) on malformed lines.
KeyValues read_key_values(const std::filesystem::path& path);

/// Returns `args` (the subcommand's own arguments) extended with the
/// entries of a --config file for options not already given on the command
/// line. Keys are long option names without dashes; "command" must match
/// the subcommand.
std::vector<std::string> merge_config(const CLI::App& sub, std::vector<std::string> args);

/// The subcommand's effective options as a config file that reproduces the
/// run, plus optional comment lines.
std::string manifest_text(const CLI::App& sub, const std::vector<std::string>& comments = {});
void write_manifest(const std::filesystem::path& path, const CLI::App& sub,
                    const std::vector<std::string>& comments = {});

}  // namespace anthro::cli
