#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

namespace anthro::test {

inline std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs the anthro binary with `args` (already shell-quoted where needed),
// silencing output, and returns its exit code.
inline int run_cli(const std::string& args, const std::filesystem::path& log = {}) {
  const std::string redirect = log.empty() ? " >/dev/null 2>&1" : " >" + quote(log.string()) + " 2>&1";
  const int status = std::system((quote(ANTHRO_CLI_PATH) + " " + args + redirect).c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

}  // namespace anthro::test
