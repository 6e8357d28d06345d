#pragma once

#include <CLI11.hpp>

#include <functional>
#include <string>

namespace anthro::cli {

enum class LogLevel { Quiet, Info, Debug };

struct Common {
  std::size_t threads = 0;
  std::string log_level = "info";
  std::string config;

  LogLevel level() const;
};

/// Registers every subcommand on `app`. Each subcommand's callback is
/// stored in its App and runs after parsing.
void register_commands(CLI::App& app);

}  // namespace anthro::cli
