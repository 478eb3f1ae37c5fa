#pragma once

#include <string>
#include <vector>

#include "finflow/common/keyed_config.hpp"

namespace finflow::cli {

/// Every recognized key of a command with its default value.
KeyedConfig command_defaults(const std::string& command);

/// Defaults, overlaid with the config file, overlaid with flag overrides.
/// Throws std::invalid_argument on keys the command does not know.
KeyedConfig resolve_config(const std::string& command, const KeyedConfig& file, const KeyedConfig& overrides);

void cmd_gen_data(const KeyedConfig& cfg, const std::string& out_dir);
void cmd_train(const KeyedConfig& cfg, const std::string& out_dir);
void cmd_finetune(const KeyedConfig& cfg, const std::string& out_dir);
void cmd_eval(const KeyedConfig& cfg, const std::string& out_dir);
void cmd_bench_latency(const KeyedConfig& cfg, const std::string& out_dir);

/// Full command line entry point; returns the process exit code. Failures
/// print a single "error: ..." line on stderr.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace finflow::cli
