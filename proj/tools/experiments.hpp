#pragma once

#include <string>

#include "config.hpp"

namespace fockdec::cli {

/// Exit codes shared by all subcommands: 0 success, 1 configuration error,
/// 2 numerical abort (partial output written).
int cmd_run(const RunConfig& cfg, const std::string& out_dir);
int cmd_converge(const RunConfig& cfg, const std::string& out_dir);
int cmd_permtest(const RunConfig& cfg, const std::string& out_dir);
int cmd_orbit_distance(const RunConfig& cfg, const std::string& out_dir);

}  // namespace fockdec::cli
