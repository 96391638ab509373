#pragma once

// Subcommand implementations behind the CLI. Output files are written to a
// temporary name and renamed on success, so failed runs leave no partial
// files. All CSV floats use 15 significant digits and LF line endings.

#include <string>

#include "radpair/config.hpp"

namespace radpair {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;   // schema error
inline constexpr int kExitPhysics = 3;  // validation error
inline constexpr int kExitIo = 4;       // filesystem error
inline constexpr int kExitResidual = 5; // self-check residual exceeded

struct CommandOptions {
    std::string out_override; // --out
    bool quiet = false;
};

// 15-significant-digit float formatting used by every CSV writer.
std::string fmt_g15(double x);

int cmd_evolve(const RunConfig& cfg, const CommandOptions& opt);
int cmd_compare(const RunConfig& cfg, const CommandOptions& opt);
int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt);
int cmd_trajectories(const RunConfig& cfg, const CommandOptions& opt);
int cmd_check(const RunConfig& cfg, const CommandOptions& opt);

} // namespace radpair
