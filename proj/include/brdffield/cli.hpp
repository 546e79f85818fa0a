#pragma once

#include <string>
#include <vector>

#include "brdffield/source.hpp"
#include "brdffield/train.hpp"

namespace brdffield {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitDivergence = 3;

// "lambertian:r[,g,b]", "constant:r[,g,b]",
// "ggx:alpha[,f0r,f0g,f0b[,dr,dg,db]]", a .bfck checkpoint path, or a
// measured binary table path.
BrdfSource parse_source(const std::string& descriptor);

// Strict config parsing: unknown keys are rejected.
TrainConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const TrainConfig& cfg);

// Entry point used by the binary and by tests; argv-style arguments
// without the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace brdffield
