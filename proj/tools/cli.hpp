#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace collab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDegenerate = 3;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Machine-readable output goes to --out (or `out`), human
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Figure ids accepted by `sweep`.
const std::vector<std::string>& figure_ids();

}  // namespace collab::cli
