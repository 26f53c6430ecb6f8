#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace passtopic {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// Batch driver: ingest, detect, mine, export, serve. args excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace passtopic
