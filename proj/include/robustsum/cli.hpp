#pragma once

#include <iosfwd>

namespace robustsum {

// Exit codes: 0 success, 1 usage or schema error, 2 counterexample, 3 unknown-dominated.
int run(int argc, char** argv);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace robustsum
