#pragma once

// Command-line surface: evaluate divided differences and derivatives, emit
// symbolic formulas, enumerate the combinatorial structures, and run the
// verification sweeps. Exit codes: 0 success, 1 parse/usage errors,
// 2 singular configurations, 3 solver failures.

namespace impdiff {

int run_cli(int argc, const char* const* argv);

} // namespace impdiff
