#pragma once

#include <iostream>
#include <string>
#include <vector>

#include "tsl/estimates.hpp"

namespace tsl {

/// Exit codes: 0 success, 1 input error, 2 verification failure (the report
/// is still emitted). All randomness flows from the --seed flag.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The seeded verify suites behind `verify <suite>`, also used by the
/// acceptance tests. Unknown ids throw Error.
VerifyReport run_suite(const std::string& suite, int samples, std::uint64_t seed);

std::vector<std::string> suite_names();

}  // namespace tsl
