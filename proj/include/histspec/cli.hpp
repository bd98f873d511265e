#pragma once

#include <string>
#include <vector>

namespace histspec {

constexpr const char* kToolVersion = "1.0.0";

/// Entry point shared by the binary and the golden-file tests.
/// Exit codes: 0 success, 2 validation/usage, 3 resource, 4 non-convergence.
int run(const std::vector<std::string>& args);

}  // namespace histspec
