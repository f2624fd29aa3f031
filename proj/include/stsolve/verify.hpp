#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stsolve {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Property suites over small enumerable instances: principal-minor sums,
// the expected-projection lower bound, projector monotonicity, the ESP ratio
// bound, k-DPP sampler agreement, the coupon-collector tail, the whitening
// band and transform orthogonality. Takes a few seconds.
std::vector<CheckResult> run_verification(std::uint64_t seed);

}  // namespace stsolve
