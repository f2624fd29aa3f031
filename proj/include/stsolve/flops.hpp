#pragma once

#include <cstdint>

namespace stsolve::flops {

// Per-thread multiply-add counter. Kernels add their analytic cost; solvers
// read the delta over a solve.
std::uint64_t count() noexcept;
void add(std::uint64_t n) noexcept;

// Work done inside a MonitorScope (history instrumentation) is moved out of
// the main counter into the monitor counter when the scope closes.
std::uint64_t monitor_count() noexcept;

class MonitorScope {
public:
    MonitorScope() noexcept;
    ~MonitorScope();
    MonitorScope(const MonitorScope&) = delete;
    MonitorScope& operator=(const MonitorScope&) = delete;

private:
    std::uint64_t start_;
};

}  // namespace stsolve::flops
