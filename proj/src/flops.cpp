#include "stsolve/flops.hpp"

namespace stsolve::flops {

namespace {
thread_local std::uint64_t g_count = 0;
thread_local std::uint64_t g_monitor = 0;
}  // namespace

std::uint64_t count() noexcept { return g_count; }
void add(std::uint64_t n) noexcept { g_count += n; }
std::uint64_t monitor_count() noexcept { return g_monitor; }

MonitorScope::MonitorScope() noexcept : start_(g_count) {}

MonitorScope::~MonitorScope() {
    const std::uint64_t spent = g_count - start_;
    g_count = start_;
    g_monitor += spent;
}

}  // namespace stsolve::flops
