#pragma once
/// @file test_harness.hpp
/// @brief Minimal PASS/FAIL test harness shared by all test binaries.
///
/// Usage:
///   record("name", condition, optional QoI string);
///   int main() { return harness::run("Suite title", [](){ ... }); }
///
/// Every record prints one line; run() prints a summary and returns the
/// number of failures (0 == success) so the binary doubles as a ctest entry.

#include <cstdio>
#include <exception>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>

namespace lcflow::test::harness {

namespace detail {
inline int& failures() {
    static int n = 0;
    return n;
}
inline int& total() {
    static int n = 0;
    return n;
}
} // namespace detail

inline void record(const std::string& name, bool ok, const std::string& qoi = "") {
    ++detail::total();
    if (!ok) ++detail::failures();
    std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
                qoi.empty() ? "" : " ", qoi.c_str());
    std::fflush(stdout);
}

inline int run(const char* title, const std::function<void()>& body) {
    std::printf("=== %s ===\n", title);
    try {
        body();
    } catch (const std::exception& e) {
        record(std::string("unexpected exception: ") + e.what(), false);
    } catch (...) {
        record("unexpected unknown exception", false);
    }
    std::printf("--- %d/%d passed ---\n", detail::total() - detail::failures(),
                detail::total());
    return detail::failures();
}

} // namespace lcflow::test::harness

namespace lcflow::test {

/// Format a value/threshold pair for record() QoI strings.
inline std::string qoi(double value, double threshold) {
    std::ostringstream ss;
    ss << std::scientific << std::setprecision(3) << "(val=" << value
       << ", thr=" << threshold << ")";
    return ss.str();
}

inline std::string qoi(double value) {
    std::ostringstream ss;
    ss << std::scientific << std::setprecision(3) << "(val=" << value << ")";
    return ss.str();
}

} // namespace lcflow::test
