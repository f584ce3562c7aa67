#ifndef ROTVEC_SELFTEST_HPP
#define ROTVEC_SELFTEST_HPP

#include <functional>
#include <string>

namespace rotvec {

struct SelftestResult {
    int passed = 0;
    int failed = 0;
    bool ok() const { return failed == 0; }
};

// Runs the battery of analytically forced checks (one line per check through
// the sink). Exercises every module with its closed-form cases.
SelftestResult run_selftest(const std::function<void(const std::string&)>& line_sink);

} // namespace rotvec

#endif
