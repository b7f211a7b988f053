#pragma once

// The acceptance gate: ten numbered criteria, each reduced to one pass/fail
// line. Shared by the acceptance test binary and `engel verify --all`.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "engel/distribution.hpp"

namespace engel::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

inline constexpr int kCriterionCount = 10;

/// Runs criterion `id` (1..10). Any exception is caught and reported as a failure.
CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_all();

/// "PASS [3] horizontality: ..." / "FAIL [2] ..."
std::string format_line(const CriterionResult& r);
/// Prints one line per result and a summary; returns the number of failures.
int report(std::ostream& os, const std::vector<CriterionResult>& results);

/// Seeded random pair (f, g) with small integer coefficients and total degree <= max_degree.
PfaffianPair random_pair(std::uint64_t seed, int max_degree = 3);

}  // namespace engel::acceptance
