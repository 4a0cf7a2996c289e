#pragma once

#include "rfcorr/sweep.hpp"

namespace rfcorr {

/// One validation check: a measured quantity against its pinned bound.
struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    std::string requirement;
    std::string details;
};

struct BatteryOptions {
    double tol = 1e-4;  // closed-form vs quadrature target (criterion 5 tightens per check)
    int workers = 0;
};

/// Acceptance criteria 1..9; each returns its sub-checks.
std::vector<CheckResult> acceptance_criterion(int n, const BatteryOptions& opt = {});

/// All criteria plus the steady-state comparison record, as a JSON report.
/// Sets all_pass; quadrature failures surface as ToleranceNotMet.
std::string run_validate_report(const SweepConfig& cfg, bool& all_pass);

}  // namespace rfcorr
