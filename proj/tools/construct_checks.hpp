#pragma once

#include <string>
#include <vector>

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

/// Runs the named construction checks ("all" selects every group).
std::vector<CheckResult> run_construct_checks(const std::string& which);
