#pragma once

#include <string>
#include <vector>

namespace efld {

// Property suites with exact oracles behind the `verify` CLI subcommand.
// Every check reports its worst margin (>= 0 means pass); suites are
// deterministic, each trial draws from a fixed named stream.

struct CheckLine {
    std::string name;
    double margin = 0.0;   // worst slack observed; negative = violated
    double threshold = 0.0;  // margin must be >= threshold
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckLine> checks;
    // per-trial rows "trial,check,margin" for the margins CSV
    std::vector<std::string> trial_margins;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

std::vector<std::string> suite_names();  // excludes "all"

SuiteResult run_suite(const std::string& name);

void print_suite(const SuiteResult& result);

}  // namespace efld
