#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace yamabe {

struct CheckResult {
    std::string name;   // stable identifier
    std::string tag;    // short reference label attached to the check
    bool pass = false;
    bool expected_fail = false; // a failing outcome that is the correct answer
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct ReportOptions {
    int dim = 10;
    std::uint64_t seed = 1;
    int hypothesis_samples = 10;
    int points_per_decade = 512;
    bool include_profile_residual = true;
    std::optional<std::string> jet_path; // validate an external jet when given
};

struct Report {
    ReportOptions options;
    std::vector<CheckResult> checks;

    bool all_pass() const;
    std::string to_json() const;
    std::string to_markdown() const;
};

// Runs the whole verification battery for one dimension: moment identities,
// ladder/odd-moment checks, the dimension gate table, f2/f3/f2lambda bound
// envelopes, supersolution signs, curvature identities on seeded random jets,
// the flat balance defect, the log-divergence signature and the profile
// residual fit.
Report run_report(const ReportOptions& options);

} // namespace yamabe
