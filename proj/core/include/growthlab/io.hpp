#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "growthlab/experiments.hpp"
#include "growthlab/landscape.hpp"
#include "growthlab/model.hpp"

namespace growthlab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleRequest {
    std::string op = "single_site_stick"; // or escape_bound, pair_stick_mc,
                                          // pair_stick_upper_mc, relocation_time, regime
    int k = 1;                            // 1-based site index
    std::uint64_t n = 50;
    std::uint64_t samples = 10'000;
    double tol = 1e-10;
};

struct ProgressionsRequest {
    std::string kind = "zeta2"; // or zeta1
    double lambda_side = 2.0;   // lambda_{k-1} for zeta1, lambda_{k+2} for zeta2
    double lambda = 1.0;
    double p = 0.25;
    double p2 = 0.5; // second Bernoulli parameter for the dominance comparison
    double gamma = 0.5;
    int enum_n = 8;
    std::uint64_t samples = 10'000;
    double kappa = 0.5;
    double epsilon = 0.9;
    std::uint64_t horizon = 10'000;
};

struct RunConfig {
    int n_sites = 0;
    std::vector<double> lambdas;
    std::vector<std::uint64_t> x0; // empty: all zeros
    std::uint64_t steps = 100'000;
    std::uint64_t runs = 1;
    std::uint64_t seed = 0;
    int window = 2'000;
    double cert_threshold = 1e-6;
    double tail_epsilon = 1e-9;
    std::uint64_t max_terms = 1'000'000;
    std::optional<OracleRequest> oracle;
    std::optional<ProgressionsRequest> progressions;

    Params params() const;
    Config initial_config() const;
};

/// Parses and validates a JSON config document. Unknown fields are
/// rejected; every error message names the offending field. Throws
/// ConfigError.
RunConfig parse_config(const std::string& json_text);

/// Landscape report as JSON (sites are 1-based in all emitted documents).
std::string landscape_json(const Params& params, const LandscapeReport& report);

/// Aggregate batch report as JSON (per-run rows go to CSV instead).
std::string batch_report_json(const BatchReport& report);

} // namespace growthlab
