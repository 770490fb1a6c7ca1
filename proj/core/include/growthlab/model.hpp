#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "growthlab/rng.hpp"

namespace growthlab {

/// Counts saturate here. Keeping x_i below 2^40 keeps every exponent
/// lambda_i * u_i inside the exact-integer range of a double, so log-rate
/// arithmetic never loses the ordering of sites.
inline constexpr std::uint64_t kCountCap = 1ull << 40;

/// Rate parameters of the cycle: one positive lambda per site, N >= 4.
struct Params {
    std::vector<double> lambdas;

    int n_sites() const { return static_cast<int>(lambdas.size()); }
};

/// Validates and builds Params. Throws std::invalid_argument with a
/// message naming the offending field.
Params make_params(std::vector<double> lambdas);

/// Particle counts per site; the Markov chain state.
struct Config {
    std::vector<std::uint64_t> counts;

    int n_sites() const { return static_cast<int>(counts.size()); }
    std::uint64_t total() const;
};

Config zero_config(int n_sites);
Config make_config(std::vector<std::uint64_t> counts, const Params& params);

/// u_i = x_i + x_{i-1} + x_{i+1} with cyclic indices (0-based site i).
std::uint64_t neighborhood_count(const Config& config, int i);

/// log Gamma_i = lambda_i * u_i for every site. Raw rates are never
/// exponentiated; they overflow double after a few hundred particles.
std::vector<double> log_rates(const Params& params, const Config& config);
void log_rates_into(const Params& params, const Config& config, std::vector<double>& out);

struct TransitionDistribution {
    std::vector<double> probs;
};

/// Softmax of the log rates with max subtraction. Sums to 1 within 1e-12
/// and preserves the argmax (including tie sets) of the log rates.
TransitionDistribution transition_probabilities(const Params& params, const Config& config);

struct StepResult {
    int site = -1;
    bool saturated = false;
};

/// One transition: samples the target site by inverse CDF on a single
/// uniform draw (ties in the log rates resolve by index order) and
/// increments it. Saturation at kCountCap is reported, not applied.
StepResult step(const Params& params, Config& config, RngStream& rng);

struct TrajectorySummary {
    Config final_config;
    std::uint64_t steps_executed = 0;
    bool overflow = false;
    int overflow_site = -1;
    bool stopped_by_observer = false;
};

/// Observer invoked after each allocation; return false to stop the run.
using StepObserver = std::function<bool(std::uint64_t step_index, int site, const Config& config)>;

/// Runs the chain for n_steps or until the observer stops it or a count
/// saturates. Deterministic for a fixed RngStream.
TrajectorySummary simulate(const Params& params, const Config& x0, std::uint64_t n_steps,
                           RngStream& rng, const StepObserver& observer = {});

namespace detail {

/// Scratch-reusing sampler for hot loops: recomputes the rate vector and
/// draws one site. cum must persist between calls (sized n_sites).
int sample_site(const Params& params, const Config& config, RngStream& rng,
                std::vector<double>& cum);

} // namespace detail

} // namespace growthlab
