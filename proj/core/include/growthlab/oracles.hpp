#pragma once

#include <cstdint>

#include "growthlab/model.hpp"

namespace growthlab {

/// Rate ratios around a pair {k, k+1} with lambda_k == lambda_{k+1}, kept
/// in log space:
///   gamma_k1   = Gamma_{k-1} / (Gamma_k + Gamma_{k+1})
///   gamma_k2   = Gamma_{k+2} / (Gamma_k + Gamma_{k+1})
///   gamma_tild = sum of the remaining rates over the pair rate
/// p is the pair-conditional probability of choosing k+1, the logistic of
/// lambda * r with r = x_{k+2} - x_{k-1}.
struct PairRates {
    double log_gamma_k1 = 0.0;
    double log_gamma_k2 = 0.0;
    double log_gamma_tilde = 0.0; // -inf when N == 4 (no other sites)
    double p = 0.5;
    double lambda_prev = 0.0;  // lambda_{k-1}
    double lambda = 0.0;       // lambda_k == lambda_{k+1}
    double lambda_next2 = 0.0; // lambda_{k+2}
    long long r = 0;
};

/// Computes the pair ratios from the state. Requires exact equality of the
/// pair lambdas; the dominance of the pair rate is NOT required here (the
/// stick estimators check it themselves).
PairRates pair_rates(const Params& params, const Config& config, int k);

/// Exact probability, within tol, that every subsequent particle lands at
/// the local maximum k:
///   prod_{n>=0} Gamma_k e^{lambda_k n} /
///     (Gamma_{k-1} e^{lambda_{k-1} n} + Gamma_k e^{lambda_k n}
///      + Gamma_{k+1} e^{lambda_{k+1} n} + B).
/// The product is evaluated as exp(-sum log1p(...)) and truncated once the
/// closed-form geometric tail of the log deficit drops below tol.
/// Requires {k} to be a local maximum with the maximal rate.
double single_site_stick_probability(const Params& params, const Config& config,
                                     int k, double tol);

/// Complement of the stick probability, 1 - exp(-sum log1p(...)), evaluated
/// as -expm1(-S). Near-certain sticking drives the complement below the
/// spacing of doubles around 1, where forming 1 - stick directly would
/// quantize it; this route keeps full relative precision.
double single_site_escape_probability(const Params& params, const Config& config,
                                      int k, double tol);

/// Certified upper bound on the probability that any future particle ever
/// lands outside the local maximum k, given all-k allocation so far:
///   (G_{k-1}/G_k)/(1-e^{l_{k-1}-l_k}) + (G_{k+1}/G_k)/(1-e^{l_{k+1}-l_k})
///   + (B/G_k)/(1-e^{-l_k}).
/// May exceed 1 (vacuous). Same preconditions as the stick probability.
double escape_bound(const Params& params, const Config& config, int k);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

/// log W_n along one Bernoulli path drawn from rng (n+1 factors, n draws).
/// include_tilde = false evaluates the relaxed product of the upper bound.
double w_product_log(const PairRates& rates, std::uint64_t n, RngStream& rng,
                     bool include_tilde);

/// Estimates P_x(first n+1 particles all land in {k, k+1}) through the
/// Bernoulli-measure representation E_p W_n(U_1, ..., U_n). Requires the
/// maximal rate on the pair.
McEstimate pair_stick_probability_mc(const Params& params, const Config& config, int k,
                                     std::uint64_t n, std::uint64_t samples,
                                     std::uint64_t seed);

/// Estimates the relaxed product that upper-bounds the same probability
/// (the tilde term is dropped from every denominator, so pathwise the
/// value dominates W_n under common random numbers).
McEstimate pair_stick_upper_bound_mc(const Params& params, const Config& config, int k,
                                     std::uint64_t n, std::uint64_t samples,
                                     std::uint64_t seed);

struct RelocationResult {
    std::uint64_t n_hat = 0;
    int side = 0; // 2: rate at k+2 overtook the pair, 1: rate at k-1 did
};

/// Simulates the Bernoulli path of pair allocations until one of the side
/// rates overtakes the combined pair rate:
///   n_hat_1 = min(n: gamma_k1 e^{lambda_{k-1}(n - S_n) - lambda n} >= 1)
///   n_hat_2 = min(n: gamma_k2 e^{lambda_{k+2} S_n - lambda n} >= 1)
/// and returns min(n_hat_1, n_hat_2). Requires positive drift on at least
/// one side, otherwise the stopping time may be infinite.
RelocationResult relocation_stopping_time(const Params& params, const Config& config,
                                          int k, RngStream& rng,
                                          std::uint64_t max_iters = 100'000'000ull);

} // namespace growthlab
