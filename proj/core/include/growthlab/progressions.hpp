#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "growthlab/rng.hpp"

namespace growthlab {

/// An i.i.d. positive sequence driven by a Bernoulli(p) stream. Every term
/// is two-point: log zeta_i = xi_coef * xi_i + offset. The named factories
/// build the two families tied to a pair {k, k+1} with rate lambda:
///   zeta1_i = e^{lambda_prev (1 - xi_i) - lambda}
///   zeta2_i = e^{lambda_next2 xi_i - lambda}
struct ZetaSpec {
    enum class Kind { Zeta1, Zeta2, TwoPoint };

    Kind kind = Kind::TwoPoint;
    double p = 0.5;
    double xi_coef = 0.0; // coefficient of xi in log zeta
    double offset = 0.0;  // constant part of log zeta

    static ZetaSpec zeta1(double lambda_left, double lambda, double p);
    static ZetaSpec zeta2(double lambda_right, double lambda, double p);
    static ZetaSpec two_point(double xi_coef, double offset, double p);

    double log_term(bool xi) const { return xi ? xi_coef + offset : offset; }
    double term(bool xi) const;

    /// E log zeta = xi_coef * p + offset (exact closed form).
    double expected_log() const { return xi_coef * p + offset; }
    double stdev_log() const;

    /// Spec of the sequence distributed as 1/zeta_1; an exact involution.
    ZetaSpec reciprocal() const;
};

struct ProgressionSample {
    double value = 1.0;                  // Z_n or truncated Z
    std::uint64_t terms_used = 0;        // index of the last Y_i added
    double truncation_error_bound = 0.0; // residual geometric-majorant estimate
    bool truncation_unresolved = false;  // max_terms hit before the bound met
};

/// Samples a truncated realisation of Z(zeta) = sum_i Y_i. Requires
/// expected_log < 0 (throws otherwise: the series diverges a.s. on
/// positive drift). Stops once Y_i / (1 - c_hat) < tail_epsilon where
/// c_hat = e^{m + 3 s / sqrt(w)} is a conservative contraction estimate
/// (m = expected_log, s = stdev_log, w sized so c_hat <= e^{m/2} < 1).
ProgressionSample sample_Z(const ZetaSpec& spec, double tail_epsilon,
                           std::uint64_t max_terms, RngStream& rng);

struct WeightedAtom {
    double value;
    double weight;
};

struct EnumeratedDistributions {
    std::vector<WeightedAtom> f_n;            // law of F_n(zeta) = Z_n(zeta)/Y_n
    std::vector<WeightedAtom> z_n_reciprocal; // law of Z_n(eta), eta reciprocal to zeta
};

/// Exhaustively enumerates all 2^n Bernoulli paths (n <= 12) with their
/// mu_p weights and returns both value distributions, each sorted by value.
EnumeratedDistributions enumerate_Fn_vs_Zn(const ZetaSpec& spec, int n);

/// True when the two weighted multisets coincide: atoms cluster by value
/// gaps larger than tol and clusters must match in value and total weight.
bool weighted_distributions_match(const std::vector<WeightedAtom>& a,
                                  const std::vector<WeightedAtom>& b, double tol);

struct StoppedSample {
    std::uint64_t m_hat = 0; // first n with gamma * Y_n >= 1
    double z_before = 1.0;   // Z_{m_hat - 1}
    double y_before = 1.0;   // Y_{m_hat - 1}
    double y_at = 1.0;       // Y_{m_hat}
    double f_before = 1.0;   // F_{m_hat - 1} = Z_{m_hat - 1} / Y_{m_hat - 1}
};

/// Runs the multiplicative path until gamma * Y_n >= 1. Requires positive
/// drift (so the stopping time is a.s. finite) and gamma in (0, 1).
StoppedSample sample_Z_until_stopping(const ZetaSpec& spec, double gamma, RngStream& rng);

struct DominanceReport {
    double est_a = 0.0, se_a = 0.0;
    double est_b = 0.0, se_b = 0.0;
    bool via_reciprocal = false; // positive-drift specs compared through 1/zeta
    int predicted = 0;           // sign of (E e^{-Z(a)} - E e^{-Z(b)}) predicted by st-ordering
    bool holds_within_3se = false;
    std::uint64_t samples = 0;
};

/// Estimates E[e^{-Z}] for two comparable specs (same kind, different p)
/// and reports whether the ordering predicted by stochastic domination
/// holds within three combined standard errors.
DominanceReport dominance_check(const ZetaSpec& a, const ZetaSpec& b,
                                std::uint64_t samples, std::uint64_t seed);

struct EnvelopeReport {
    double p = 0.0, kappa = 0.0, epsilon = 0.0;
    std::uint64_t horizon = 0, samples = 0;
    std::vector<double> c_grid;
    std::vector<double> coverage; // empirical coverage per grid constant
    double found_c = -1.0;        // smallest grid c with coverage >= epsilon, -1 if none
};

/// Empirical search for envelope constants c1 = c2 = c such that
/// n p (1-kappa)/2 - c <= U_n <= n p (1+kappa) + c holds for all
/// M <= n <= horizon (M = floor(1/p)) with probability >= epsilon.
EnvelopeReport binomial_envelope_check(double p, double kappa, double epsilon,
                                       std::uint64_t horizon, std::uint64_t samples,
                                       std::uint64_t seed);

} // namespace growthlab
