#include "growthlab/progressions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace growthlab {

ZetaSpec ZetaSpec::zeta1(double lambda_left, double lambda, double p) {
    if (!(lambda_left > 0.0) || !(lambda > 0.0)) {
        throw std::invalid_argument("zeta1 requires positive lambdas");
    }
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("p must lie in (0,1)");
    }
    // log zeta1 = lambda_left (1 - xi) - lambda
    return ZetaSpec{Kind::Zeta1, p, -lambda_left, lambda_left - lambda};
}

ZetaSpec ZetaSpec::zeta2(double lambda_right, double lambda, double p) {
    if (!(lambda_right > 0.0) || !(lambda > 0.0)) {
        throw std::invalid_argument("zeta2 requires positive lambdas");
    }
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("p must lie in (0,1)");
    }
    // log zeta2 = lambda_right xi - lambda
    return ZetaSpec{Kind::Zeta2, p, lambda_right, -lambda};
}

ZetaSpec ZetaSpec::two_point(double xi_coef, double offset, double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("p must lie in (0,1)");
    }
    return ZetaSpec{Kind::TwoPoint, p, xi_coef, offset};
}

double ZetaSpec::term(bool xi) const { return std::exp(log_term(xi)); }

double ZetaSpec::stdev_log() const {
    return std::abs(xi_coef) * std::sqrt(p * (1.0 - p));
}

ZetaSpec ZetaSpec::reciprocal() const {
    ZetaSpec out = *this;
    out.xi_coef = -xi_coef;
    out.offset = -offset;
    // 1/zeta2 = e^{lambda - lambda_right xi} = e^{lambda_right (1 - xi) - (lambda_right - lambda)},
    // which is the zeta1 family (and vice versa); keep the kind in sync.
    if (kind == Kind::Zeta1) out.kind = Kind::Zeta2;
    else if (kind == Kind::Zeta2) out.kind = Kind::Zeta1;
    return out;
}

ProgressionSample sample_Z(const ZetaSpec& spec, double tail_epsilon,
                           std::uint64_t max_terms, RngStream& rng) {
    const double m = spec.expected_log();
    if (!(m < 0.0)) {
        throw std::invalid_argument(
            "sample_Z requires negative drift (Z diverges a.s. otherwise)");
    }
    if (!(tail_epsilon > 0.0)) {
        throw std::invalid_argument("tail_epsilon must be positive");
    }
    const double s = spec.stdev_log();
    // Window sized so the contraction estimate stays below e^{m/2} < 1.
    const double w = std::max(16.0, std::ceil((6.0 * s / -m) * (6.0 * s / -m)));
    const double c_hat = std::exp(m + 3.0 * s / std::sqrt(w));
    const double one_minus_c = 1.0 - c_hat;

    ProgressionSample out;
    double y = 1.0;
    out.value = 1.0; // Y_0
    for (std::uint64_t i = 1; i <= max_terms; ++i) {
        y *= spec.term(rng.bernoulli(spec.p));
        out.value += y;
        out.terms_used = i;
        const double residual = y / one_minus_c;
        if (residual < tail_epsilon) {
            out.truncation_error_bound = residual;
            return out;
        }
    }
    out.truncation_error_bound = y / one_minus_c;
    out.truncation_unresolved = true;
    return out;
}

EnumeratedDistributions enumerate_Fn_vs_Zn(const ZetaSpec& spec, int n) {
    if (n < 1 || n > 12) {
        throw std::invalid_argument("enumerate_Fn_vs_Zn supports 1 <= n <= 12");
    }
    const ZetaSpec recip = spec.reciprocal();
    const std::uint64_t paths = 1ull << n;
    EnumeratedDistributions out;
    out.f_n.reserve(paths);
    out.z_n_reciprocal.reserve(paths);
    const double log_p = std::log(spec.p);
    const double log_q = std::log(1.0 - spec.p);
    for (std::uint64_t mask = 0; mask < paths; ++mask) {
        double log_w = 0.0;
        double y_f = 1.0, z_f = 1.0;
        double y_r = 1.0, z_r = 1.0;
        for (int i = 0; i < n; ++i) {
            const bool xi = (mask >> i) & 1u;
            log_w += xi ? log_p : log_q;
            y_f *= spec.term(xi);
            z_f += y_f;
            y_r *= recip.term(xi);
            z_r += y_r;
        }
        const double weight = std::exp(log_w);
        out.f_n.push_back({z_f / y_f, weight});
        out.z_n_reciprocal.push_back({z_r, weight});
    }
    auto by_value = [](const WeightedAtom& a, const WeightedAtom& b) {
        return a.value < b.value;
    };
    std::sort(out.f_n.begin(), out.f_n.end(), by_value);
    std::sort(out.z_n_reciprocal.begin(), out.z_n_reciprocal.end(), by_value);
    return out;
}

namespace {

struct Cluster {
    double value_sum = 0.0;
    double weight = 0.0;
    std::size_t count = 0;
};

std::vector<Cluster> cluster_by_gap(const std::vector<WeightedAtom>& atoms, double tol) {
    std::vector<Cluster> clusters;
    for (const auto& a : atoms) {
        const double scale = std::max(1.0, std::abs(a.value));
        if (clusters.empty() ||
            a.value - clusters.back().value_sum / clusters.back().count > tol * scale) {
            clusters.push_back({a.value, a.weight, 1});
        } else {
            clusters.back().value_sum += a.value;
            clusters.back().weight += a.weight;
            clusters.back().count += 1;
        }
    }
    return clusters;
}

} // namespace

bool weighted_distributions_match(const std::vector<WeightedAtom>& a,
                                  const std::vector<WeightedAtom>& b, double tol) {
    if (a.size() != b.size()) return false;
    const auto ca = cluster_by_gap(a, tol);
    const auto cb = cluster_by_gap(b, tol);
    if (ca.size() != cb.size()) return false;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        const double va = ca[i].value_sum / ca[i].count;
        const double vb = cb[i].value_sum / cb[i].count;
        const double scale = std::max(1.0, std::max(std::abs(va), std::abs(vb)));
        if (std::abs(va - vb) > tol * scale) return false;
        if (ca[i].count != cb[i].count) return false;
        if (std::abs(ca[i].weight - cb[i].weight) > tol) return false;
    }
    return true;
}

StoppedSample sample_Z_until_stopping(const ZetaSpec& spec, double gamma, RngStream& rng) {
    if (!(spec.expected_log() > 0.0)) {
        throw std::invalid_argument(
            "sample_Z_until_stopping requires positive drift (m_hat may be infinite)");
    }
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("gamma must lie in (0,1)");
    }
    StoppedSample out;
    double y = 1.0; // Y_0; gamma * Y_0 < 1 since gamma < 1, so m_hat >= 1
    double z = 1.0; // Z_0
    constexpr std::uint64_t kMaxIters = 1ull << 40;
    for (std::uint64_t i = 1; i < kMaxIters; ++i) {
        const double y_next = y * spec.term(rng.bernoulli(spec.p));
        if (gamma * y_next >= 1.0) {
            out.m_hat = i;
            out.z_before = z;
            out.y_before = y;
            out.y_at = y_next;
            out.f_before = z / y;
            return out;
        }
        y = y_next;
        z += y;
    }
    throw std::runtime_error("sample_Z_until_stopping failed to stop");
}

namespace {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe exp_neg_z_estimate(const ZetaSpec& spec, std::uint64_t samples, std::uint64_t seed,
                          std::uint64_t stream_offset) {
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        RngStream rng(seed, stream_offset + i);
        const ProgressionSample sample = sample_Z(spec, 1e-9, 1'000'000, rng);
        const double v = std::exp(-sample.value);
        const double d = v - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (v - mean);
    }
    const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
    return {mean, std::sqrt(std::max(0.0, var) / static_cast<double>(samples))};
}

} // namespace

DominanceReport dominance_check(const ZetaSpec& a, const ZetaSpec& b,
                                std::uint64_t samples, std::uint64_t seed) {
    if (a.kind != b.kind) {
        throw std::invalid_argument("dominance_check requires specs of the same kind");
    }
    DominanceReport rep;
    rep.samples = samples;
    ZetaSpec ea = a, eb = b;
    if (a.expected_log() >= 0.0 || b.expected_log() >= 0.0) {
        // Positive-drift specs are compared through their reciprocals (C3 route).
        ea = a.reciprocal();
        eb = b.reciprocal();
        rep.via_reciprocal = true;
        if (ea.expected_log() >= 0.0 || eb.expected_log() >= 0.0) {
            throw std::invalid_argument("dominance_check: divergent specs on both routes");
        }
    }
    const auto ra = exp_neg_z_estimate(ea, samples, seed, 0);
    const auto rb = exp_neg_z_estimate(eb, samples, seed, samples);
    rep.est_a = ra.mean;
    rep.se_a = ra.se;
    rep.est_b = rb.mean;
    rep.se_b = rb.se;

    // st-ordering of the effective (negative-drift) sequences: larger terms
    // mean larger Z and smaller E[e^{-Z}].
    const ZetaSpec& ta = ea;
    const ZetaSpec& tb = eb;
    int pred = 0;
    if (ta.xi_coef == tb.xi_coef && ta.offset == tb.offset &&
        ta.xi_coef != 0.0 && ta.p != tb.p) {
        const bool a_st_larger =
            (ta.xi_coef > 0.0) ? (ta.p > tb.p) : (ta.p < tb.p);
        pred = a_st_larger ? -1 : +1;
    }
    rep.predicted = pred;
    const double diff = rep.est_a - rep.est_b;
    const double slack = 3.0 * std::sqrt(rep.se_a * rep.se_a + rep.se_b * rep.se_b);
    if (pred > 0) rep.holds_within_3se = diff >= -slack;
    else if (pred < 0) rep.holds_within_3se = diff <= slack;
    else rep.holds_within_3se = std::abs(diff) <= slack;
    return rep;
}

EnvelopeReport binomial_envelope_check(double p, double kappa, double epsilon,
                                       std::uint64_t horizon, std::uint64_t samples,
                                       std::uint64_t seed) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0,1)");
    }
    EnvelopeReport rep;
    rep.p = p;
    rep.kappa = kappa;
    rep.epsilon = epsilon;
    rep.horizon = horizon;
    rep.samples = samples;
    rep.c_grid = {1.0, 2.0, 4.0, 8.0, 16.0};
    rep.coverage.assign(rep.c_grid.size(), 0.0);

    const std::uint64_t m_start = static_cast<std::uint64_t>(std::floor(1.0 / p));
    const double lo_slope = p * (1.0 - kappa) / 2.0;
    const double hi_slope = p * (1.0 + kappa);
    std::vector<std::uint64_t> hold_count(rep.c_grid.size(), 0);
    for (std::uint64_t s = 0; s < samples; ++s) {
        RngStream rng(seed, s);
        // Track, per path, the largest constant violated on each side.
        double worst_lo = -std::numeric_limits<double>::infinity();
        double worst_hi = -std::numeric_limits<double>::infinity();
        std::uint64_t u = 0;
        for (std::uint64_t n = 1; n <= horizon; ++n) {
            u += rng.bernoulli(p) ? 1u : 0u;
            if (n < m_start) continue;
            const double un = static_cast<double>(u);
            const double nn = static_cast<double>(n);
            worst_lo = std::max(worst_lo, lo_slope * nn - un); // need c >= this
            worst_hi = std::max(worst_hi, un - hi_slope * nn); // need c >= this
        }
        for (std::size_t ci = 0; ci < rep.c_grid.size(); ++ci) {
            if (worst_lo <= rep.c_grid[ci] && worst_hi <= rep.c_grid[ci]) ++hold_count[ci];
        }
    }
    for (std::size_t ci = 0; ci < rep.c_grid.size(); ++ci) {
        rep.coverage[ci] =
            static_cast<double>(hold_count[ci]) / static_cast<double>(samples);
        if (rep.found_c < 0.0 && rep.coverage[ci] >= epsilon) rep.found_c = rep.c_grid[ci];
    }
    return rep;
}

} // namespace growthlab
