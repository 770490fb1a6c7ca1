#include "growthlab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "growthlab/landscape.hpp"

namespace growthlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// exp() underflows to 0.0 below roughly -745; once log W passes this the
// product is exactly zero in double and can only stay there.
constexpr double kLogZero = -760.0;

int wrap(int i, int n) { return ((i % n) + n) % n; }

double logsumexp2(double a, double b) {
    const double m = std::max(a, b);
    if (m == -kInf) return -kInf;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// log(1 + e^{t1} + e^{t2} + e^{t3}); any t may be -inf.
double log1p_exp3(double t1, double t2, double t3) {
    const double m = std::max({0.0, t1, t2, t3});
    if (m <= 0.0) {
        double s = 0.0;
        if (t1 > -kInf) s += std::exp(t1);
        if (t2 > -kInf) s += std::exp(t2);
        if (t3 > -kInf) s += std::exp(t3);
        return std::log1p(s);
    }
    double s = std::exp(-m);
    if (t1 > -kInf) s += std::exp(t1 - m);
    if (t2 > -kInf) s += std::exp(t2 - m);
    if (t3 > -kInf) s += std::exp(t3 - m);
    return m + std::log(s);
}

void require_local_max_dominant(const Params& params, const std::vector<double>& l, int k) {
    const int n = params.n_sites();
    const double lam = params.lambdas[k];
    const double left = params.lambdas[wrap(k - 1, n)];
    const double right = params.lambdas[wrap(k + 1, n)];
    if (!(lam > std::max(left, right))) {
        throw std::invalid_argument("site k must be a local maximum");
    }
    for (int i = 0; i < n; ++i) {
        if (l[i] > l[k]) {
            throw std::invalid_argument("Gamma_k must attain the maximal rate");
        }
    }
}

struct SingleSiteTerms {
    double a, alpha; // Gamma_{k-1}/Gamma_k and lambda_k - lambda_{k-1}
    double b, beta;  // Gamma_{k+1}/Gamma_k and lambda_k - lambda_{k+1}
    double c, lam;   // B/Gamma_k and lambda_k
};

SingleSiteTerms single_site_terms(const Params& params, const Config& config, int k) {
    const int n = params.n_sites();
    const std::vector<double> l = log_rates(params, config);
    require_local_max_dominant(params, l, k);
    const int km1 = wrap(k - 1, n);
    const int kp1 = wrap(k + 1, n);
    double log_b = -kInf;
    for (int i = 0; i < n; ++i) {
        if (i == k || i == km1 || i == kp1) continue;
        log_b = logsumexp2(log_b, l[i]);
    }
    SingleSiteTerms t;
    t.a = std::exp(l[km1] - l[k]);
    t.alpha = params.lambdas[k] - params.lambdas[km1];
    t.b = std::exp(l[kp1] - l[k]);
    t.beta = params.lambdas[k] - params.lambdas[kp1];
    t.c = std::exp(log_b - l[k]);
    t.lam = params.lambdas[k];
    return t;
}

} // namespace

namespace {

/// -log of the stick probability, truncated once the closed-form geometric
/// tail of the remaining summands drops below tol.
double single_site_log_deficit(const Params& params, const Config& config, int k,
                               double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const SingleSiteTerms t = single_site_terms(params, config, k);
    const double da = std::exp(-t.alpha);
    const double db = std::exp(-t.beta);
    const double dc = std::exp(-t.lam);
    double ea = t.a, eb = t.b, ec = t.c;
    double log_deficit = 0.0;
    constexpr std::uint64_t kMaxIters = 100'000'000ull;
    for (std::uint64_t n = 0; n < kMaxIters; ++n) {
        log_deficit += std::log1p(ea + eb + ec);
        ea *= da;
        eb *= db;
        ec *= dc;
        const double tail = ea / (1.0 - da) + eb / (1.0 - db) + ec / (1.0 - dc);
        if (tail < tol) {
            return log_deficit;
        }
    }
    throw std::runtime_error("single_site_stick_probability: tolerance not reached");
}

} // namespace

double single_site_stick_probability(const Params& params, const Config& config,
                                     int k, double tol) {
    return std::exp(-single_site_log_deficit(params, config, k, tol));
}

double single_site_escape_probability(const Params& params, const Config& config,
                                      int k, double tol) {
    return -std::expm1(-single_site_log_deficit(params, config, k, tol));
}

double escape_bound(const Params& params, const Config& config, int k) {
    const SingleSiteTerms t = single_site_terms(params, config, k);
    return t.a / (1.0 - std::exp(-t.alpha)) + t.b / (1.0 - std::exp(-t.beta)) +
           t.c / (1.0 - std::exp(-t.lam));
}

PairRates pair_rates(const Params& params, const Config& config, int k) {
    const int n = params.n_sites();
    const int kp1 = wrap(k + 1, n);
    const int km1 = wrap(k - 1, n);
    const int kp2 = wrap(k + 2, n);
    if (params.lambdas[k] != params.lambdas[kp1]) {
        throw std::invalid_argument("pair_rates requires lambda_k == lambda_{k+1}");
    }
    const std::vector<double> l = log_rates(params, config);
    const double pair_lse = logsumexp2(l[k], l[kp1]);
    double log_tilde = -kInf;
    for (int i = 0; i < n; ++i) {
        if (i == k || i == kp1 || i == km1 || i == kp2) continue;
        log_tilde = logsumexp2(log_tilde, l[i]);
    }
    PairRates pr;
    pr.log_gamma_k1 = l[km1] - pair_lse;
    pr.log_gamma_k2 = l[kp2] - pair_lse;
    pr.log_gamma_tilde = (log_tilde == -kInf) ? -kInf : log_tilde - pair_lse;
    pr.lambda_prev = params.lambdas[km1];
    pr.lambda = params.lambdas[k];
    pr.lambda_next2 = params.lambdas[kp2];
    pr.r = r_of(config, k);
    pr.p = p_of(pr.lambda, static_cast<double>(pr.r));
    return pr;
}

double w_product_log(const PairRates& rates, std::uint64_t n, RngStream& rng,
                     bool include_tilde) {
    double log_w = 0.0;
    double u = 0.0;
    for (std::uint64_t i = 0; i <= n; ++i) {
        const double di = static_cast<double>(i);
        const double decay = rates.lambda * di;
        const double t1 = rates.log_gamma_k1 + rates.lambda_prev * (di - u) - decay;
        const double t2 = rates.log_gamma_k2 + rates.lambda_next2 * u - decay;
        const double t3 = include_tilde ? rates.log_gamma_tilde - decay : -kInf;
        log_w -= log1p_exp3(t1, t2, t3);
        if (log_w < kLogZero) return kLogZero;
        if (i < n && rng.bernoulli(rates.p)) u += 1.0;
    }
    return log_w;
}

namespace {

void require_pair_dominant(const Params& params, const Config& config, int k) {
    const int n = params.n_sites();
    const int kp1 = wrap(k + 1, n);
    const std::vector<double> l = log_rates(params, config);
    const double pair_max = std::max(l[k], l[kp1]);
    for (int i = 0; i < n; ++i) {
        if (l[i] > pair_max) {
            throw std::invalid_argument("pair {k, k+1} must attain the maximal rate");
        }
    }
}

McEstimate w_product_estimate(const Params& params, const Config& config, int k,
                              std::uint64_t n, std::uint64_t samples, std::uint64_t seed,
                              bool include_tilde) {
    require_pair_dominant(params, config, k);
    const PairRates pr = pair_rates(params, config, k);
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        RngStream rng(seed, s);
        const double v = std::exp(w_product_log(pr, n, rng, include_tilde));
        const double d = v - mean;
        mean += d / static_cast<double>(s + 1);
        m2 += d * (v - mean);
    }
    McEstimate est;
    est.samples = samples;
    est.estimate = mean;
    const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
    est.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(samples));
    return est;
}

} // namespace

McEstimate pair_stick_probability_mc(const Params& params, const Config& config, int k,
                                     std::uint64_t n, std::uint64_t samples,
                                     std::uint64_t seed) {
    return w_product_estimate(params, config, k, n, samples, seed, true);
}

McEstimate pair_stick_upper_bound_mc(const Params& params, const Config& config, int k,
                                     std::uint64_t n, std::uint64_t samples,
                                     std::uint64_t seed) {
    return w_product_estimate(params, config, k, n, samples, seed, false);
}

RelocationResult relocation_stopping_time(const Params& params, const Config& config,
                                          int k, RngStream& rng, std::uint64_t max_iters) {
    const PairRates pr = pair_rates(params, config, k);
    const double drift1 = pr.lambda_prev * (1.0 - pr.p) - pr.lambda;
    const double drift2 = pr.lambda_next2 * pr.p - pr.lambda;
    if (!(drift1 > 0.0) && !(drift2 > 0.0)) {
        throw std::invalid_argument(
            "relocation_stopping_time requires positive drift on one side");
    }
    double s = 0.0;
    for (std::uint64_t n = 0; n < max_iters; ++n) {
        const double dn = static_cast<double>(n);
        const double decay = pr.lambda * dn;
        if (pr.log_gamma_k2 + pr.lambda_next2 * s - decay >= 0.0) {
            return RelocationResult{n, 2};
        }
        if (pr.log_gamma_k1 + pr.lambda_prev * (dn - s) - decay >= 0.0) {
            return RelocationResult{n, 1};
        }
        if (rng.bernoulli(pr.p)) s += 1.0;
    }
    throw std::runtime_error("relocation_stopping_time: max_iters exceeded");
}

} // namespace growthlab
