#include "growthlab/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace growthlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int wrap(int i, int n) { return ((i % n) + n) % n; }

} // namespace

bool LandscapeReport::is_local_maximum(int site) const {
    for (const auto& f : features) {
        if (f.kind == FeatureKind::LocalMaximum && f.sites[0] == site) return true;
    }
    return false;
}

const SiteFeature* LandscapeReport::feature_covering(int site) const {
    for (const auto& f : features) {
        if (std::find(f.sites.begin(), f.sites.end(), site) != f.sites.end()) return &f;
    }
    return nullptr;
}

std::pair<std::optional<double>, std::optional<double>>
z_values(double lambda_left, double lambda, double lambda_right) {
    if (!(lambda_left > 0.0) || !(lambda > 0.0) || !(lambda_right > 0.0)) {
        throw std::invalid_argument("z_values requires positive inputs");
    }
    std::optional<double> z1;
    std::optional<double> z2;
    if (lambda_left > lambda) {
        z1 = std::log((lambda_left - lambda) / lambda) / lambda;
    }
    if (lambda_right > lambda) {
        z2 = std::log(lambda / (lambda_right - lambda)) / lambda;
    }
    return {z1, z2};
}

PairType pair_type(double lambda_left, double lambda, double lambda_right) {
    if (!(lambda < std::min(lambda_left, lambda_right))) {
        throw std::invalid_argument("pair_type requires a size-2 local minimum");
    }
    const double threshold = lambda_left * lambda_right / (lambda_left + lambda_right);
    return lambda > threshold ? PairType::Type1 : PairType::Type2;
}

long long r_of(const Config& config, int k) {
    const int n = config.n_sites();
    const std::uint64_t a = config.counts[wrap(k + 2, n)];
    const std::uint64_t b = config.counts[wrap(k - 1, n)];
    return static_cast<long long>(a) - static_cast<long long>(b);
}

double p_of(double lambda, double z) {
    const double t = lambda * z;
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

namespace {

SiteFeature pair_feature(const Params& params, int k /* first site of the pair */) {
    const int n = params.n_sites();
    const double lam = params.lambdas[k];
    const double left = params.lambdas[wrap(k - 1, n)];
    const double right = params.lambdas[wrap(k + 2, n)];
    SiteFeature f;
    f.sites = {k, wrap(k + 1, n)};
    auto [z1, z2] = z_values(left, lam, right);
    f.z1 = z1;
    f.z2 = z2;
    if (lam < std::min(left, right)) {
        f.kind = FeatureKind::LocalMinimumSize2;
        f.min2_type = pair_type(left, lam, right);
    } else if (lam > std::max(left, right)) {
        f.kind = FeatureKind::LocalMaximumSize2;
    } else {
        f.kind = FeatureKind::SaddlePoint;
    }
    return f;
}

SiteFeature site_feature(const Params& params, int i) {
    const int n = params.n_sites();
    const double lam = params.lambdas[i];
    const double left = params.lambdas[wrap(i - 1, n)];
    const double right = params.lambdas[wrap(i + 1, n)];
    SiteFeature f;
    f.sites = {i};
    if (lam > std::max(left, right)) {
        f.kind = FeatureKind::LocalMaximum;
    } else if (lam < std::min(left, right)) {
        f.kind = FeatureKind::LocalMinimum;
    } else {
        f.kind = FeatureKind::GrowthPoint;
    }
    return f;
}

} // namespace

LandscapeReport classify(const Params& params) {
    const int n = params.n_sites();
    LandscapeReport report;
    report.n_sites = n;

    const bool all_equal =
        std::all_of(params.lambdas.begin(), params.lambdas.end(),
                    [&](double v) { return v == params.lambdas[0]; });
    if (all_equal) {
        SiteFeature f;
        f.kind = FeatureKind::Plateau;
        f.sites.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) f.sites[i] = i;
        report.features.push_back(std::move(f));
        return report;
    }

    // Anchor run detection at a boundary so cyclic runs are maximal.
    int start = 0;
    while (params.lambdas[start] == params.lambdas[wrap(start - 1, n)]) ++start;

    int covered = 0;
    int i = start;
    while (covered < n) {
        int len = 1;
        while (len < n && params.lambdas[wrap(i + len, n)] == params.lambdas[i]) ++len;
        if (len >= 3) {
            SiteFeature f;
            f.kind = FeatureKind::Plateau;
            for (int j = 0; j < len; ++j) f.sites.push_back(wrap(i + j, n));
            report.features.push_back(std::move(f));
        } else if (len == 2) {
            report.features.push_back(pair_feature(params, i));
        } else {
            report.features.push_back(site_feature(params, i));
        }
        covered += len;
        i = wrap(i + len, n);
    }
    return report;
}

RegimeVerdict regime(const Params& params, const Config& config, int k) {
    const int n = params.n_sites();
    const int kp1 = wrap(k + 1, n);
    const int km1 = wrap(k - 1, n);
    const int kp2 = wrap(k + 2, n);
    const double lam = params.lambdas[k];
    if (params.lambdas[kp1] != lam) {
        throw std::invalid_argument("regime requires lambda_k == lambda_{k+1}");
    }
    const std::vector<double> l = log_rates(params, config);
    const double pair_max = std::max(l[k], l[kp1]);
    for (int s = 0; s < n; ++s) {
        if (l[s] > pair_max) {
            throw std::invalid_argument("regime requires the maximal rate on the pair");
        }
    }

    const double left = params.lambdas[km1];
    const double right = params.lambdas[kp2];
    RegimeVerdict v;
    v.r = r_of(config, k);
    v.p = p_of(lam, static_cast<double>(v.r));
    v.z1 = (left > lam) ? std::log((left - lam) / lam) / lam : -kInf;
    v.z2 = (right > lam) ? std::log(lam / (right - lam)) / lam : kInf;
    v.side_condition_ok = l[km1] <= l[kp1];

    const char* shape = nullptr;
    if (left > lam && right > lam) {
        shape = (pair_type(left, lam, right) == PairType::Type1)
                    ? "size-2 minimum type 1"
                    : "size-2 minimum type 2";
    } else if (left < lam && right > lam) {
        shape = "saddle";
    } else if (left > lam && right < lam) {
        shape = "saddle (mirrored)";
    } else if (left == lam && right > lam) {
        shape = "plateau left (Lemma 8)";
    } else if (left > lam && right == lam) {
        shape = "plateau right (Lemma 8 mirrored)";
    } else {
        shape = "pair dominant (Lemma 4)";
    }

    // An exact hit of the integer r on z1/z2 is the Corollary's critical case.
    auto critical_hit = [&](double z) {
        if (!std::isfinite(z)) return false;
        const double r = std::nearbyint(z);
        return std::abs(z - r) < 1e-12 && static_cast<double>(v.r) == r;
    };
    if (critical_hit(v.z1) || critical_hit(v.z2)) {
        v.kind = RegimeKind::Critical;
        v.clause = std::string("Corollary (critical cases): r equals ") +
                   (critical_hit(v.z2) ? "z2" : "z1") + " at a " + shape;
        return v;
    }

    const double r = static_cast<double>(v.r);
    if (v.z1 < r && r < v.z2) {
        v.kind = RegimeKind::PairStickingPossible;
        if (left > lam && right > lam) {
            v.clause = std::string("Lemma 6(2): ") + shape + ", z1 < r < z2";
        } else if (left < lam && right > lam) {
            v.clause = "Lemma 5(2): saddle, r < z2";
        } else if (left > lam && right < lam) {
            v.clause = "Lemma 5(2) mirrored: saddle, r > z1";
        } else if (left == lam && right > lam) {
            v.clause = "Lemma 8(2): r < z2";
        } else if (left > lam && right == lam) {
            v.clause = "Lemma 8(2) mirrored: r > z1";
        } else if (left == lam) {
            v.clause = "Lemma 4(2)";
        } else {
            v.clause = "Lemma 4(1)";
        }
    } else {
        v.kind = RegimeKind::ZeroSticking;
        if (left > lam && right > lam) {
            v.clause = std::string("Lemma 6(3): ") + shape + ", r <= z1 or r >= z2";
        } else if (left <= lam) {
            v.clause = "Lemma 5(3)/8(3): r >= z2";
        } else {
            v.clause = "Lemma 5(3)/8(3) mirrored: r <= z1";
        }
    }
    return v;
}

std::string to_string(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::LocalMaximum: return "local_maximum";
        case FeatureKind::LocalMinimum: return "local_minimum";
        case FeatureKind::GrowthPoint: return "growth_point";
        case FeatureKind::LocalMinimumSize2: return "local_minimum_size2";
        case FeatureKind::SaddlePoint: return "saddle_point";
        case FeatureKind::LocalMaximumSize2: return "local_maximum_size2";
        case FeatureKind::Plateau: return "plateau";
    }
    return "unknown";
}

std::string to_string(RegimeKind kind) {
    switch (kind) {
        case RegimeKind::PairStickingPossible: return "pair_sticking_possible";
        case RegimeKind::ZeroSticking: return "zero_sticking";
        case RegimeKind::Critical: return "critical";
    }
    return "unknown";
}

} // namespace growthlab
