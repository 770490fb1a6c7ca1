#pragma once

#include <optional>
#include <string>
#include <vector>

#include "growthlab/model.hpp"

namespace growthlab {

enum class FeatureKind {
    LocalMaximum,
    LocalMinimum,
    GrowthPoint,
    LocalMinimumSize2,
    SaddlePoint,
    LocalMaximumSize2, // equal-lambda pair above both outer neighbours
    Plateau,           // run of equal lambda, length >= 3
};

enum class PairType { Type1 = 1, Type2 = 2 };

struct SiteFeature {
    FeatureKind kind;
    std::vector<int> sites;            // 0-based, in cyclic order
    std::optional<PairType> min2_type; // set for LocalMinimumSize2
    std::optional<double> z1;          // set for pair features when lambda_{k-1} > lambda
    std::optional<double> z2;          // set for pair features when lambda_{k+2} > lambda
};

struct LandscapeReport {
    int n_sites = 0;
    std::vector<SiteFeature> features;

    bool is_local_maximum(int site) const;
    const SiteFeature* feature_covering(int site) const;
};

/// Labels every site of the cycle. Equality of lambdas is exact: a run of
/// identical values of length >= 3 is a plateau, a run of length 2 is a
/// size-2 minimum / saddle / size-2 maximum depending on the outer
/// neighbours, and isolated sites follow the min/max/growth trichotomy.
LandscapeReport classify(const Params& params);

/// z1 = log((lambda_left - lambda)/lambda)/lambda when lambda_left > lambda;
/// z2 = log(lambda/(lambda_right - lambda))/lambda when lambda_right > lambda.
std::pair<std::optional<double>, std::optional<double>>
z_values(double lambda_left, double lambda, double lambda_right);

/// Type of a size-2 local minimum: Type1 when lambda exceeds the harmonic
/// threshold lambda_l*lambda_r/(lambda_l+lambda_r), Type2 on <=.
PairType pair_type(double lambda_left, double lambda, double lambda_right);

/// r(x) = x_{k+2} - x_{k-1}, cyclic indices around the pair {k, k+1}.
long long r_of(const Config& config, int k);

/// Logistic e^{lambda z}/(1 + e^{lambda z}), evaluated stably.
double p_of(double lambda, double z);

enum class RegimeKind { PairStickingPossible, ZeroSticking, Critical };

struct RegimeVerdict {
    RegimeKind kind;
    std::string clause;  // which lemma clause fired
    double z1;           // -inf when lambda_{k-1} <= lambda
    double z2;           // +inf when lambda_{k+2} <= lambda
    long long r;
    double p;
    bool side_condition_ok; // Gamma_{k-1} <= Gamma_{k+1}, relevant to plateau cases
};

/// Decides the sticking regime of the pair {k, k+1} by comparing r against
/// z1/z2. Requires lambda_k == lambda_{k+1} exactly and the maximal rate on
/// the pair. Exact hits of r on an integer-valued z are flagged Critical.
RegimeVerdict regime(const Params& params, const Config& config, int k);

std::string to_string(FeatureKind kind);
std::string to_string(RegimeKind kind);

} // namespace growthlab
