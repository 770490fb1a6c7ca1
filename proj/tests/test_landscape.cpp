#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "growthlab/landscape.hpp"
#include "growthlab/rng.hpp"

using namespace growthlab;

namespace {

const SiteFeature& feature_at(const LandscapeReport& report, int site) {
    const SiteFeature* f = report.feature_covering(site);
    REQUIRE(f != nullptr);
    return *f;
}

} // namespace

TEST_CASE("classify: mixed five-site landscape") {
    const Params p = make_params({1.0, 2.0, 1.5, 2.5, 0.5});
    const LandscapeReport report = classify(p);
    CHECK(feature_at(report, 0).kind == FeatureKind::GrowthPoint);   // 0.5 < 1.0 < 2.0
    CHECK(feature_at(report, 1).kind == FeatureKind::LocalMaximum);  // site 2
    CHECK(feature_at(report, 2).kind == FeatureKind::LocalMinimum);  // 2.0 > 1.5 < 2.5
    CHECK(feature_at(report, 3).kind == FeatureKind::LocalMaximum);  // site 4
    CHECK(feature_at(report, 4).kind == FeatureKind::LocalMinimum);  // 0.5 < min(2.5, 1.0)
    CHECK(report.is_local_maximum(1));
    CHECK(report.is_local_maximum(3));
    CHECK_FALSE(report.is_local_maximum(0));
}

TEST_CASE("classify: equal pairs") {
    SUBCASE("size-2 minimum of type 2 at the boundary") {
        const Params p = make_params({2.0, 1.0, 1.0, 2.0});
        const LandscapeReport report = classify(p);
        const SiteFeature& pair = feature_at(report, 1);
        CHECK(pair.kind == FeatureKind::LocalMinimumSize2);
        CHECK(pair.sites == std::vector<int>{1, 2});
        REQUIRE(pair.min2_type.has_value());
        CHECK(*pair.min2_type == PairType::Type2); // threshold 4/4 = 1, lambda = 1 <= 1
        // The wrapped pair {4,1} sits above both outer neighbours.
        const SiteFeature& top = feature_at(report, 3);
        CHECK(top.kind == FeatureKind::LocalMaximumSize2);
        CHECK((top.sites == std::vector<int>{3, 0}));
    }
    SUBCASE("saddle") {
        const Params p = make_params({0.5, 1.0, 1.0, 2.0, 0.7});
        const SiteFeature& pair = feature_at(classify(p), 1);
        CHECK(pair.kind == FeatureKind::SaddlePoint);
        REQUIRE(pair.z2.has_value());
        CHECK(*pair.z2 == doctest::Approx(0.0));
        CHECK_FALSE(pair.z1.has_value()); // lambda_{k-1} = 0.5 < 1
    }
    SUBCASE("flat cycle is one plateau") {
        const Params p = make_params({1.0, 1.0, 1.0, 1.0});
        const LandscapeReport report = classify(p);
        REQUIRE(report.features.size() == 1);
        CHECK(report.features[0].kind == FeatureKind::Plateau);
        CHECK(report.features[0].sites.size() == 4);
    }
    SUBCASE("interior plateau of length 3") {
        const Params p = make_params({2.0, 1.0, 1.0, 1.0, 3.0});
        const LandscapeReport report = classify(p);
        const SiteFeature& plateau = feature_at(report, 2);
        CHECK(plateau.kind == FeatureKind::Plateau);
        CHECK(plateau.sites.size() == 3);
    }
}

TEST_CASE("classify is total: every site covered exactly once") {
    RngStream rng(314, 0);
    const double pool[4] = {0.5, 1.0, 1.5, 2.5};
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_u64() % 6);
        std::vector<double> lambdas(n);
        for (double& v : lambdas) v = pool[rng.next_u64() % 4]; // ties are frequent
        const LandscapeReport report = classify(make_params(lambdas));
        std::multiset<int> covered;
        for (const auto& f : report.features) covered.insert(f.sites.begin(), f.sites.end());
        CHECK(covered.size() == static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) CHECK(covered.count(i) == 1);
        // The cycle is finite, so its global maximum lives in a max-like feature.
        const int arg = static_cast<int>(
            std::max_element(lambdas.begin(), lambdas.end()) - lambdas.begin());
        const FeatureKind kind = feature_at(report, arg).kind;
        const bool max_like = kind == FeatureKind::LocalMaximum ||
                              kind == FeatureKind::LocalMaximumSize2 ||
                              kind == FeatureKind::Plateau;
        CHECK(max_like);
    }
}

TEST_CASE("classify: mirror symmetry") {
    RngStream rng(2718, 0);
    const double pool[4] = {0.5, 1.0, 1.5, 2.5};
    auto mirrored_sites = [](const std::vector<int>& sites, int n) {
        std::vector<int> out;
        out.reserve(sites.size());
        for (int s : sites) out.push_back((n - 1 - s) % n);
        std::sort(out.begin(), out.end());
        return out;
    };
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_u64() % 5);
        std::vector<double> lambdas(n);
        for (double& v : lambdas) v = pool[rng.next_u64() % 4];
        std::vector<double> reversed(lambdas.rbegin(), lambdas.rend());
        const LandscapeReport a = classify(make_params(lambdas));
        const LandscapeReport b = classify(make_params(reversed));
        using Key = std::tuple<FeatureKind, std::vector<int>, int>;
        std::multiset<Key> ka, kb;
        for (const auto& f : a.features) {
            std::vector<int> sites = mirrored_sites(f.sites, n);
            ka.insert({f.kind, sites, f.min2_type ? static_cast<int>(*f.min2_type) : 0});
        }
        for (const auto& f : b.features) {
            std::vector<int> sites = f.sites;
            std::sort(sites.begin(), sites.end());
            kb.insert({f.kind, sites, f.min2_type ? static_cast<int>(*f.min2_type) : 0});
        }
        CHECK(ka == kb);
    }
}

TEST_CASE("z_values") {
    SUBCASE("forced zeros") {
        CHECK(*z_values(2.0, 1.0, 1.5).first == doctest::Approx(0.0));
        CHECK(*z_values(1.5, 1.0, 2.0).second == doctest::Approx(0.0));
    }
    SUBCASE("frozen evaluation") {
        const auto [z1, z2] = z_values(0.6, 0.5, 1.5);
        CHECK(*z2 == doctest::Approx(-1.3862943611198906).epsilon(1e-14));
        (void)z1;
    }
    SUBCASE("undefined below the threshold") {
        const auto [z1, z2] = z_values(1.0, 1.0, 0.5);
        CHECK_FALSE(z1.has_value()); // lambda_{k-1} = lambda corresponds to z1 = -inf
        CHECK_FALSE(z2.has_value());
    }
    SUBCASE("rejects non-positive inputs") {
        CHECK_THROWS_AS(z_values(0.0, 1.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("pair_type") {
    CHECK(pair_type(3.0, 1.0, 3.0) == PairType::Type2);   // threshold 1.5
    CHECK(pair_type(1.2, 1.0, 1.2) == PairType::Type1);   // threshold 0.6
    CHECK(pair_type(2.0, 1.0, 2.0) == PairType::Type2);   // threshold exactly 1, <=
    CHECK_THROWS_AS(pair_type(1.0, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("r_of") {
    const Params p = make_params({1.0, 1.0, 1.0, 1.0, 1.0});
    CHECK(r_of(zero_config(5), 1) == 0);
    const Config c = make_config({2, 0, 0, 5, 0}, p);
    CHECK(r_of(c, 1) == 3); // x_{k+2} = 5, x_{k-1} = 2
    // Mirror relabeling negates r.
    RngStream rng(11, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 5;
        std::vector<std::uint64_t> counts(n);
        for (auto& v : counts) v = rng.next_u64() % 20;
        std::vector<std::uint64_t> mirrored(counts.rbegin(), counts.rend());
        const int k = static_cast<int>(rng.next_u64() % n);
        const int k_mirror = ((n - 2 - k) % n + n) % n;
        CHECK(r_of(Config{counts}, k) == -r_of(Config{mirrored}, k_mirror));
    }
}

TEST_CASE("p_of") {
    CHECK(p_of(1.0, 0.0) == 0.5);
    CHECK(p_of(1.0, 1.0) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
    double prev = 0.0;
    for (int r = -20; r <= 20; ++r) {
        const double v = p_of(0.7, static_cast<double>(r));
        CHECK(v > prev);
        CHECK(v < 1.0);
        prev = v;
    }
    // Extreme arguments saturate without overflow.
    CHECK(p_of(40.0, 100.0) == 1.0);
    CHECK(p_of(40.0, -100.0) == 0.0);
}

TEST_CASE("z solves the drift-balance equations") {
    RngStream rng(161803, 0);
    for (int trial = 0; trial < 1'000; ++trial) {
        const double lambda = 0.05 + 2.95 * rng.next_double();
        const double left = lambda + 0.01 + 2.99 * rng.next_double();
        const double right = lambda + 0.01 + 2.99 * rng.next_double();
        const auto [z1, z2] = z_values(left, lambda, right);
        REQUIRE(z1.has_value());
        REQUIRE(z2.has_value());
        CHECK(std::abs(left * (1.0 - p_of(lambda, *z1)) - lambda) <= 1e-12);
        CHECK(std::abs(right * p_of(lambda, *z2) - lambda) <= 1e-12);
    }
}

TEST_CASE("proposition P0: (z1 < z2) iff type 1") {
    RngStream rng(271828, 0);
    for (int trial = 0; trial < 10'000; ++trial) {
        const double lambda = 0.05 + 2.95 * rng.next_double();
        const double left = lambda + 0.01 + 2.99 * rng.next_double();
        const double right = lambda + 0.01 + 2.99 * rng.next_double();
        const auto [z1, z2] = z_values(left, lambda, right);
        const bool type1 = pair_type(left, lambda, right) == PairType::Type1;
        CHECK((*z1 < *z2) == type1);
    }
}

TEST_CASE("regime") {
    const Params saddle = make_params({0.5, 1.0, 1.0, 2.0, 0.7});
    SUBCASE("saddle with r < z2 can stick") {
        const Config x = make_config({1, 0, 0, 0, 0}, saddle); // r = -1 < z2 = 0
        const RegimeVerdict v = regime(saddle, x, 1);
        CHECK(v.kind == RegimeKind::PairStickingPossible);
        CHECK(v.clause.find("Lemma 5(2)") != std::string::npos);
        CHECK(v.r == -1);
        CHECK(std::isinf(v.z1));
        CHECK(v.z2 == doctest::Approx(0.0));
    }
    SUBCASE("saddle at r == z2 is critical") {
        const RegimeVerdict v = regime(saddle, zero_config(5), 1); // r = 0 = z2
        CHECK(v.kind == RegimeKind::Critical);
        CHECK(v.clause.find("Corollary") != std::string::npos);
    }
    SUBCASE("saddle with r > z2 cannot stick") {
        const Config x = make_config({0, 2, 0, 1, 0}, saddle); // r = 1 > z2 = 0
        const RegimeVerdict v = regime(saddle, x, 1);
        CHECK(v.kind == RegimeKind::ZeroSticking);
    }
    SUBCASE("type-2 minimum: empty interval, zero sticking everywhere") {
        const Params min2 = make_params({3.0, 1.0, 1.0, 3.0, 2.0});
        const RegimeVerdict v = regime(min2, zero_config(5), 1);
        CHECK(v.kind == RegimeKind::ZeroSticking);
        CHECK(v.z2 <= v.z1); // P0 for type 2
        CHECK(v.clause.find("Lemma 6(3)") != std::string::npos);
    }
    SUBCASE("type-2 boundary (2,1,2): z1 == z2 == 0, r == 0 is critical") {
        const Params boundary = make_params({2.0, 1.0, 1.0, 2.0});
        const RegimeVerdict v = regime(boundary, zero_config(4), 1);
        CHECK(v.kind == RegimeKind::Critical);
    }
    SUBCASE("precondition violations throw") {
        CHECK_THROWS_AS(regime(saddle, zero_config(5), 0), std::invalid_argument);
        const Config x = make_config({0, 0, 0, 9, 0}, saddle); // max rate off the pair
        CHECK_THROWS_AS(regime(saddle, x, 1), std::invalid_argument);
    }
}
