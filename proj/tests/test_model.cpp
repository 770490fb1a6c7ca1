#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "growthlab/model.hpp"
#include "growthlab/rng.hpp"

using namespace growthlab;

namespace {

Params params4(std::initializer_list<double> l) { return make_params(std::vector<double>(l)); }

Config cfg(std::initializer_list<std::uint64_t> c, const Params& p) {
    return make_config(std::vector<std::uint64_t>(c), p);
}

// Reference transition law with raw exponentials in extended precision;
// only valid while the exponents stay representable.
std::vector<double> naive_probs(const Params& p, const Config& c) {
    const int n = p.n_sites();
    std::vector<long double> g(n);
    long double total = 0.0L;
    for (int i = 0; i < n; ++i) {
        g[i] = expl(static_cast<long double>(p.lambdas[i]) *
                    static_cast<long double>(neighborhood_count(c, i)));
        total += g[i];
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = static_cast<double>(g[i] / total);
    return out;
}

} // namespace

TEST_CASE("params validation") {
    CHECK_THROWS_AS(make_params({1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_params({1.0, -1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_params({1.0, 0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK(make_params({1.0, 2.0, 3.0, 4.0}).n_sites() == 4);
}

TEST_CASE("neighborhood_count on the cycle") {
    const Params p = params4({1, 1, 1, 1});
    CHECK(neighborhood_count(zero_config(4), 0) == 0);
    CHECK(neighborhood_count(zero_config(4), 3) == 0);
    const Config c = cfg({1, 0, 0, 0}, p);
    CHECK(neighborhood_count(c, 1) == 1); // x_2 + x_1 + x_3 (1-based)
    CHECK(neighborhood_count(c, 2) == 0); // x_3 + x_2 + x_4
    CHECK(neighborhood_count(c, 0) == 1);
    CHECK(neighborhood_count(c, 3) == 1); // wraps to x_1
    CHECK_THROWS_AS(neighborhood_count(c, 4), std::out_of_range);
    CHECK_THROWS_AS(neighborhood_count(c, -1), std::out_of_range);
}

TEST_CASE("log_rates") {
    SUBCASE("all-zero config gives zero exponents") {
        const Params p = params4({1, 3, 1, 1});
        for (double l : log_rates(p, zero_config(4))) CHECK(l == 0.0);
    }
    SUBCASE("uniform lambdas, one particle") {
        const Params p = params4({1, 1, 1, 1});
        const auto l = log_rates(p, cfg({1, 0, 0, 0}, p));
        CHECK(l == std::vector<double>{1.0, 1.0, 0.0, 1.0});
    }
    SUBCASE("linearity in counts") {
        const Params p = params4({1, 3, 1, 1});
        const auto l = log_rates(p, cfg({0, 50, 0, 0}, p));
        CHECK(l == std::vector<double>{50.0, 150.0, 50.0, 0.0});
    }
}

TEST_CASE("transition probabilities") {
    SUBCASE("all-zero config is uniform") {
        for (int n : {4, 5, 9}) {
            const Params p = make_params(std::vector<double>(n, 1.7));
            const auto t = transition_probabilities(p, zero_config(n));
            for (double v : t.probs) CHECK(v == doctest::Approx(1.0 / n).epsilon(1e-14));
        }
    }
    SUBCASE("uniform lambdas, one particle: e/(3e+1) and 1/(3e+1)") {
        const Params p = params4({1, 1, 1, 1});
        const auto t = transition_probabilities(p, cfg({1, 0, 0, 0}, p));
        CHECK(t.probs[0] == doctest::Approx(0.29692274247565469).epsilon(1e-14));
        CHECK(t.probs[1] == doctest::Approx(0.29692274247565469).epsilon(1e-14));
        CHECK(t.probs[2] == doctest::Approx(0.10923177257303593).epsilon(1e-14));
        CHECK(t.probs[3] == doctest::Approx(0.29692274247565469).epsilon(1e-14));
    }
    SUBCASE("dominant exponent swallows the mass") {
        const Params p = params4({1, 3, 1, 1});
        const auto t = transition_probabilities(p, cfg({0, 50, 0, 0}, p));
        CHECK(t.probs[1] >= 1.0 - 1e-20);
        CHECK(t.probs[3] <= 1e-40);
    }
    SUBCASE("simplex and argmax invariants on random instances") {
        RngStream rng(2024, 0);
        for (int trial = 0; trial < 200; ++trial) {
            const int n = 4 + static_cast<int>(rng.next_u64() % 6);
            std::vector<double> lambdas(n);
            for (double& v : lambdas) v = 0.1 + 3.0 * rng.next_double();
            const Params p = make_params(lambdas);
            Config c = zero_config(n);
            for (auto& v : c.counts) v = rng.next_u64() % 40;
            const auto t = transition_probabilities(p, c);
            double sum = 0.0;
            for (double v : t.probs) {
                CHECK(v >= 0.0);
                sum += v;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
            const auto l = log_rates(p, c);
            const auto arg_l = std::max_element(l.begin(), l.end()) - l.begin();
            const auto arg_p = std::max_element(t.probs.begin(), t.probs.end()) -
                               t.probs.begin();
            CHECK(arg_l == arg_p);
        }
    }
    SUBCASE("exact ties stay tied") {
        const Params p = params4({1, 1, 1, 1});
        const auto t = transition_probabilities(p, cfg({1, 0, 0, 0}, p));
        CHECK(t.probs[0] == t.probs[1]);
        CHECK(t.probs[1] == t.probs[3]);
    }
    SUBCASE("rotation equivariance") {
        RngStream rng(77, 0);
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 5;
            std::vector<double> lambdas(n);
            for (double& v : lambdas) v = 0.2 + 2.0 * rng.next_double();
            std::vector<std::uint64_t> counts(n);
            for (auto& v : counts) v = rng.next_u64() % 30;
            const int s = 1 + static_cast<int>(rng.next_u64() % (n - 1));
            std::vector<double> lam_rot(n);
            std::vector<std::uint64_t> cnt_rot(n);
            for (int i = 0; i < n; ++i) {
                lam_rot[(i + s) % n] = lambdas[i];
                cnt_rot[(i + s) % n] = counts[i];
            }
            const auto base =
                transition_probabilities(make_params(lambdas), Config{counts});
            const auto rot =
                transition_probabilities(make_params(lam_rot), Config{cnt_rot});
            for (int i = 0; i < n; ++i) {
                CHECK(rot.probs[(i + s) % n] ==
                      doctest::Approx(base.probs[i]).epsilon(1e-13));
            }
        }
    }
    SUBCASE("stable softmax agrees with raw exponentials where representable") {
        RngStream rng(5150, 0);
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 4 + static_cast<int>(rng.next_u64() % 4);
            std::vector<double> lambdas(n);
            for (double& v : lambdas) v = 0.1 + 1.5 * rng.next_double();
            const Params p = make_params(lambdas);
            Config c = zero_config(n);
            for (auto& v : c.counts) v = rng.next_u64() % 50;
            const auto fast = transition_probabilities(p, c);
            const auto slow = naive_probs(p, c);
            for (int i = 0; i < n; ++i) {
                CHECK(fast.probs[i] == doctest::Approx(slow[i]).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("step") {
    SUBCASE("deterministic limit picks the dominant site") {
        const Params p = params4({1, 3, 1, 1});
        for (std::uint64_t i = 0; i < 100; ++i) {
            Config c = cfg({0, 50, 0, 0}, p);
            RngStream rng(123, i);
            const StepResult r = step(p, c, rng);
            CHECK(r.site == 1);
            CHECK(c.counts[1] == 51);
        }
    }
    SUBCASE("replay determinism") {
        const Params p = params4({1.0, 2.0, 1.5, 2.5});
        Config c1 = cfg({3, 1, 4, 1}, p);
        Config c2 = c1;
        RngStream a(99, 7), b(99, 7);
        for (int i = 0; i < 200; ++i) {
            CHECK(step(p, c1, a).site == step(p, c2, b).site);
        }
        CHECK(c1.counts == c2.counts);
    }
    SUBCASE("first-step frequencies are uniform within 3 SE") {
        const Params p = params4({1, 1, 1, 1});
        std::uint64_t counts[4] = {0, 0, 0, 0};
        const std::uint64_t trials = 100'000;
        for (std::uint64_t i = 0; i < trials; ++i) {
            Config c = zero_config(4);
            RngStream rng(31337, i);
            ++counts[step(p, c, rng).site];
        }
        const double expected = trials / 4.0;
        const double three_se = 3.0 * std::sqrt(trials * 0.25 * 0.75);
        for (std::uint64_t v : counts) {
            CHECK(std::abs(static_cast<double>(v) - expected) <= three_se);
        }
    }
}

TEST_CASE("simulate") {
    const Params p = params4({1.0, 2.0, 1.5, 2.5});
    SUBCASE("zero steps returns x0 unchanged") {
        const Config x0 = cfg({1, 2, 3, 4}, p);
        RngStream rng(1, 0);
        const auto s = simulate(p, x0, 0, rng);
        CHECK(s.final_config.counts == x0.counts);
        CHECK(s.steps_executed == 0);
    }
    SUBCASE("conservation of total count") {
        const Config x0 = cfg({1, 2, 3, 4}, p);
        RngStream rng(2, 0);
        const auto s = simulate(p, x0, 5'000, rng);
        CHECK(s.final_config.total() == x0.total() + 5'000);
    }
    SUBCASE("bit-identical replay") {
        RngStream a(42, 3), b(42, 3);
        const auto s1 = simulate(p, zero_config(4), 10'000, a);
        const auto s2 = simulate(p, zero_config(4), 10'000, b);
        CHECK(s1.final_config.counts == s2.final_config.counts);
        CHECK(s1.steps_executed == s2.steps_executed);
    }
    SUBCASE("observer can stop the run") {
        RngStream rng(7, 0);
        const auto s = simulate(p, zero_config(4), 10'000, rng,
                                [](std::uint64_t step, int, const Config&) {
                                    return step < 100;
                                });
        CHECK(s.stopped_by_observer);
        CHECK(s.steps_executed == 100);
    }
    SUBCASE("saturation aborts with an overflow verdict") {
        const Params dom = params4({1, 3, 1, 1});
        Config x0 = zero_config(4);
        x0.counts[1] = kCountCap - 2;
        RngStream rng(5, 0);
        const auto s = simulate(dom, x0, 100, rng);
        CHECK(s.overflow);
        CHECK(s.overflow_site == 1);
        CHECK(s.final_config.counts[1] == kCountCap - 1);
    }
}

TEST_CASE("rng streams") {
    SUBCASE("identical key replays identically") {
        RngStream a(9001, 5), b(9001, 5);
        for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    }
    SUBCASE("distinct stream indices diverge") {
        RngStream a(9001, 5), b(9001, 6);
        int equal = 0;
        for (int i = 0; i < 64; ++i) equal += a.next_u64() == b.next_u64();
        CHECK(equal == 0);
    }
    SUBCASE("uniform doubles live in [0,1)") {
        RngStream a(1, 1);
        for (int i = 0; i < 1'000; ++i) {
            const double u = a.next_double();
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
        }
    }
}
