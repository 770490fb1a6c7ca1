#include "growthlab/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace growthlab {

Params make_params(std::vector<double> lambdas) {
    if (lambdas.size() < 4) {
        throw std::invalid_argument("n_sites must be >= 4");
    }
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i])) {
            throw std::invalid_argument("lambdas[" + std::to_string(i + 1) +
                                        "] must be a positive finite real");
        }
    }
    return Params{std::move(lambdas)};
}

std::uint64_t Config::total() const {
    std::uint64_t s = 0;
    for (std::uint64_t c : counts) s += c;
    return s;
}

Config zero_config(int n_sites) {
    return Config{std::vector<std::uint64_t>(static_cast<std::size_t>(n_sites), 0)};
}

Config make_config(std::vector<std::uint64_t> counts, const Params& params) {
    if (counts.size() != params.lambdas.size()) {
        throw std::invalid_argument("x0 length must equal n_sites");
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] >= kCountCap) {
            throw std::invalid_argument("x0[" + std::to_string(i + 1) +
                                        "] exceeds the count cap 2^40");
        }
    }
    return Config{std::move(counts)};
}

std::uint64_t neighborhood_count(const Config& config, int i) {
    const int n = config.n_sites();
    if (i < 0 || i >= n) {
        throw std::out_of_range("site index out of range");
    }
    const int left = (i == 0) ? n - 1 : i - 1;
    const int right = (i == n - 1) ? 0 : i + 1;
    return config.counts[i] + config.counts[left] + config.counts[right];
}

void log_rates_into(const Params& params, const Config& config, std::vector<double>& out) {
    const int n = config.n_sites();
    out.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int left = (i == 0) ? n - 1 : i - 1;
        const int right = (i == n - 1) ? 0 : i + 1;
        const std::uint64_t u = config.counts[i] + config.counts[left] + config.counts[right];
        out[i] = params.lambdas[i] * static_cast<double>(u);
    }
}

std::vector<double> log_rates(const Params& params, const Config& config) {
    std::vector<double> out;
    log_rates_into(params, config, out);
    return out;
}

TransitionDistribution transition_probabilities(const Params& params, const Config& config) {
    std::vector<double> w = log_rates(params, config);
    const int n = static_cast<int>(w.size());
    double m = w[0];
    for (int i = 1; i < n; ++i) m = std::max(m, w[i]);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = std::exp(w[i] - m);
        total += w[i];
    }
    for (int i = 0; i < n; ++i) w[i] /= total;
    return TransitionDistribution{std::move(w)};
}

namespace detail {

int sample_site(const Params& params, const Config& config, RngStream& rng,
                std::vector<double>& cum) {
    const int n = config.n_sites();
    cum.resize(static_cast<std::size_t>(n));
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const int left = (i == 0) ? n - 1 : i - 1;
        const int right = (i == n - 1) ? 0 : i + 1;
        const std::uint64_t u = config.counts[i] + config.counts[left] + config.counts[right];
        const double l = params.lambdas[i] * static_cast<double>(u);
        cum[i] = l;
        if (l > m) m = l;
    }
    double running = 0.0;
    for (int i = 0; i < n; ++i) {
        running += std::exp(cum[i] - m);
        cum[i] = running;
    }
    // t < running(total) since the uniform is < 1, so the scan always hits.
    const double t = rng.next_double() * running;
    for (int i = 0; i < n; ++i) {
        if (t < cum[i]) return i;
    }
    return n - 1;
}

} // namespace detail

StepResult step(const Params& params, Config& config, RngStream& rng) {
    std::vector<double> scratch;
    const int site = detail::sample_site(params, config, rng, scratch);
    if (config.counts[site] + 1 >= kCountCap) {
        return StepResult{site, true};
    }
    ++config.counts[site];
    return StepResult{site, false};
}

TrajectorySummary simulate(const Params& params, const Config& x0, std::uint64_t n_steps,
                           RngStream& rng, const StepObserver& observer) {
    TrajectorySummary out;
    out.final_config = x0;
    std::vector<double> scratch;
    for (std::uint64_t s = 0; s < n_steps; ++s) {
        const int site = detail::sample_site(params, out.final_config, rng, scratch);
        if (out.final_config.counts[site] + 1 >= kCountCap) {
            out.overflow = true;
            out.overflow_site = site;
            return out;
        }
        ++out.final_config.counts[site];
        ++out.steps_executed;
        if (observer && !observer(s + 1, site, out.final_config)) {
            out.stopped_by_observer = true;
            return out;
        }
    }
    return out;
}

} // namespace growthlab
