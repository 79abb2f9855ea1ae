#include "thermoline/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "thermoline/special.hpp"

namespace thermoline::infer {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// Nodes whose density falls below this fraction of the peak are pure
// underflow at double precision; the information stencil treats them as
// carrying no mass.
constexpr double negligible_density = 1e-13;

constexpr double boundary_flag_level = 1e-6;

struct Moments {
    double mass = 0.0;
    double mean = 0.0;
};

// Trapezoid mean of `values` under the grid density, self-normalized so the
// downstream variance decomposition holds to roundoff even when the stored
// normalization is only good to 1e-9.
template <typename ValueAt>
Moments weighted_mean(const PosteriorGrid& g, ValueAt&& value_at) {
    double mass = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double wp = g.trap_weight(i) * g.density(i);
        mass += wp;
        sum += wp * value_at(i);
    }
    if (!(mass > 0.0)) throw std::runtime_error("posterior grid carries no mass");
    return {mass, sum / mass};
}

template <typename ValueAt>
double weighted_square_spread(const PosteriorGrid& g, ValueAt&& value_at, double center) {
    double mass = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double wp = g.trap_weight(i) * g.density(i);
        const double d = value_at(i) - center;
        mass += wp;
        sum += wp * d * d;
    }
    return sum / mass;
}

}  // namespace

double PosteriorGrid::density(std::size_t i) const {
    const double lw = log_weights[i];
    return lw == neg_inf ? 0.0 : std::exp(lw);
}

void PosteriorGrid::normalize() {
    const double m = *std::max_element(log_weights.begin(), log_weights.end());
    if (m == neg_inf) throw std::runtime_error("cannot normalize: all grid weights are zero");
    double z = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        const double lw = log_weights[i];
        if (lw != neg_inf) z += trap_weight(i) * std::exp(lw - m);
    }
    const double shift = m + std::log(z);
    for (double& lw : log_weights)
        if (lw != neg_inf) lw -= shift;
}

PosteriorGrid smoothed_jeffreys_prior(const PriorSpec& spec, const models::SampleModel& model,
                                      int grid_size) {
    if (grid_size < min_grid_size)
        throw std::invalid_argument("grid_size must be at least " + std::to_string(min_grid_size));
    if (!std::isfinite(spec.alpha) || spec.alpha > 700.0)
        throw std::invalid_argument("alpha must be finite and at most 700");

    PosteriorGrid g;
    g.model = model;
    g.domain = spec.domain;
    const double lmin = spec.domain.lambda_min;
    const double width = spec.domain.lambda_width();
    const std::size_t n = static_cast<std::size_t>(grid_size);

    g.lambdas.resize(n);
    g.thetas.resize(n);
    g.log_weights.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g.lambdas[i] = lmin + width * static_cast<double>(i) / static_cast<double>(n - 1);
    g.lambdas.back() = spec.domain.lambda_max;

    g.thetas.front() = spec.domain.theta_min;
    g.thetas.back() = spec.domain.theta_max;
    for (std::size_t i = 1; i + 1 < n; ++i) g.thetas[i] = models::theta_of_lambda(model, g.lambdas[i]);

    // In lambda coordinates the sqrt(h) Jacobian of the Jeffrey's factor is
    // absorbed, so the density is the smoothing profile itself.
    const bool analytic_limit = std::fabs(spec.alpha) < 1e-6;
    const double core = analytic_limit ? 1.0 : special::smoothing_norm_core(spec.alpha);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(n - 1);
        // sin(pi u) = sin(pi (1 - u)), and the folded argument keeps the
        // profile exactly zero at u = 1 (sin(pi * 1.0) rounds to ~1e-16,
        // which would leave the right endpoint alive).
        const double s = std::sin(M_PI * (u <= 0.5 ? u : 1.0 - u));
        const double f = analytic_limit ? 2.0 * s * s / width
                                        : std::expm1(spec.alpha * s * s) / (core * width);
        g.log_weights[i] = f > 0.0 ? std::log(f) : neg_inf;
    }
    g.normalize();
    return g;
}

UpdateResult bayes_update(const PosteriorGrid& post, const meas::MeasurementModel& m, meas::Outcome x) {
    PosteriorGrid next = post;
    double peak = neg_inf;
    for (std::size_t i = 0; i < next.size(); ++i) {
        if (next.log_weights[i] == neg_inf) continue;
        next.log_weights[i] += meas::log_likelihood(m, x, next.thetas[i]);
        peak = std::max(peak, next.log_weights[i]);
    }
    if (peak == neg_inf)
        throw std::runtime_error("bayes update: outcome value " + std::to_string(x.value) +
                                 " has zero posterior mass everywhere on the grid");
    double z = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i)
        if (next.log_weights[i] != neg_inf) z += next.trap_weight(i) * std::exp(next.log_weights[i] - peak);
    const double log_marginal = peak + std::log(z);
    for (double& lw : next.log_weights)
        if (lw != neg_inf) lw -= log_marginal;
    return {std::move(next), log_marginal};
}

Estimate mmsd_estimate(const PosteriorGrid& post) {
    const auto mom = weighted_mean(post, [&](std::size_t i) { return post.lambdas[i]; });
    return {mom.mean, models::theta_of_lambda(post.model, mom.mean)};
}

double msd(const PosteriorGrid& post, double estimate_lambda) {
    return weighted_square_spread(
        post, [&](std::size_t i) { return post.lambdas[i]; }, estimate_lambda);
}

Estimate mmsle_estimate(const PosteriorGrid& post) {
    const auto mom = weighted_mean(post, [&](std::size_t i) { return std::log(post.thetas[i]); });
    return {mom.mean, std::exp(mom.mean)};
}

double msle(const PosteriorGrid& post, double estimate_log_theta) {
    return weighted_square_spread(
        post, [&](std::size_t i) { return std::log(post.thetas[i]); }, estimate_log_theta);
}

InformationResult bayesian_information(const PosteriorGrid& post) {
    const std::size_t n = post.size();
    const double dl = post.dlam();
    const auto& lw = post.log_weights;

    const double peak = *std::max_element(lw.begin(), lw.end());
    const double cut = peak + std::log(negligible_density);
    auto live = [&](std::size_t i) { return i < n && lw[i] >= cut; };

    InformationResult out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!live(i)) continue;
        const bool lo = i > 0 && live(i - 1);
        const bool hi = live(i + 1);
        double score;
        if (lo && hi)
            score = (lw[i + 1] - lw[i - 1]) / (2.0 * dl);
        else if (hi && live(i + 2))
            // one-sided stencils as differences, so constant input gives 0.
            score = (4.0 * (lw[i + 1] - lw[i]) - (lw[i + 2] - lw[i])) / (2.0 * dl);
        else if (lo && i >= 2 && live(i - 2))
            score = (4.0 * (lw[i] - lw[i - 1]) - (lw[i] - lw[i - 2])) / (2.0 * dl);
        else if (hi)
            score = (lw[i + 1] - lw[i]) / dl;
        else if (lo)
            score = (lw[i] - lw[i - 1]) / dl;
        else
            continue;  // isolated node: no usable stencil
        out.value += post.trap_weight(i) * post.density(i) * score * score;
    }
    const double flag_cut = peak + std::log(boundary_flag_level);
    out.boundary_flagged = lw.front() >= flag_cut || lw.back() >= flag_cut;
    return out;
}

double sample_lambda(const PosteriorGrid& post, double u) {
    const std::size_t n = post.size();
    const double dl = post.dlam();
    // Cumulative trapezoid mass, then invert the piecewise-linear CDF.
    std::vector<double> cdf(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        cdf[i] = cdf[i - 1] + 0.5 * (post.density(i - 1) + post.density(i)) * dl;
    const double total = cdf.back();
    if (!(total > 0.0)) throw std::runtime_error("cannot sample: grid carries no mass");
    const double target = std::clamp(u, 0.0, 1.0) * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.begin()) return post.lambdas.front();
    if (it == cdf.end()) return post.lambdas.back();
    const std::size_t j = static_cast<std::size_t>(it - cdf.begin());
    const double seg = cdf[j] - cdf[j - 1];
    const double frac = seg > 0.0 ? (target - cdf[j - 1]) / seg : 0.0;
    return post.lambdas[j - 1] + frac * dl;
}

double sample_theta(const PosteriorGrid& post, rng::RandomStream& stream) {
    return models::theta_of_lambda(post.model, sample_lambda(post, stream.uniform()));
}

}  // namespace thermoline::infer
