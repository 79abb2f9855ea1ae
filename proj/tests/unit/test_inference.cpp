#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "support/oracles.hpp"
#include "thermoline/inference.hpp"
#include "thermoline/measurement.hpp"
#include "thermoline/random.hpp"
#include "thermoline/special.hpp"

using namespace thermoline;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

const models::SampleModel spin = models::SampleModel::spin_half(1.0);
const models::SampleModel reservoir = models::SampleModel::ideal_reservoir(1.0);
const models::TemperatureDomain spin_domain(spin, 0.1, 5.0);

double trapezoid_mass(const infer::PosteriorGrid& g) {
    double mass = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) mass += g.trap_weight(i) * g.density(i);
    return mass;
}

// Grid with caller-chosen log density, for exercising the estimators and the
// information functional on distributions with known closed-form answers.
infer::PosteriorGrid manual_grid(const models::SampleModel& model,
                                 const models::TemperatureDomain& dom, int n,
                                 const std::function<double(double)>& log_density) {
    infer::PosteriorGrid g;
    g.model = model;
    g.domain = dom;
    g.lambdas.resize(n);
    g.thetas.resize(n);
    g.log_weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        g.lambdas[i] = dom.lambda_min + t * dom.lambda_width();
        g.thetas[i] = models::theta_of_lambda(model, g.lambdas[i]);
        g.log_weights[i] = log_density(g.lambdas[i]);
    }
    g.lambdas.back() = dom.lambda_max;
    g.thetas.front() = dom.theta_min;
    g.thetas.back() = dom.theta_max;
    g.normalize();
    return g;
}

}  // namespace

TEST_CASE("prior grids are trapezoid-normalized") {
    for (double alpha : {-400.0, -50.0, -2.5, 0.0, 5.0, 300.0}) {
        for (int n : {512, 2048}) {
            const auto g = infer::smoothed_jeffreys_prior({alpha, spin_domain}, spin, n);
            CAPTURE(alpha);
            CAPTURE(n);
            REQUIRE(trapezoid_mass(g) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("prior grid endpoints are the cached domain endpoints") {
    const auto g = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin);
    CHECK(g.lambdas.front() == spin_domain.lambda_min);
    CHECK(g.lambdas.back() == spin_domain.lambda_max);
    CHECK(g.thetas.front() == spin_domain.theta_min);
    CHECK(g.thetas.back() == spin_domain.theta_max);
    CHECK(g.size() == infer::default_grid_size);
}

TEST_CASE("every finite-alpha prior vanishes exactly at the domain ends") {
    for (double alpha : {-400.0, -1.0, 0.0, 300.0}) {
        const auto g = infer::smoothed_jeffreys_prior({alpha, spin_domain}, spin);
        CHECK(g.density(0) == 0.0);
        CHECK(g.density(g.size() - 1) == 0.0);
    }
}

TEST_CASE("alpha = 0 takes the analytic sine-squared limit") {
    const auto g = infer::smoothed_jeffreys_prior({0.0, spin_domain}, spin);
    const double w = spin_domain.lambda_width();
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        const double u = (g.lambdas[i] - spin_domain.lambda_min) / w;
        const double s = std::sin(M_PI * u);
        REQUIRE(g.density(i) == doctest::Approx(2.0 * s * s / w).epsilon(1e-12));
    }
}

TEST_CASE("large negative alpha flattens the bulk toward uniform") {
    const auto g = infer::smoothed_jeffreys_prior({-50.0, spin_domain}, spin);
    const double w = spin_domain.lambda_width();
    // Away from the ramps at the ends, the profile sits at -1/core(-50)
    // times uniform, an offset of about 8.7e-2 that no finite alpha can
    // remove because the density still has to vanish at the ends.
    double lo = inf, hi = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double u = (g.lambdas[i] - spin_domain.lambda_min) / w;
        if (u < 0.15 || u > 0.85) continue;
        const double dev = std::fabs(g.density(i) * w - 1.0);
        lo = std::min(lo, dev);
        hi = std::max(hi, dev);
    }
    CHECK(lo > 0.085);
    CHECK(hi < 0.090);
}

TEST_CASE("prior construction rejects bad arguments") {
    CHECK_THROWS_AS(infer::smoothed_jeffreys_prior({0.0, spin_domain}, spin, 511),
                    std::invalid_argument);
    CHECK_THROWS_AS(infer::smoothed_jeffreys_prior({701.0, spin_domain}, spin),
                    std::invalid_argument);
    CHECK_THROWS_AS(infer::smoothed_jeffreys_prior({inf, spin_domain}, spin),
                    std::invalid_argument);
    CHECK_THROWS_AS(infer::smoothed_jeffreys_prior({std::nan(""), spin_domain}, spin),
                    std::invalid_argument);
}

TEST_CASE("a zero-size batch is a no-op update") {
    const auto prior = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin);
    const auto m0 = meas::MeasurementModel::spin_energy(1.0, 0);
    const auto res = infer::bayes_update(prior, m0, {0});
    CHECK(std::fabs(res.log_marginal) < 1e-12);
    for (std::size_t i = 0; i < prior.size(); ++i)
        REQUIRE(res.posterior.density(i) == doctest::Approx(prior.density(i)).epsilon(1e-12));
}

TEST_CASE("updates commute and dead nodes stay dead") {
    const auto prior = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin);
    const auto m = meas::MeasurementModel::spin_energy(1.0, 1);
    const std::vector<int> seq_a = {1, 0, 1};
    const std::vector<int> seq_b = {0, 1, 1};

    auto run = [&](const std::vector<int>& seq) {
        infer::PosteriorGrid post = prior;
        double log_evidence = 0.0;
        for (int k : seq) {
            auto r = infer::bayes_update(post, m, {k});
            post = std::move(r.posterior);
            log_evidence += r.log_marginal;
        }
        return std::pair{std::move(post), log_evidence};
    };

    const auto [pa, ea] = run(seq_a);
    const auto [pb, eb] = run(seq_b);
    CHECK(ea == doctest::Approx(eb).epsilon(1e-10));
    CHECK(pa.density(0) == 0.0);
    CHECK(pa.density(pa.size() - 1) == 0.0);
    for (std::size_t i = 0; i < pa.size(); ++i)
        REQUIRE(pa.density(i) == doctest::Approx(pb.density(i)).epsilon(1e-12));
}

TEST_CASE("log marginal equals the prior-weighted likelihood mass") {
    const auto prior = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin);
    const auto m = meas::MeasurementModel::spin_energy(1.0, 5);
    for (int k : {0, 2, 5}) {
        double z = 0.0;
        for (std::size_t i = 0; i < prior.size(); ++i)
            z += prior.trap_weight(i) * prior.density(i) *
                 std::exp(meas::log_likelihood(m, {k}, prior.thetas[i]));
        const auto res = infer::bayes_update(prior, m, {k});
        REQUIRE(res.log_marginal == doctest::Approx(std::log(z)).epsilon(1e-12));
    }
}

TEST_CASE("grids with no mass anywhere are rejected") {
    auto dead = manual_grid(spin, spin_domain, 600, [](double) { return 0.0; });
    for (double& lw : dead.log_weights) lw = -inf;
    CHECK_THROWS_AS(dead.normalize(), std::runtime_error);
    const auto m = meas::MeasurementModel::spin_energy(1.0, 1);
    CHECK_THROWS_AS(infer::bayes_update(dead, m, {0}), std::runtime_error);
}

TEST_CASE("posterior concentrates on the true temperature") {
    const double theta_true = 1.0;
    const auto m = meas::MeasurementModel::spin_energy(1.0, 1);
    auto post = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin);
    rng::RandomStream stream(777);
    const int nu = 10000;
    for (int i = 0; i < nu; ++i)
        post = infer::bayes_update(post, m, meas::sample_outcome(m, theta_true, stream)).posterior;

    // per-shot information in lambda units: divide the theta-space Fisher
    // information by the metric (dlambda/dtheta)^2 = qfi
    const double fi_lambda =
        meas::fisher_information(m, theta_true) / models::qfi(spin, theta_true);
    const double sigma_lambda = 1.0 / std::sqrt(nu * fi_lambda);
    const auto est = infer::mmsd_estimate(post);
    CHECK(std::fabs(est.lambda_bar - models::lambda_of_theta(spin, theta_true)) <
          5.0 * sigma_lambda);
    const double v = infer::msd(post, est.lambda_bar);
    CHECK(v > 0.3 * sigma_lambda * sigma_lambda);
    CHECK(v < 3.0 * sigma_lambda * sigma_lambda);
}

TEST_CASE("uniform density has the textbook mean and spread") {
    const auto g = manual_grid(spin, spin_domain, 2048, [](double) { return 0.0; });
    const double w = spin_domain.lambda_width();
    const double center = 0.5 * (spin_domain.lambda_min + spin_domain.lambda_max);
    const auto est = infer::mmsd_estimate(g);
    CHECK(est.lambda_bar == doctest::Approx(center).epsilon(1e-12));
    CHECK(est.theta_bar == models::theta_of_lambda(spin, est.lambda_bar));
    CHECK(infer::msd(g, est.lambda_bar) == doctest::Approx(w * w / 12.0).epsilon(1e-6));

    const auto q = infer::bayesian_information(g);
    CHECK(q.value == 0.0);
    CHECK(q.boundary_flagged);
}

TEST_CASE("mean-square spread obeys the shift decomposition") {
    const auto prior = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin);
    const auto base = infer::mmsd_estimate(prior).lambda_bar;
    const double msd0 = infer::msd(prior, base);
    rng::RandomStream stream(12);
    for (int i = 0; i < 100; ++i) {
        const double l =
            spin_domain.lambda_min + stream.uniform() * spin_domain.lambda_width();
        const double expect = msd0 + (l - base) * (l - base);
        REQUIRE(infer::msd(prior, l) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("a point mass estimates itself with zero spread") {
    auto g = manual_grid(spin, spin_domain, 600, [](double) { return 0.0; });
    for (double& lw : g.log_weights) lw = -inf;
    g.log_weights[300] = 0.0;
    g.normalize();
    const auto est = infer::mmsd_estimate(g);
    CHECK(est.lambda_bar == doctest::Approx(g.lambdas[300]).epsilon(1e-14));
    CHECK(infer::msd(g, est.lambda_bar) == 0.0);
    // an isolated live node offers no difference stencil
    CHECK(infer::bayesian_information(g).value == 0.0);
}

TEST_CASE("logarithmic and geodesic estimators coincide on the reservoir") {
    // For the ideal reservoir with unit capacity, lambda is exactly log theta,
    // so the two loss geometries are the same coordinate.
    const models::TemperatureDomain dom(reservoir, 0.5, 4.0);
    const auto prior = infer::smoothed_jeffreys_prior({-1.0, dom}, reservoir);
    const auto a = infer::mmsd_estimate(prior);
    const auto b = infer::mmsle_estimate(prior);
    CHECK(b.lambda_bar == doctest::Approx(a.lambda_bar).epsilon(1e-12));
    CHECK(infer::msle(prior, b.lambda_bar) ==
          doctest::Approx(infer::msd(prior, a.lambda_bar)).epsilon(1e-12));
}

TEST_CASE("the estimators differ off the reservoir geometry") {
    const auto prior = infer::smoothed_jeffreys_prior({5.0, spin_domain}, spin);
    const auto a = infer::mmsd_estimate(prior);
    const auto b = infer::mmsle_estimate(prior);
    CHECK(std::fabs(std::log(a.theta_bar) - b.lambda_bar) > 1e-4);
}

TEST_CASE("information of a narrow Gaussian is its inverse variance") {
    const models::TemperatureDomain dom(reservoir, std::exp(-0.5), std::exp(0.5));
    const double sigma = 0.05;
    const auto g = manual_grid(reservoir, dom, 2048,
                               [&](double l) { return -l * l / (2.0 * sigma * sigma); });
    const auto q = infer::bayesian_information(g);
    CHECK_FALSE(q.boundary_flagged);
    CHECK(q.value == doctest::Approx(1.0 / (sigma * sigma)).epsilon(0.01));
}

TEST_CASE("prior information matches its closed-form integrand") {
    // Q(alpha) = alpha^2 pi^2 / (w^2 core) * int_0^1 sin^2(2 pi u)
    //            exp(2 alpha s) / expm1(alpha s) du, s = sin^2(pi u),
    // obtained by differentiating the density profile directly.
    const double w = spin_domain.lambda_width();

    SUBCASE("sine-squared limit") {
        const auto g = infer::smoothed_jeffreys_prior({0.0, spin_domain}, spin);
        const auto q = infer::bayesian_information(g);
        CHECK_FALSE(q.boundary_flagged);
        CHECK(q.value == doctest::Approx(4.0 * M_PI * M_PI / (w * w)).epsilon(0.005));
    }

    SUBCASE("general alpha") {
        const double alpha = -5.0;
        const auto g = infer::smoothed_jeffreys_prior({alpha, spin_domain}, spin, 4096);
        auto integrand = [&](double u) {
            const double s = std::sin(M_PI * u);
            const double d = std::expm1(alpha * s * s);
            if (d == 0.0) return 4.0 / alpha;  // u -> 0 or 1 limit
            const double s2 = std::sin(2.0 * M_PI * u);
            return s2 * s2 * std::exp(2.0 * alpha * s * s) / d;
        };
        const double core = special::smoothing_norm_core(alpha);
        const double expected = alpha * alpha * M_PI * M_PI / (w * w * core) *
                                oracle::simpson(integrand, 0.0, 1.0, 20000);
        const auto q = infer::bayesian_information(g);
        CHECK_FALSE(q.boundary_flagged);
        CHECK(q.value == doctest::Approx(expected).epsilon(0.005));
    }

    SUBCASE("strong smoothing stays finite and unflagged") {
        const auto g = infer::smoothed_jeffreys_prior({-50.0, spin_domain}, spin);
        const auto q = infer::bayesian_information(g);
        CHECK_FALSE(q.boundary_flagged);
        CHECK(q.value > 0.0);
        CHECK(std::isfinite(q.value));
    }
}

TEST_CASE("prior sampling matches the grid distribution") {
    const auto g = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin);
    const std::size_t n = g.size();
    std::vector<double> cdf(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        cdf[i] = cdf[i - 1] + 0.5 * (g.density(i - 1) + g.density(i)) * g.dlam();
    const double total = cdf.back();
    auto cdf_at = [&](double x) {
        const auto it = std::upper_bound(g.lambdas.begin(), g.lambdas.end(), x);
        if (it == g.lambdas.begin()) return 0.0;
        if (it == g.lambdas.end()) return 1.0;
        const std::size_t j = static_cast<std::size_t>(it - g.lambdas.begin());
        const double frac = (x - g.lambdas[j - 1]) / g.dlam();
        return (cdf[j - 1] + frac * (cdf[j] - cdf[j - 1])) / total;
    };

    rng::RandomStream stream(424242);
    const int draws = 10000;
    std::vector<double> xs(draws);
    for (double& x : xs) {
        x = infer::sample_lambda(g, stream.uniform());
        REQUIRE(x >= spin_domain.lambda_min);
        REQUIRE(x <= spin_domain.lambda_max);
    }
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double f = cdf_at(xs[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / draws));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / draws - f));
    }
    // Kolmogorov-Smirnov at significance 1e-3
    CHECK(d < 1.9495 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("temperature draws are the lambda draws mapped through the model") {
    const auto g = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin);
    rng::RandomStream a(7), b(7);
    for (int i = 0; i < 50; ++i) {
        const double theta = infer::sample_theta(g, a);
        const double lambda = infer::sample_lambda(g, b.uniform());
        REQUIRE(theta == models::theta_of_lambda(spin, lambda));
    }
}

TEST_CASE("normalize is idempotent to roundoff") {
    auto g = infer::smoothed_jeffreys_prior({-2.5, spin_domain}, spin);
    const auto before = g.log_weights;
    g.normalize();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (before[i] == -inf)
            REQUIRE(g.log_weights[i] == -inf);
        else
            REQUIRE(g.log_weights[i] == doctest::Approx(before[i]).epsilon(1e-14));
    }
}
