#pragma once

#include <cstddef>
#include <vector>

#include "thermoline/measurement.hpp"
#include "thermoline/random.hpp"
#include "thermoline/sample_models.hpp"

// Grid Bayesian inference in the flat lambda coordinate. The grid is
// uniform in lambda (where the reference metric is unity, so uniform nodes
// give equal geodesic resolution everywhere), densities live in log space,
// and all integrals are trapezoid sums on that grid.

namespace thermoline::infer {

inline constexpr int default_grid_size = 2048;
inline constexpr int min_grid_size = 512;

// Immutable once built; updates return a new grid.
struct PosteriorGrid {
    models::SampleModel model;  // fixes the lambda <-> theta map
    models::TemperatureDomain domain;
    std::vector<double> lambdas;      // uniform nodes spanning [lambda_min, lambda_max]
    std::vector<double> thetas;       // cached theta(lambda)
    std::vector<double> log_weights;  // log density; trapezoid-normalized

    std::size_t size() const { return lambdas.size(); }
    double dlam() const { return (domain.lambda_max - domain.lambda_min) / (lambdas.size() - 1); }
    // Trapezoid weight of node i (dlam, halved at the two ends).
    double trap_weight(std::size_t i) const {
        return (i == 0 || i + 1 == lambdas.size()) ? 0.5 * dlam() : dlam();
    }
    double density(std::size_t i) const;

    // Renormalizes log_weights so the trapezoid integral of the density is
    // one. Throws if every node carries zero mass.
    void normalize();
};

struct PriorSpec {
    double alpha = 0.0;  // smoothing parameter; -inf limit is uniform in lambda
    models::TemperatureDomain domain;
};

// Smoothed family of priors, as a density over lambda:
//   f(u) = expm1(alpha sin^2(pi u)) / N,  u = (lambda-lambda_min)/width,
// with N = width (exp(alpha/2) I0(alpha/2) - 1). alpha -> -inf flattens
// toward the (Jeffrey's) uniform-in-lambda density; |alpha| < 1e-6 switches
// to the analytic limit f = 2 sin^2(pi u)/width where the ratio is 0/0.
// alpha must stay below ~700 so expm1 cannot overflow.
PosteriorGrid smoothed_jeffreys_prior(const PriorSpec& spec, const models::SampleModel& model,
                                      int grid_size = default_grid_size);

struct UpdateResult {
    PosteriorGrid posterior;
    double log_marginal;  // log p(x) relative to the grid measure
};

// One Bayes step: adds the log-likelihood at each node and renormalizes.
UpdateResult bayes_update(const PosteriorGrid& post, const meas::MeasurementModel& m, meas::Outcome x);

struct Estimate {
    double lambda_bar = 0.0;
    double theta_bar = 0.0;
};

// Posterior mean of lambda and its temperature image; the minimizer of the
// mean-square geodesic distance under the grid's reference metric.
Estimate mmsd_estimate(const PosteriorGrid& post);

// Mean-square distance of a candidate estimate:
//   msd(l) = integral p(lambda) (lambda - l)^2 dlambda.
double msd(const PosteriorGrid& post, double estimate_lambda);

// Same machinery under the logarithmic (ideal-reservoir) metric, evaluated
// on this grid's theta nodes: estimator is the posterior mean of log theta.
Estimate mmsle_estimate(const PosteriorGrid& post);
double msle(const PosteriorGrid& post, double estimate_log_theta);

struct InformationResult {
    double value = 0.0;
    // Set when density at an outermost node exceeds 1e-6 of the peak: the
    // vanishing-boundary assumption behind the Bayesian bounds is then
    // violated and the value should be read with care.
    bool boundary_flagged = false;
};

// Bayesian information Q = integral p (d log p / d lambda)^2 dlambda.
// Central differences of the log density inside, second-order one-sided at
// the edges; nodes whose density is below 1e-13 of the peak carry no mass
// at double precision and are excluded, with the difference stencil
// one-sided away from them (the prior family is exactly zero at the domain
// ends, where a naive central stencil would blow up on log 0).
InformationResult bayesian_information(const PosteriorGrid& post);

// Inverse-CDF draw of a lambda position from the grid density (linear
// interpolation between nodes); u is a uniform variate in [0, 1).
double sample_lambda(const PosteriorGrid& post, double u);

// Convenience: temperature of a prior draw through the grid's lambda map.
double sample_theta(const PosteriorGrid& post, rng::RandomStream& stream);

}  // namespace thermoline::infer
