#pragma once

#include <cstdint>

#include "thermoline/inference.hpp"
#include "thermoline/measurement.hpp"
#include "thermoline/sample_models.hpp"

// The Cramér-Rao bound family on the mean-square geodesic distance, all
// expressed in the lambda coordinate of a chosen reference metric:
//
//   ECRB  = (1/nu) integral p(theta) h_ref(theta)/h_meas(theta) dtheta
//   BCRB  = [Q_prior + nu integral p(theta) h_meas(theta)/h_ref(theta) dtheta]^-1
//   TBCRB = E_x[ 1/Q(posterior | x) ]   (Monte Carlo over data records)
//
// with Q the Bayesian information functional and h_meas the single-shot
// Fisher information of the measurement. Jensen's inequality orders them:
// BCRB <= TBCRB <= EMSD.

namespace thermoline::bounds {

struct BoundReport {
    double ecrb = 0.0;
    double bcrb = 0.0;
    double tbcrb = 0.0;
    double q_prior = 0.0;
    double mc_std_error = 0.0;  // standard error of the tbcrb estimate
    bool q_prior_flagged = false;
    bool tbcrb_flagged = false;  // boundary-flagged Q in > 5% of draws
    models::SampleModel reference;
    meas::MeasurementModel measurement;
    int repetitions = 0;
};

// Prior-averaged local bound for nu repetitions. When the reference metric
// is the measurement's own probe family (same kind and gap), the ratio
// h_ref/h_meas is the constant 1/mu and the value 1/(nu mu) is returned
// exactly, with no quadrature.
double ecrb(const infer::PosteriorGrid& prior, const models::SampleModel& reference,
            const meas::MeasurementModel& m, int nu);

// Bayesian information of the initial prior.
infer::InformationResult q_prior(const infer::PosteriorGrid& prior);

// Van Trees bound; nu = 0 degenerates to 1/Q_prior.
double bcrb(const infer::PosteriorGrid& prior, const models::SampleModel& reference,
            const meas::MeasurementModel& m, int nu);

struct TbcrbResult {
    double value = 0.0;
    double std_error = 0.0;
    bool boundary_warning = false;
};

// Monte Carlo tightened bound: n_mc draws of (theta* from the prior, nu
// outcomes at theta*), averaging the inverse posterior information. Draw
// streams derive from `seed` by index and the reduction runs in index
// order, so the result is deterministic for any thread count.
TbcrbResult tbcrb(const infer::PosteriorGrid& prior, const meas::MeasurementModel& m, int nu,
                  int n_mc, std::uint64_t seed, int threads = 0);

inline constexpr int default_tbcrb_draws = 250;

BoundReport report(const infer::PosteriorGrid& prior, const models::SampleModel& reference,
                   const meas::MeasurementModel& m, int nu, int n_mc, std::uint64_t seed,
                   int threads = 0);

}  // namespace thermoline::bounds
