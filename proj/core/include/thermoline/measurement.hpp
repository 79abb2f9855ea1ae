#pragma once

#include "thermoline/random.hpp"
#include "thermoline/sample_models.hpp"

// Projective energy-measurement likelihoods for thermal probes.
//
// SpinEnergy measures a batch of mu identical two-level probes with gap
// `probe_gap`; since the spins are i.i.d. the excited count k in [0, mu] is
// a sufficient statistic, so the outcome is binomial with excited-state
// population p_e = 1/(1 + exp(gap/theta)).
//
// BosonOccupation measures the occupation n of a single mode, a geometric
// distribution renormalized over [0, occupation_cutoff].

namespace thermoline::meas {

enum class ProbeKind { spin_energy, boson_occupation };

struct Outcome {
    int value = 0;
};

struct MeasurementModel {
    ProbeKind kind = ProbeKind::spin_energy;
    double probe_gap = 1.0;
    int batch_size = 1;         // mu, spin_energy only
    int occupation_cutoff = 1;  // n_max, boson_occupation only

    // batch_size 0 is allowed as a documented degenerate probe: its
    // likelihood is identically 1, which turns a Bayes update into the
    // identity (handy as a no-information control).
    static MeasurementModel spin_energy(double gap, int batch_size = 1);
    static MeasurementModel boson_occupation(double gap, int cutoff);
    // Cutoff ceil(40 theta_max / gap): truncated tail below 1e-12 at the
    // hottest domain temperature.
    static MeasurementModel boson_occupation(double gap, const models::TemperatureDomain& domain);

    int outcome_count() const;  // number of admissible outcome values
};

// Untruncated mass above the cutoff at this temperature; used to validate
// a cutoff against a domain.
double truncation_tail(const MeasurementModel& m, double theta);

// Log P(x | theta), floored at log_likelihood_floor so that zero-probability
// edge cases stay finite in log-weight arithmetic.
inline constexpr double log_likelihood_floor = -745.0;
double log_likelihood(const MeasurementModel& m, Outcome x, double theta);

Outcome sample_outcome(const MeasurementModel& m, double theta, rng::RandomStream& stream);

// Fisher information of one measurement at theta.
//   spin_energy:      mu * qfi(spin_half with probe_gap)   (exact identity)
//   boson_occupation: exhaustive-sum FI over [0, n_max]; equals the boson
//                     QFI up to the truncation tail (< 1e-9 for a cutoff
//                     validated against the working domain).
double fisher_information(const MeasurementModel& m, double theta);

// True only for likelihoods of the scale-invariant form g(x/theta) dx; both
// discrete probes here depend on gap/theta rather than x/theta, so this
// always returns false. It exists to document when the logarithmic error
// metric is exactly the right loss (continuous constant-density-of-states
// likelihoods), which none of the shipped models realize.
bool scale_invariance_check(const MeasurementModel& m, double theta, double scale);

}  // namespace thermoline::meas
