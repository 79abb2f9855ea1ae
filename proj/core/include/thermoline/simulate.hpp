#pragma once

#include <cstdint>
#include <vector>

#include "thermoline/bounds.hpp"
#include "thermoline/inference.hpp"
#include "thermoline/measurement.hpp"

// Monte Carlo experiment engine: single stochastic trajectories, ensembles
// averaged over prior-drawn true temperatures, and the greedy adaptive
// protocol that retunes the probe gap before every repetition.

namespace thermoline::sim {

struct TrajectoryRecord {
    double true_theta = 0.0;
    std::uint64_t seed = 0;
    std::vector<int> outcomes;           // one entry per repetition
    std::vector<double> gaps;            // probe gap used at each repetition
    std::vector<double> estimates_msd;   // temperature estimate after each update
    std::vector<double> estimates_msle;  // logarithmic-metric estimate after each update
    std::vector<double> msd_curve;       // posterior mean-square distance per step
    std::vector<double> msle_curve;      // logarithmic counterpart
};

struct EnsembleSummary {
    std::vector<int> nu_grid;
    std::vector<double> emsd;   // mean msd across trajectories, per nu
    std::vector<double> emsle;  // mean msle across trajectories, per nu
    std::vector<double> ecrb;   // companion reference curves, per nu
    std::vector<double> bcrb;
    int n_traj = 0;
    std::uint64_t master_seed = 0;
};

enum class AdaptiveObjective { bcrb };

struct AdaptivePolicy {
    std::vector<double> gap_candidates;  // strictly increasing, positive
    AdaptiveObjective objective = AdaptiveObjective::bcrb;
    models::SampleModel reference;  // must be an ideal reservoir
};

// 30 log-spaced repetition counts from 1 to 10^4, deduplicated.
std::vector<int> default_nu_grid();

// 64 log-spaced gap candidates spanning [theta_min/10, 10 theta_max].
std::vector<double> default_gap_candidates(const models::TemperatureDomain& domain);

// Index of the candidate minimizing the one-shot BCRB, i.e. maximizing the
// posterior-expected information gain. First maximum wins, which on an
// ascending candidate grid breaks ties toward the smallest gap.
std::size_t pick_gap_index(const std::vector<double>& expected_info);

// One stochastic run at a fixed true temperature: nu outcome draws, one
// Bayes update each, estimates and error measures recorded after every
// update. Fully deterministic given `seed`.
TrajectoryRecord run_trajectory(const infer::PosteriorGrid& prior, const meas::MeasurementModel& m,
                                int nu, double true_theta, std::uint64_t seed);

// Ensemble of n_traj trajectories with true temperatures drawn from the
// prior (inverse-CDF on the lambda grid). Trajectory `t` owns the stream
// seeded by derive_stream_seed(master_seed, t); its first variate draws
// theta_true and the rest drive the outcomes. Trajectories run in parallel
// and reduce in index order, so the summary is identical for any thread
// count. ECRB/BCRB companion curves are attached for the grid's own
// reference metric.
EnsembleSummary run_ensemble(const infer::PosteriorGrid& prior, const meas::MeasurementModel& m,
                             const std::vector<int>& nu_grid, int n_traj, std::uint64_t master_seed,
                             int threads = 0);

// Greedy adaptive protocol (reservoir-referenced thermometry): before each
// one-shot spin measurement, pick the candidate gap minimizing the BCRB of
// the current posterior, measure, update. Checkpoints are the default nu
// grid clipped to nu. With a single candidate this is exactly run_ensemble
// at that fixed gap (same code path, same stream consumption). Companion
// ECRB/BCRB curves are evaluated at the gap that is optimal under the
// initial prior, since the protocol has no single fixed gap.
EnsembleSummary run_adaptive(const infer::PosteriorGrid& prior, const AdaptivePolicy& policy, int nu,
                             int n_traj, std::uint64_t master_seed, int threads = 0);

}  // namespace thermoline::sim
