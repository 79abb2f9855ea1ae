#include "thermoline/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "thermoline/parallel.hpp"

namespace thermoline::sim {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

void validate_nu_grid(const std::vector<int>& nu_grid) {
    if (nu_grid.empty()) throw std::invalid_argument("nu_grid must be nonempty");
    int prev = 0;
    for (int nu : nu_grid) {
        if (nu <= prev) throw std::invalid_argument("nu_grid must be strictly increasing and >= 1");
        prev = nu;
    }
}

// Everything a trajectory walk needs, shared across trajectories. The
// fixed-gap engine is the single-candidate special case of the adaptive
// one, which is what makes the two protocols bit-compatible.
struct Engine {
    const infer::PosteriorGrid* prior = nullptr;
    std::vector<meas::MeasurementModel> probes;       // one per gap candidate
    std::vector<std::vector<std::vector<double>>> tables;  // [candidate][outcome][node]
    std::vector<std::vector<double>> info_rows;       // trap_weight * h_meas/h_ref per node
    std::vector<double> log_thetas;

    std::size_t nodes() const { return prior->size(); }
    bool adaptive() const { return probes.size() > 1; }
};

Engine make_engine(const infer::PosteriorGrid& prior, const std::vector<meas::MeasurementModel>& probes,
                   const models::SampleModel* info_reference) {
    Engine e;
    e.prior = &prior;
    e.probes = probes;
    const std::size_t n = prior.size();
    e.log_thetas.resize(n);
    for (std::size_t i = 0; i < n; ++i) e.log_thetas[i] = std::log(prior.thetas[i]);

    e.tables.reserve(probes.size());
    for (const auto& m : probes) {
        std::vector<std::vector<double>> rows(m.outcome_count(), std::vector<double>(n));
        for (int k = 0; k < m.outcome_count(); ++k)
            for (std::size_t i = 0; i < n; ++i)
                rows[k][i] = meas::log_likelihood(m, meas::Outcome{k}, prior.thetas[i]);
        e.tables.push_back(std::move(rows));
    }
    if (info_reference && probes.size() > 1) {
        e.info_rows.reserve(probes.size());
        for (const auto& m : e.probes) {
            std::vector<double> row(n);
            for (std::size_t i = 0; i < n; ++i)
                row[i] = prior.trap_weight(i) * meas::fisher_information(m, prior.thetas[i]) /
                         models::qfi(*info_reference, prior.thetas[i]);
            e.info_rows.push_back(std::move(row));
        }
    }
    return e;
}

struct StepStats {
    double lambda_bar, theta_msd, msd;
    double log_theta_bar, theta_msle, msle;
};

StepStats stats_from_log_weights(const Engine& e, const std::vector<double>& lw) {
    const auto& g = *e.prior;
    const std::size_t n = lw.size();
    const double peak = *std::max_element(lw.begin(), lw.end());
    double mass = 0.0, sum_lam = 0.0, sum_log = 0.0;
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = lw[i] == neg_inf ? 0.0 : std::exp(lw[i] - peak);
        const double wp = g.trap_weight(i) * p[i];
        mass += wp;
        sum_lam += wp * g.lambdas[i];
        sum_log += wp * e.log_thetas[i];
    }
    StepStats s{};
    s.lambda_bar = sum_lam / mass;
    s.log_theta_bar = sum_log / mass;
    double acc_msd = 0.0, acc_msle = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wp = g.trap_weight(i) * p[i];
        const double dl = g.lambdas[i] - s.lambda_bar;
        const double dt = e.log_thetas[i] - s.log_theta_bar;
        acc_msd += wp * dl * dl;
        acc_msle += wp * dt * dt;
    }
    s.msd = acc_msd / mass;
    s.msle = acc_msle / mass;
    s.theta_msd = models::theta_of_lambda(g.model, s.lambda_bar);
    s.theta_msle = std::exp(s.log_theta_bar);
    return s;
}

struct WalkResult {
    std::vector<int> outcomes;
    std::vector<double> gaps;
    std::vector<StepStats> at_checkpoint;
};

// checkpoints must be sorted ascending; the walk runs to the last one.
WalkResult walk(const Engine& e, const std::vector<int>& checkpoints, double theta_true,
                rng::RandomStream& stream) {
    const std::size_t n = e.nodes();
    const int total = checkpoints.empty() ? 0 : checkpoints.back();
    WalkResult r;
    r.outcomes.reserve(total);
    r.gaps.reserve(total);
    r.at_checkpoint.reserve(checkpoints.size());

    std::vector<double> lw = e.prior->log_weights;
    std::vector<double> p;
    std::size_t next_ck = 0;
    while (next_ck < checkpoints.size() && checkpoints[next_ck] == 0) {
        r.at_checkpoint.push_back(stats_from_log_weights(e, lw));
        ++next_ck;
    }
    for (int step = 1; step <= total; ++step) {
        std::size_t c = 0;
        if (e.adaptive()) {
            // Unnormalized posterior is enough: the argmax of the expected
            // information is invariant under positive scaling.
            const double peak = *std::max_element(lw.begin(), lw.end());
            p.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                p[i] = lw[i] == neg_inf ? 0.0 : std::exp(lw[i] - peak);
            std::vector<double> gain(e.info_rows.size(), 0.0);
            for (std::size_t cand = 0; cand < e.info_rows.size(); ++cand) {
                const auto& row = e.info_rows[cand];
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) acc += row[i] * p[i];
                gain[cand] = acc;
            }
            c = pick_gap_index(gain);
        }
        const auto x = meas::sample_outcome(e.probes[c], theta_true, stream);
        const auto& row = e.tables[c][x.value];
        for (std::size_t i = 0; i < n; ++i) lw[i] += row[i];
        r.outcomes.push_back(x.value);
        r.gaps.push_back(e.probes[c].probe_gap);
        while (next_ck < checkpoints.size() && checkpoints[next_ck] == step) {
            r.at_checkpoint.push_back(stats_from_log_weights(e, lw));
            ++next_ck;
        }
    }
    return r;
}

std::vector<int> all_steps(int nu) {
    std::vector<int> ck(nu);
    for (int i = 0; i < nu; ++i) ck[i] = i + 1;
    return ck;
}

EnsembleSummary reduce_ensemble(const Engine& e, const std::vector<int>& nu_grid, int n_traj,
                                std::uint64_t master_seed, const meas::MeasurementModel& companion,
                                int threads) {
    const std::size_t n_ck = nu_grid.size();
    std::vector<std::vector<StepStats>> rows(n_traj);
    par::parallel_for(static_cast<std::size_t>(n_traj), threads, [&](std::size_t t) {
        rng::RandomStream stream(rng::derive_stream_seed(master_seed, t));
        const double theta_true = infer::sample_theta(*e.prior, stream);
        rows[t] = walk(e, nu_grid, theta_true, stream).at_checkpoint;
    });

    EnsembleSummary s;
    s.nu_grid = nu_grid;
    s.n_traj = n_traj;
    s.master_seed = master_seed;
    s.emsd.assign(n_ck, 0.0);
    s.emsle.assign(n_ck, 0.0);
    for (int t = 0; t < n_traj; ++t)
        for (std::size_t j = 0; j < n_ck; ++j) {
            s.emsd[j] += rows[t][j].msd;
            s.emsle[j] += rows[t][j].msle;
        }
    for (std::size_t j = 0; j < n_ck; ++j) {
        s.emsd[j] /= n_traj;
        s.emsle[j] /= n_traj;
    }
    s.ecrb.resize(n_ck);
    s.bcrb.resize(n_ck);
    for (std::size_t j = 0; j < n_ck; ++j) {
        s.ecrb[j] = bounds::ecrb(*e.prior, e.prior->model, companion, nu_grid[j]);
        s.bcrb[j] = bounds::bcrb(*e.prior, e.prior->model, companion, nu_grid[j]);
    }
    return s;
}

}  // namespace

std::vector<int> default_nu_grid() {
    std::vector<int> grid;
    for (int k = 0; k < 30; ++k) {
        const int v = static_cast<int>(std::llround(std::pow(10.0, 4.0 * k / 29.0)));
        if (grid.empty() || v > grid.back()) grid.push_back(v);
    }
    return grid;
}

std::vector<double> default_gap_candidates(const models::TemperatureDomain& domain) {
    const double lo = std::log(domain.theta_min / 10.0);
    const double hi = std::log(10.0 * domain.theta_max);
    std::vector<double> gaps(64);
    for (int i = 0; i < 64; ++i) gaps[i] = std::exp(lo + (hi - lo) * i / 63.0);
    return gaps;
}

std::size_t pick_gap_index(const std::vector<double>& expected_info) {
    if (expected_info.empty()) throw std::invalid_argument("no gap candidates");
    std::size_t best = 0;
    for (std::size_t i = 1; i < expected_info.size(); ++i)
        if (expected_info[i] > expected_info[best]) best = i;
    return best;
}

TrajectoryRecord run_trajectory(const infer::PosteriorGrid& prior, const meas::MeasurementModel& m,
                                int nu, double true_theta, std::uint64_t seed) {
    if (nu < 0) throw std::invalid_argument("nu must be nonnegative");
    if (!(true_theta > prior.domain.theta_min && true_theta < prior.domain.theta_max))
        throw std::invalid_argument("true_theta must lie inside the open temperature domain");

    const Engine e = make_engine(prior, {m}, nullptr);
    rng::RandomStream stream(seed);
    const auto w = walk(e, all_steps(nu), true_theta, stream);

    TrajectoryRecord rec;
    rec.true_theta = true_theta;
    rec.seed = seed;
    rec.outcomes = w.outcomes;
    rec.gaps = w.gaps;
    rec.estimates_msd.reserve(nu);
    rec.estimates_msle.reserve(nu);
    rec.msd_curve.reserve(nu);
    rec.msle_curve.reserve(nu);
    for (const auto& st : w.at_checkpoint) {
        rec.estimates_msd.push_back(st.theta_msd);
        rec.estimates_msle.push_back(st.theta_msle);
        rec.msd_curve.push_back(st.msd);
        rec.msle_curve.push_back(st.msle);
    }
    return rec;
}

EnsembleSummary run_ensemble(const infer::PosteriorGrid& prior, const meas::MeasurementModel& m,
                             const std::vector<int>& nu_grid, int n_traj, std::uint64_t master_seed,
                             int threads) {
    validate_nu_grid(nu_grid);
    if (n_traj < 2) throw std::invalid_argument("run_ensemble requires n_traj >= 2");
    const Engine e = make_engine(prior, {m}, nullptr);
    return reduce_ensemble(e, nu_grid, n_traj, master_seed, m, threads);
}

EnsembleSummary run_adaptive(const infer::PosteriorGrid& prior, const AdaptivePolicy& policy, int nu,
                             int n_traj, std::uint64_t master_seed, int threads) {
    if (policy.gap_candidates.empty()) throw std::invalid_argument("gap_candidates must be nonempty");
    double prev = 0.0;
    for (double g : policy.gap_candidates) {
        if (!(g > prev)) throw std::invalid_argument("gap_candidates must be positive and strictly increasing");
        prev = g;
    }
    if (policy.reference.kind != models::ModelKind::ideal_reservoir)
        throw std::invalid_argument("adaptive protocol requires an ideal-reservoir reference");
    if (prior.model.kind != models::ModelKind::ideal_reservoir)
        throw std::invalid_argument("adaptive protocol requires a reservoir-referenced prior grid");
    if (nu < 1) throw std::invalid_argument("nu must be at least 1");
    if (n_traj < 2) throw std::invalid_argument("run_adaptive requires n_traj >= 2");

    std::vector<int> checkpoints;
    for (int v : default_nu_grid())
        if (v < nu) checkpoints.push_back(v);
    checkpoints.push_back(nu);

    std::vector<meas::MeasurementModel> probes;
    probes.reserve(policy.gap_candidates.size());
    for (double g : policy.gap_candidates) probes.push_back(meas::MeasurementModel::spin_energy(g, 1));

    const Engine e = make_engine(prior, probes, &policy.reference);

    // Companion curves need a fixed measurement; use the candidate that is
    // optimal under the initial prior.
    std::size_t best = 0;
    if (probes.size() > 1) {
        std::vector<double> prior_gain(e.info_rows.size(), 0.0);
        for (std::size_t cand = 0; cand < e.info_rows.size(); ++cand)
            for (std::size_t i = 0; i < prior.size(); ++i)
                prior_gain[cand] += e.info_rows[cand][i] * prior.density(i);
        best = pick_gap_index(prior_gain);
    }
    return reduce_ensemble(e, checkpoints, n_traj, master_seed, probes[best], threads);
}

}  // namespace thermoline::sim
