#include "thermoline/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "thermoline/parallel.hpp"

namespace thermoline::bounds {

namespace {

// The reference metric of the measurement's own probe family: the ratio
// h_ref/h_meas collapses to 1/mu with no quadrature error.
bool matched_spin_pair(const models::SampleModel& reference, const meas::MeasurementModel& m) {
    return reference.kind == models::ModelKind::spin_half && m.kind == meas::ProbeKind::spin_energy &&
           reference.gap == m.probe_gap;
}

double quadrature_ratio(const infer::PosteriorGrid& prior, const models::SampleModel& num_model,
                        const meas::MeasurementModel& m, bool fisher_in_numerator) {
    double acc = 0.0;
    for (std::size_t i = 0; i < prior.size(); ++i) {
        const double wp = prior.trap_weight(i) * prior.density(i);
        if (wp == 0.0) continue;
        const double h_ref = models::qfi(num_model, prior.thetas[i]);
        const double h_meas = meas::fisher_information(m, prior.thetas[i]);
        const double denom = fisher_in_numerator ? h_ref : h_meas;
        if (denom <= 0.0)
            throw std::domain_error("metric ratio undefined: information vanishes at theta = " +
                                    std::to_string(prior.thetas[i]));
        acc += wp * (fisher_in_numerator ? h_meas / h_ref : h_ref / h_meas);
    }
    return acc;
}

}  // namespace

double ecrb(const infer::PosteriorGrid& prior, const models::SampleModel& reference,
            const meas::MeasurementModel& m, int nu) {
    if (nu < 1) throw std::invalid_argument("ecrb requires nu >= 1");
    if (matched_spin_pair(reference, m)) {
        if (m.batch_size < 1) throw std::domain_error("ecrb: measurement carries no information");
        return 1.0 / (static_cast<double>(nu) * m.batch_size);
    }
    return quadrature_ratio(prior, reference, m, /*fisher_in_numerator=*/false) / nu;
}

infer::InformationResult q_prior(const infer::PosteriorGrid& prior) {
    return infer::bayesian_information(prior);
}

double bcrb(const infer::PosteriorGrid& prior, const models::SampleModel& reference,
            const meas::MeasurementModel& m, int nu) {
    if (nu < 0) throw std::invalid_argument("bcrb requires nu >= 0");
    double data_info = 0.0;
    if (nu > 0) {
        const double per_shot = matched_spin_pair(reference, m)
                                    ? static_cast<double>(m.batch_size)
                                    : quadrature_ratio(prior, reference, m, /*fisher_in_numerator=*/true);
        data_info = nu * per_shot;
    }
    return 1.0 / (q_prior(prior).value + data_info);
}

TbcrbResult tbcrb(const infer::PosteriorGrid& prior, const meas::MeasurementModel& m, int nu,
                  int n_mc, std::uint64_t seed, int threads) {
    if (n_mc < 100) throw std::invalid_argument("tbcrb requires n_mc >= 100");
    if (nu < 0) throw std::invalid_argument("tbcrb requires nu >= 0");

    // Node log-likelihood table, one row per outcome value; shared by all
    // draws, so the per-step work is a table-row add.
    const int n_out = m.outcome_count();
    const std::size_t n = prior.size();
    std::vector<std::vector<double>> table(n_out, std::vector<double>(n));
    for (int k = 0; k < n_out; ++k)
        for (std::size_t i = 0; i < n; ++i)
            table[k][i] = meas::log_likelihood(m, meas::Outcome{k}, prior.thetas[i]);

    std::vector<double> inv_q(n_mc);
    std::vector<char> flagged(n_mc, 0);
    par::parallel_for(static_cast<std::size_t>(n_mc), threads, [&](std::size_t draw) {
        rng::RandomStream stream(rng::derive_stream_seed(seed, draw));
        const double theta_true = infer::sample_theta(prior, stream);
        infer::PosteriorGrid post = prior;
        for (int step = 0; step < nu; ++step) {
            const auto x = meas::sample_outcome(m, theta_true, stream);
            const auto& row = table[x.value];
            for (std::size_t i = 0; i < n; ++i) post.log_weights[i] += row[i];
        }
        post.normalize();
        const auto q = infer::bayesian_information(post);
        inv_q[draw] = 1.0 / q.value;
        flagged[draw] = q.boundary_flagged ? 1 : 0;
    });

    TbcrbResult out;
    int n_flagged = 0;
    for (int i = 0; i < n_mc; ++i) {
        out.value += inv_q[i];
        n_flagged += flagged[i];
    }
    out.value /= n_mc;
    double ss = 0.0;
    for (int i = 0; i < n_mc; ++i) ss += (inv_q[i] - out.value) * (inv_q[i] - out.value);
    out.std_error = std::sqrt(ss / (static_cast<double>(n_mc) * (n_mc - 1)));
    out.boundary_warning = n_flagged > 0.05 * n_mc;
    return out;
}

BoundReport report(const infer::PosteriorGrid& prior, const models::SampleModel& reference,
                   const meas::MeasurementModel& m, int nu, int n_mc, std::uint64_t seed,
                   int threads) {
    BoundReport r;
    r.reference = reference;
    r.measurement = m;
    r.repetitions = nu;
    const auto qp = q_prior(prior);
    r.q_prior = qp.value;
    r.q_prior_flagged = qp.boundary_flagged;
    r.ecrb = ecrb(prior, reference, m, nu);
    r.bcrb = bcrb(prior, reference, m, nu);
    const auto tb = tbcrb(prior, m, nu, n_mc, seed, threads);
    r.tbcrb = tb.value;
    r.mc_std_error = tb.std_error;
    r.tbcrb_flagged = tb.boundary_warning;
    return r;
}

}  // namespace thermoline::bounds
