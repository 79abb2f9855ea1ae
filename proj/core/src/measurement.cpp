#include "thermoline/measurement.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermoline::meas {

namespace {

void require_positive_theta(double theta) {
    if (!(theta > 0.0)) throw std::domain_error("temperature must be positive");
}

double floor_ll(double ll) { return std::max(ll, log_likelihood_floor); }

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

MeasurementModel MeasurementModel::spin_energy(double gap, int batch_size) {
    if (!(gap > 0.0)) throw std::invalid_argument("probe_gap must be positive");
    if (batch_size < 0) throw std::invalid_argument("batch_size must be nonnegative");
    MeasurementModel m;
    m.kind = ProbeKind::spin_energy;
    m.probe_gap = gap;
    m.batch_size = batch_size;
    return m;
}

MeasurementModel MeasurementModel::boson_occupation(double gap, int cutoff) {
    if (!(gap > 0.0)) throw std::invalid_argument("probe_gap must be positive");
    if (cutoff < 1) throw std::invalid_argument("occupation_cutoff must be at least 1");
    MeasurementModel m;
    m.kind = ProbeKind::boson_occupation;
    m.probe_gap = gap;
    m.occupation_cutoff = cutoff;
    return m;
}

MeasurementModel MeasurementModel::boson_occupation(double gap, const models::TemperatureDomain& domain) {
    if (!(gap > 0.0)) throw std::invalid_argument("probe_gap must be positive");
    const int cutoff = std::max(1, static_cast<int>(std::ceil(40.0 * domain.theta_max / gap)));
    return boson_occupation(gap, cutoff);
}

int MeasurementModel::outcome_count() const {
    return kind == ProbeKind::spin_energy ? batch_size + 1 : occupation_cutoff + 1;
}

double truncation_tail(const MeasurementModel& m, double theta) {
    require_positive_theta(theta);
    if (m.kind != ProbeKind::boson_occupation) return 0.0;
    // Untruncated geometric mass above n_max: q^(n_max+1), q = exp(-gap/theta).
    return std::exp(-(m.occupation_cutoff + 1.0) * m.probe_gap / theta);
}

double log_likelihood(const MeasurementModel& m, Outcome x, double theta) {
    require_positive_theta(theta);
    const double r = m.probe_gap / theta;
    switch (m.kind) {
        case ProbeKind::spin_energy: {
            const int k = x.value;
            if (k < 0 || k > m.batch_size)
                throw std::domain_error("spin outcome out of range [0, batch_size]");
            // log p_e = -r - log(1+e^-r), log(1-p_e) = -log(1+e^-r)
            const double lse = std::log1p(std::exp(-r));
            const double ll = log_binomial(m.batch_size, k) + k * (-r - lse) +
                              (m.batch_size - k) * (-lse);
            return floor_ll(ll);
        }
        case ProbeKind::boson_occupation: {
            const int n = x.value;
            if (n < 0 || n > m.occupation_cutoff)
                throw std::domain_error("occupation outcome out of range [0, n_max]");
            // Geometric mass renormalized over the truncated ladder:
            // log p(n) = -n r + log(1 - e^-r) - log(1 - e^-(n_max+1) r)
            const double ll = -static_cast<double>(n) * r + std::log(-std::expm1(-r)) -
                              std::log(-std::expm1(-(m.occupation_cutoff + 1.0) * r));
            return floor_ll(ll);
        }
    }
    throw std::logic_error("unreachable probe kind");
}

Outcome sample_outcome(const MeasurementModel& m, double theta, rng::RandomStream& stream) {
    require_positive_theta(theta);
    const double r = m.probe_gap / theta;
    switch (m.kind) {
        case ProbeKind::spin_energy: {
            const double p_excited = 1.0 / (1.0 + std::exp(r));
            int count = 0;
            for (int i = 0; i < m.batch_size; ++i)
                if (stream.uniform() < p_excited) ++count;
            return Outcome{count};
        }
        case ProbeKind::boson_occupation: {
            // Closed-form inverse CDF of the truncated geometric:
            // smallest n with 1 - q^(n+1) >= u (1 - q^(n_max+1)).
            const double tail = -std::expm1(-(m.occupation_cutoff + 1.0) * r);
            const double y = std::log1p(-stream.uniform() * tail) / (-r);
            long n = static_cast<long>(std::ceil(y)) - 1;
            if (n < 0) n = 0;
            if (n > m.occupation_cutoff) n = m.occupation_cutoff;
            return Outcome{static_cast<int>(n)};
        }
    }
    throw std::logic_error("unreachable probe kind");
}

double fisher_information(const MeasurementModel& m, double theta) {
    require_positive_theta(theta);
    switch (m.kind) {
        case ProbeKind::spin_energy:
            // FI adds over the mu independent spins, and one projective
            // energy measurement extracts the full spin QFI.
            return m.batch_size * models::qfi(models::SampleModel::spin_half(m.probe_gap), theta);
        case ProbeKind::boson_occupation: {
            // Exhaustive sum over the truncated ladder. The temperature
            // score of each mass is (n - <n>) gap/theta^2, so the FI is
            // (gap/theta^2)^2 Var(n).
            std::vector<double> p(m.occupation_cutoff + 1);
            double mean = 0.0;
            for (int n = 0; n <= m.occupation_cutoff; ++n) {
                p[n] = std::exp(log_likelihood(m, Outcome{n}, theta));
                mean += n * p[n];
            }
            double var = 0.0;
            for (int n = 0; n <= m.occupation_cutoff; ++n) var += (n - mean) * (n - mean) * p[n];
            const double scale = m.probe_gap / (theta * theta);
            return scale * scale * var;
        }
    }
    throw std::logic_error("unreachable probe kind");
}

bool scale_invariance_check(const MeasurementModel& m, double theta, double scale) {
    require_positive_theta(theta);
    if (!(scale > 0.0)) throw std::domain_error("scale must be positive");
    // Both shipped likelihoods are discrete functions of gap/theta, never of
    // outcome/theta, so rescaling (x, theta) -> (c x, c theta) is not even
    // well-formed on the outcome lattice.
    (void)m;
    return false;
}

}  // namespace thermoline::meas
