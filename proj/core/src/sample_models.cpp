#include "thermoline/sample_models.hpp"

#include <cmath>
#include <stdexcept>

namespace thermoline::models {

namespace {

constexpr double half_pi = 1.5707963267948966192313216916398;

void require_positive_theta(double theta) {
    if (!(theta > 0.0)) throw std::domain_error("temperature must be positive");
}

// Largest u with exp(-u) > 0 in double precision; beyond it the gapped
// metrics are identically zero at this precision.
constexpr double exp_underflow = 745.0;

double square(double x) { return x * x; }

}  // namespace

SampleModel SampleModel::ideal_reservoir(double capacity_scale) {
    if (!(capacity_scale > 0.0)) throw std::invalid_argument("capacity_scale must be positive");
    SampleModel m;
    m.kind = ModelKind::ideal_reservoir;
    m.capacity_scale = capacity_scale;
    return m;
}

SampleModel SampleModel::spin_half(double gap) {
    if (!(gap > 0.0)) throw std::invalid_argument("gap must be positive");
    SampleModel m;
    m.kind = ModelKind::spin_half;
    m.gap = gap;
    return m;
}

SampleModel SampleModel::boson_mode(double gap) {
    if (!(gap > 0.0)) throw std::invalid_argument("gap must be positive");
    SampleModel m;
    m.kind = ModelKind::boson_mode;
    m.gap = gap;
    return m;
}

const char* kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::ideal_reservoir: return "ideal_reservoir";
        case ModelKind::spin_half: return "spin_half";
        case ModelKind::boson_mode: return "boson_mode";
    }
    return "unknown";
}

double qfi(const SampleModel& model, double theta) {
    require_positive_theta(theta);
    switch (model.kind) {
        case ModelKind::ideal_reservoir:
            return model.capacity_scale / (theta * theta);
        case ModelKind::spin_half: {
            // 1/(2 cosh u) = exp(-u)/(1 + exp(-2u)) with u = gap/2theta:
            // every factor stays representable down to the underflow point.
            const double u = 0.5 * model.gap / theta;
            if (u > exp_underflow) return 0.0;
            const double s = std::exp(-u) / (1.0 + std::exp(-2.0 * u));
            return square(model.gap / (theta * theta) * s);
        }
        case ModelKind::boson_mode: {
            // 1/(2 sinh u) = exp(-u)/(1 - exp(-2u)); -expm1 keeps the
            // denominator exact in the reservoir limit u -> 0.
            const double u = 0.5 * model.gap / theta;
            if (u > exp_underflow) return 0.0;
            const double s = std::exp(-u) / (-std::expm1(-2.0 * u));
            return square(model.gap / (theta * theta) * s);
        }
    }
    throw std::logic_error("unreachable model kind");
}

double heat_capacity(const SampleModel& model, double theta) {
    require_positive_theta(theta);
    if (model.kind == ModelKind::ideal_reservoir) return model.capacity_scale;
    return theta * theta * qfi(model, theta);
}

double lambda_of_theta(const SampleModel& model, double theta) {
    require_positive_theta(theta);
    switch (model.kind) {
        case ModelKind::ideal_reservoir:
            return std::sqrt(model.capacity_scale) * std::log(theta);
        case ModelKind::spin_half:
            // pi - 2 atan(exp(u)) == 2 atan(exp(-u)), but the right-hand
            // form keeps full precision at small theta.
            return 2.0 * std::atan(std::exp(-0.5 * model.gap / theta));
        case ModelKind::boson_mode: {
            // -log tanh(v) = log(1 + e^{-2v}) - log(1 - e^{-2v})
            const double v = 0.25 * model.gap / theta;
            const double e = std::exp(-2.0 * v);
            return std::log1p(e) - std::log(-std::expm1(-2.0 * v));
        }
    }
    throw std::logic_error("unreachable model kind");
}

double lambda_of_theta(const SampleModel& model, double theta, const TemperatureDomain& domain) {
    const double lam = lambda_of_theta(model, theta);
    if (lam < domain.lambda_min) return domain.lambda_min;
    if (lam > domain.lambda_max) return domain.lambda_max;
    return lam;
}

namespace {

// Fallback for inputs where the closed-form inverse degenerates in floating
// point (lambda within a few ulps of a range boundary).
double bisect_theta(const SampleModel& model, double lam, double lo, double hi) {
    for (int i = 0; i < 200 && lo < hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (lambda_of_theta(model, mid) < lam)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double theta_of_lambda(const SampleModel& model, double lam) {
    switch (model.kind) {
        case ModelKind::ideal_reservoir: {
            if (!std::isfinite(lam)) throw std::domain_error("lambda must be finite");
            return std::exp(lam / std::sqrt(model.capacity_scale));
        }
        case ModelKind::spin_half: {
            if (!(lam > 0.0 && lam < half_pi))
                throw std::domain_error("spin lambda must lie in (0, pi/2)");
            const double denom = -2.0 * std::log(std::tan(0.5 * lam));
            const double theta = model.gap / denom;
            if (std::isfinite(theta) && theta > 0.0) return theta;
            return bisect_theta(model, lam, 1e-300, 1e300);
        }
        case ModelKind::boson_mode: {
            if (!(lam > 0.0)) throw std::domain_error("boson lambda must be positive");
            // artanh(e^-lam) = [log1p(e^-lam) - log(-expm1(-lam))] / 2
            const double at = 0.5 * (std::log1p(std::exp(-lam)) - std::log(-std::expm1(-lam)));
            const double theta = 0.25 * model.gap / at;
            if (std::isfinite(theta) && theta > 0.0) return theta;
            return bisect_theta(model, lam, 1e-300, 1e300);
        }
    }
    throw std::logic_error("unreachable model kind");
}

double geodesic_distance(const SampleModel& model, double theta0, double theta1) {
    return std::fabs(lambda_of_theta(model, theta1) - lambda_of_theta(model, theta0));
}

TemperatureDomain::TemperatureDomain(const SampleModel& model, double tmin, double tmax) {
    if (!(tmin > 0.0) || !(tmax > tmin))
        throw std::invalid_argument("temperature domain requires 0 < theta_min < theta_max");
    theta_min = tmin;
    theta_max = tmax;
    lambda_min = lambda_of_theta(model, tmin);
    lambda_max = lambda_of_theta(model, tmax);
    if (!(lambda_min < lambda_max))
        throw std::invalid_argument("degenerate temperature domain: lambda endpoints collapse");
}

}  // namespace thermoline::models
