#pragma once

#include <string>

// Closed-form thermal-state geometry for the three sample families:
// the quantum Fisher information metric h(theta), the flat coordinate
// lambda(theta) = integral of sqrt(h), its inverse, heat capacities and
// geodesic distances. Units: k_B = 1, temperatures in energy units, so for
// the gapped models everything is a function of theta/gap.

namespace thermoline::models {

enum class ModelKind { ideal_reservoir, spin_half, boson_mode };

struct SampleModel {
    ModelKind kind = ModelKind::ideal_reservoir;
    double gap = 1.0;             // level splitting, spin_half / boson_mode
    double capacity_scale = 1.0;  // constant heat capacity, ideal_reservoir

    static SampleModel ideal_reservoir(double capacity_scale = 1.0);
    static SampleModel spin_half(double gap);
    static SampleModel boson_mode(double gap);
};

const char* kind_name(ModelKind kind);

// QFI metric h(theta):
//   reservoir:  V / theta^2
//   spin:       (gap^2/theta^4) / (4 cosh^2(gap/2theta))
//   boson:      (gap^2/theta^4) / (4 sinh^2(gap/2theta))
// Evaluated in a branch-free exponential form that neither overflows nor
// loses digits over the whole positive axis; values below ~1e-308 flush
// to zero (the spin/boson metric genuinely underflows for theta/gap
// smaller than about 7e-4).
double qfi(const SampleModel& model, double theta);

// C(theta) = theta^2 h(theta); the reservoir constant is capacity_scale.
double heat_capacity(const SampleModel& model, double theta);

// Flat coordinate with the integration constants
//   reservoir: lambda(1) = 0,  spin/boson: lambda(0+) = 0:
//   reservoir: sqrt(V) log(theta)
//   spin:      2 atan(exp(-gap/2theta)),  range (0, pi/2)
//   boson:     -log tanh(gap/4theta),     range (0, inf)
double lambda_of_theta(const SampleModel& model, double theta);

// Inverse map; `lam` must lie strictly inside the model's lambda range.
double theta_of_lambda(const SampleModel& model, double lam);

// Thermodynamic length |lambda(theta1) - lambda(theta0)|.
double geodesic_distance(const SampleModel& model, double theta0, double theta1);

struct TemperatureDomain {
    double theta_min = 0.0;
    double theta_max = 0.0;
    double lambda_min = 0.0;  // cached lambda(theta_min)
    double lambda_max = 0.0;  // cached lambda(theta_max)

    TemperatureDomain() = default;
    // Validates 0 < theta_min < theta_max and caches the lambda endpoints.
    TemperatureDomain(const SampleModel& model, double theta_min, double theta_max);

    double lambda_width() const { return lambda_max - lambda_min; }
};

// Domain-aware variant: clamps roundoff excursions into [lambda_min,
// lambda_max]; the closed form itself is never shifted.
double lambda_of_theta(const SampleModel& model, double theta, const TemperatureDomain& domain);

}  // namespace thermoline::models
