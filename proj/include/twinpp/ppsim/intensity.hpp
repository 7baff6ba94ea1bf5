#pragma once

#include <variant>
#include <vector>

namespace twinpp::ppsim {

// Piecewise-linear function given by sorted knots; constant-extended
// outside the knot range.
struct PiecewiseLinear {
    std::vector<double> t;
    std::vector<double> v;

    double at(double time) const;
    double max_on(double a, double b) const;
    double integral(double a, double b) const;
    void validate() const;

    static PiecewiseLinear constant(double value);
};

// The classical conditional-intensity families, split into spontaneous
// background and history-event effect.
struct Poisson {
    double mu0 = 1.0;  // lambda(t) = mu0
};

struct TimeVaryingPoisson {
    PiecewiseLinear mu;  // lambda(t) = mu(t)
};

struct ReinforcedPoisson {
    PiecewiseLinear gamma;  // lambda(t) = gamma(t) * |{i : t_i < t}|
};

struct Hawkes {
    double mu = 0.1;
    double alpha = 0.5;
    double beta = 1.0;  // lambda(t) = mu + sum alpha*exp(-beta*(t - t_i))
};

struct Reactive {
    double mu = 0.1;
    double a1 = 0.5, b1 = 1.0;  // exciting kernel
    double a2 = 0.2, b2 = 2.0;  // inhibiting kernel; intensity clamps at 0
};

struct SelfCorrecting {
    double mu = 1.0;
    double alpha = 0.2;  // lambda(t) = exp(mu*t - alpha*|{i : t_i < t}|)
};

using IntensityModel =
    std::variant<Poisson, TimeVaryingPoisson, ReinforcedPoisson, Hawkes, Reactive, SelfCorrecting>;

// A realization on [0, horizon]; marks identify the dimension for
// multivariate processes (all zero for univariate ones).
struct EventSequence {
    std::vector<double> times;
    std::vector<int> marks;
    double horizon = 0.0;

    std::size_t size() const { return times.size(); }
    void validate_sorted() const;  // strictly increasing, throws otherwise
};

void validate_model(const IntensityModel& m);

// Exact closed-form intensity at time t given history strictly before t.
double intensity_at(const IntensityModel& m, double t, const EventSequence& history);

// Integrated intensity on [0, t] given the same history convention.
// For the reactive family this is the unclamped closed form, exact whenever
// the intensity stays positive.
double compensator_at(const IntensityModel& m, double t, const EventSequence& history);

// Multivariate Hawkes with shared exponential decay:
// lambda_d(t) = mu_d + sum_i A[d][mark_i] * exp(-beta*(t - t_i)).
struct MultiHawkes {
    std::vector<double> mu;
    std::vector<std::vector<double>> A;
    double beta = 1.0;

    int dims() const { return static_cast<int>(mu.size()); }
    void validate() const;
    // Largest row-sum bound on the spectral radius of A/beta; a value >= 1
    // means the process is non-stationary.
    double branching_bound() const;
};

double multi_intensity_at(const MultiHawkes& m, int dim, double t, const EventSequence& history);
double multi_total_intensity_at(const MultiHawkes& m, double t, const EventSequence& history);

}  // namespace twinpp::ppsim
