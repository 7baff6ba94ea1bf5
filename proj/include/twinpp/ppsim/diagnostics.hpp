#pragma once

#include <vector>

#include "twinpp/ppsim/intensity.hpp"

namespace twinpp::ppsim {

// Time-rescaling residuals: u_i = Lambda(t_i) - Lambda(t_{i-1}) with
// Lambda the compensator. For a correctly specified model these are iid
// unit-exponential.
std::vector<double> rescaled_intervals(const IntensityModel& m, const EventSequence& seq);

// One-sample Kolmogorov-Smirnov statistic against the unit exponential.
double ks_statistic_exp1(std::vector<double> samples);

// Critical value of the KS statistic (Stephens' approximation); alpha is
// the significance level, e.g. 0.01.
double ks_critical_value(std::size_t n, double alpha);

}  // namespace twinpp::ppsim
