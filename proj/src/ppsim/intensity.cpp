#include "twinpp/ppsim/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twinpp::ppsim {

void PiecewiseLinear::validate() const {
    if (t.empty() || t.size() != v.size())
        throw std::invalid_argument("piecewise-linear: bad knot table");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("piecewise-linear: knots not increasing");
    for (double x : v)
        if (!std::isfinite(x) || x < 0.0)
            throw std::invalid_argument("piecewise-linear: values must be finite and >= 0");
}

double PiecewiseLinear::at(double time) const {
    if (time <= t.front()) return v.front();
    if (time >= t.back()) return v.back();
    auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t hi = static_cast<std::size_t>(it - t.begin());
    const std::size_t lo = hi - 1;
    const double w = (time - t[lo]) / (t[hi] - t[lo]);
    return v[lo] + w * (v[hi] - v[lo]);
}

double PiecewiseLinear::max_on(double a, double b) const {
    double best = std::max(at(a), at(b));
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] > a && t[i] < b) best = std::max(best, v[i]);
    return best;
}

double PiecewiseLinear::integral(double a, double b) const {
    if (b < a) throw std::invalid_argument("piecewise-linear: integral bounds reversed");
    // Trapezoid over the knot grid restricted to [a, b]; exact for a
    // piecewise-linear integrand.
    std::vector<double> xs{a};
    for (double knot : t)
        if (knot > a && knot < b) xs.push_back(knot);
    xs.push_back(b);
    double acc = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        acc += 0.5 * (at(xs[i - 1]) + at(xs[i])) * (xs[i] - xs[i - 1]);
    return acc;
}

PiecewiseLinear PiecewiseLinear::constant(double value) { return PiecewiseLinear{{0.0}, {value}}; }

void EventSequence::validate_sorted() const {
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("event sequence: timestamps not strictly increasing");
    if (!marks.empty() && marks.size() != times.size())
        throw std::invalid_argument("event sequence: marks/times length mismatch");
}

void validate_model(const IntensityModel& m) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Poisson>) {
                if (!(p.mu0 >= 0.0) || !std::isfinite(p.mu0))
                    throw std::invalid_argument("poisson: mu0 must be finite and >= 0");
            } else if constexpr (std::is_same_v<T, TimeVaryingPoisson>) {
                p.mu.validate();
            } else if constexpr (std::is_same_v<T, ReinforcedPoisson>) {
                p.gamma.validate();
            } else if constexpr (std::is_same_v<T, Hawkes>) {
                if (!(p.mu >= 0.0 && p.alpha >= 0.0 && p.beta > 0.0))
                    throw std::invalid_argument("hawkes: need mu >= 0, alpha >= 0, beta > 0");
            } else if constexpr (std::is_same_v<T, Reactive>) {
                if (!(p.mu >= 0.0 && p.a1 >= 0.0 && p.b1 > 0.0 && p.a2 >= 0.0 && p.b2 > 0.0))
                    throw std::invalid_argument("reactive: bad kernel parameters");
            } else if constexpr (std::is_same_v<T, SelfCorrecting>) {
                if (!(p.mu > 0.0 && p.alpha > 0.0))
                    throw std::invalid_argument("self-correcting: need mu > 0, alpha > 0");
            }
        },
        m);
}

namespace {

double exp_kernel_sum(double t, const std::vector<double>& times, double alpha, double beta) {
    double acc = 0.0;
    for (double ti : times) acc += alpha * std::exp(-beta * (t - ti));
    return acc;
}

std::size_t count_before(const std::vector<double>& times, double t) {
    return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
}

void check_history(double t, const EventSequence& history) {
    history.validate_sorted();
    if (!history.times.empty() && !(history.times.back() < t))
        throw std::invalid_argument("intensity: history must lie strictly before t");
    if (t < 0.0) throw std::invalid_argument("intensity: t must be >= 0");
}

}  // namespace

double intensity_at(const IntensityModel& m, double t, const EventSequence& history) {
    check_history(t, history);
    validate_model(m);
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Poisson>) {
                return p.mu0;
            } else if constexpr (std::is_same_v<T, TimeVaryingPoisson>) {
                return p.mu.at(t);
            } else if constexpr (std::is_same_v<T, ReinforcedPoisson>) {
                return p.gamma.at(t) * static_cast<double>(count_before(history.times, t));
            } else if constexpr (std::is_same_v<T, Hawkes>) {
                return p.mu + exp_kernel_sum(t, history.times, p.alpha, p.beta);
            } else if constexpr (std::is_same_v<T, Reactive>) {
                const double lam = p.mu + exp_kernel_sum(t, history.times, p.a1, p.b1) -
                                   exp_kernel_sum(t, history.times, p.a2, p.b2);
                return lam > 0.0 ? lam : 0.0;
            } else {
                return std::exp(p.mu * t -
                                p.alpha * static_cast<double>(count_before(history.times, t)));
            }
        },
        m);
}

double compensator_at(const IntensityModel& m, double t, const EventSequence& history) {
    check_history(t, history);
    validate_model(m);
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Poisson>) {
                return p.mu0 * t;
            } else if constexpr (std::is_same_v<T, TimeVaryingPoisson>) {
                return p.mu.integral(0.0, t);
            } else if constexpr (std::is_same_v<T, ReinforcedPoisson>) {
                double acc = 0.0;
                double prev = 0.0;
                std::size_t n = 0;
                for (double ti : history.times) {
                    if (ti >= t) break;
                    acc += static_cast<double>(n) * p.gamma.integral(prev, ti);
                    prev = ti;
                    n++;
                }
                acc += static_cast<double>(n) * p.gamma.integral(prev, t);
                return acc;
            } else if constexpr (std::is_same_v<T, Hawkes>) {
                double acc = p.mu * t;
                for (double ti : history.times)
                    acc += (p.alpha / p.beta) * (1.0 - std::exp(-p.beta * (t - ti)));
                return acc;
            } else if constexpr (std::is_same_v<T, Reactive>) {
                double acc = p.mu * t;
                for (double ti : history.times) {
                    acc += (p.a1 / p.b1) * (1.0 - std::exp(-p.b1 * (t - ti)));
                    acc -= (p.a2 / p.b2) * (1.0 - std::exp(-p.b2 * (t - ti)));
                }
                return acc;
            } else {
                // Between events the intensity is exp(mu*s - alpha*n);
                // integrate segment by segment.
                double acc = 0.0;
                double prev = 0.0;
                std::size_t n = 0;
                for (double ti : history.times) {
                    if (ti >= t) break;
                    acc += std::exp(-p.alpha * static_cast<double>(n)) *
                           (std::exp(p.mu * ti) - std::exp(p.mu * prev)) / p.mu;
                    prev = ti;
                    n++;
                }
                acc += std::exp(-p.alpha * static_cast<double>(n)) *
                       (std::exp(p.mu * t) - std::exp(p.mu * prev)) / p.mu;
                return acc;
            }
        },
        m);
}

void MultiHawkes::validate() const {
    const auto d = mu.size();
    if (d == 0) throw std::invalid_argument("multi-hawkes: empty mu");
    if (A.size() != d) throw std::invalid_argument("multi-hawkes: A row count mismatch");
    for (const auto& row : A) {
        if (row.size() != d) throw std::invalid_argument("multi-hawkes: A column count mismatch");
        for (double a : row)
            if (!(a >= 0.0) || !std::isfinite(a))
                throw std::invalid_argument("multi-hawkes: A entries must be finite and >= 0");
    }
    for (double m : mu)
        if (!(m >= 0.0) || !std::isfinite(m))
            throw std::invalid_argument("multi-hawkes: mu entries must be finite and >= 0");
    if (!(beta > 0.0)) throw std::invalid_argument("multi-hawkes: beta must be > 0");
}

double MultiHawkes::branching_bound() const {
    double worst = 0.0;
    for (const auto& row : A) {
        double s = 0.0;
        for (double a : row) s += a;
        worst = std::max(worst, s / beta);
    }
    return worst;
}

double multi_intensity_at(const MultiHawkes& m, int dim, double t, const EventSequence& history) {
    check_history(t, history);
    m.validate();
    if (dim < 0 || dim >= m.dims()) throw std::invalid_argument("multi-hawkes: dim out of range");
    double acc = m.mu[static_cast<std::size_t>(dim)];
    for (std::size_t i = 0; i < history.times.size(); ++i) {
        const int mark = history.marks.empty() ? 0 : history.marks[i];
        acc += m.A[static_cast<std::size_t>(dim)][static_cast<std::size_t>(mark)] *
               std::exp(-m.beta * (t - history.times[i]));
    }
    return acc;
}

double multi_total_intensity_at(const MultiHawkes& m, double t, const EventSequence& history) {
    double acc = 0.0;
    for (int d = 0; d < m.dims(); ++d) acc += multi_intensity_at(m, d, t, history);
    return acc;
}

}  // namespace twinpp::ppsim
