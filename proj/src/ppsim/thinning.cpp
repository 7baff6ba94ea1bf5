#include "twinpp/ppsim/thinning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "twinpp/numcore/rng.hpp"

namespace twinpp::ppsim {

namespace {

struct Bound {
    double lambda_bar = 0.0;
    double valid_until = 0.0;
};

Bound local_bound(const IntensityModel& m, double t, double horizon, const EventSequence& events) {
    return std::visit(
        [&](const auto& p) -> Bound {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Poisson>) {
                return {p.mu0, horizon};
            } else if constexpr (std::is_same_v<T, TimeVaryingPoisson>) {
                return {p.mu.max_on(t, horizon), horizon};
            } else if constexpr (std::is_same_v<T, ReinforcedPoisson>) {
                const double n = static_cast<double>(events.times.size());
                return {n * p.gamma.max_on(t, horizon), horizon};
            } else if constexpr (std::is_same_v<T, Hawkes>) {
                double acc = p.mu;
                for (double ti : events.times) acc += p.alpha * std::exp(-p.beta * (t - ti));
                return {acc, horizon};
            } else if constexpr (std::is_same_v<T, Reactive>) {
                double acc = p.mu;
                for (double ti : events.times) acc += p.a1 * std::exp(-p.b1 * (t - ti));
                return {acc, horizon};
            } else {
                const double window_end = std::min(horizon, t + 1.0 / p.mu);
                const double n = static_cast<double>(events.times.size());
                return {std::exp(p.mu * window_end - p.alpha * n), window_end};
            }
        },
        m);
}

// Intensity with history already known to be sorted and <= t (thinning
// evaluates at proposal times after every accepted event).
double raw_intensity(const IntensityModel& m, double t, const EventSequence& events) {
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Poisson>) {
                return p.mu0;
            } else if constexpr (std::is_same_v<T, TimeVaryingPoisson>) {
                return p.mu.at(t);
            } else if constexpr (std::is_same_v<T, ReinforcedPoisson>) {
                return p.gamma.at(t) * static_cast<double>(events.times.size());
            } else if constexpr (std::is_same_v<T, Hawkes>) {
                double acc = p.mu;
                for (double ti : events.times) acc += p.alpha * std::exp(-p.beta * (t - ti));
                return acc;
            } else if constexpr (std::is_same_v<T, Reactive>) {
                double acc = p.mu;
                for (double ti : events.times)
                    acc += p.a1 * std::exp(-p.b1 * (t - ti)) - p.a2 * std::exp(-p.b2 * (t - ti));
                return acc > 0.0 ? acc : 0.0;
            } else {
                return std::exp(p.mu * t - p.alpha * static_cast<double>(events.times.size()));
            }
        },
        m);
}

}  // namespace

EventSequence sample_thinning(const IntensityModel& m, double horizon, std::uint64_t seed) {
    validate_model(m);
    if (horizon < 0.0) throw std::invalid_argument("sample_thinning: negative horizon");
    num::Rng rng(seed);
    EventSequence seq;
    seq.horizon = horizon;

    double t = 0.0;
    while (t < horizon) {
        const Bound b = local_bound(m, t, horizon, seq);
        if (!std::isfinite(b.lambda_bar))
            throw std::runtime_error("sample_thinning: unbounded intensity over the horizon");
        if (b.lambda_bar <= 0.0) {
            t = b.valid_until;
            if (t >= horizon) break;
            continue;
        }
        const double wait = rng.exponential(b.lambda_bar);
        if (t + wait > b.valid_until) {
            t = b.valid_until;
            continue;
        }
        t += wait;
        const double lam = raw_intensity(m, t, seq);
        if (lam > b.lambda_bar * (1.0 + 1e-9))
            throw std::logic_error("sample_thinning: intensity exceeded its proposal bound");
        if (rng.uniform() * b.lambda_bar <= lam) {
            seq.times.push_back(t);
            seq.marks.push_back(0);
        }
    }
    return seq;
}

EventSequence sample_thinning(const MultiHawkes& m, double horizon, std::uint64_t seed,
                              const EventSequence* history, double t_start) {
    m.validate();
    if (horizon < 0.0) throw std::invalid_argument("sample_thinning: negative horizon");
    const auto d = static_cast<std::size_t>(m.dims());
    num::Rng rng(seed);

    // Per-source decayed kernel sums S_j(t) = sum_{t_i <= t, mark_i = j}
    // exp(-beta (t - t_i)); lambda_d = mu_d + (A S)_d.
    std::vector<double> s(d, 0.0);
    double t = t_start;
    if (history != nullptr) {
        history->validate_sorted();
        for (std::size_t i = 0; i < history->times.size(); ++i) {
            const double ti = history->times[i];
            if (ti > t_start)
                throw std::invalid_argument("sample_thinning: history extends past t_start");
            const int mark = history->marks.empty() ? 0 : history->marks[i];
            s[static_cast<std::size_t>(mark)] += std::exp(-m.beta * (t_start - ti));
        }
    }

    auto lambdas = [&](const std::vector<double>& state) {
        std::vector<double> lam(d, 0.0);
        for (std::size_t k = 0; k < d; ++k) {
            double acc = m.mu[k];
            for (std::size_t j = 0; j < d; ++j) acc += m.A[k][j] * state[j];
            lam[k] = acc;
        }
        return lam;
    };

    EventSequence seq;
    seq.horizon = horizon;
    const double t_end = t_start + horizon;

    while (t < t_end) {
        const std::vector<double> lam_now = lambdas(s);
        double lambda_bar = 0.0;
        for (double l : lam_now) lambda_bar += l;
        if (!(std::isfinite(lambda_bar)))
            throw std::runtime_error("sample_thinning: unbounded intensity");
        if (lambda_bar <= 0.0) break;  // A >= 0 and no background: nothing can fire

        const double wait = rng.exponential(lambda_bar);
        if (t + wait > t_end) break;
        const double decay = std::exp(-m.beta * wait);
        for (auto& sj : s) sj *= decay;
        t += wait;

        std::vector<double> lam = lambdas(s);
        double total = 0.0;
        for (double l : lam) total += l;
        if (total > lambda_bar * (1.0 + 1e-9))
            throw std::logic_error("sample_thinning: intensity exceeded its proposal bound");
        if (rng.uniform() * lambda_bar <= total) {
            double pick = rng.uniform() * total;
            std::size_t mark = d - 1;
            for (std::size_t k = 0; k < d; ++k) {
                if (pick < lam[k]) {
                    mark = k;
                    break;
                }
                pick -= lam[k];
            }
            seq.times.push_back(t);
            seq.marks.push_back(static_cast<int>(mark));
            s[mark] += 1.0;
        }
    }
    return seq;
}

}  // namespace twinpp::ppsim
