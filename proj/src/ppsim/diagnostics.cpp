#include "twinpp/ppsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twinpp::ppsim {

std::vector<double> rescaled_intervals(const IntensityModel& m, const EventSequence& seq) {
    seq.validate_sorted();
    std::vector<double> out;
    out.reserve(seq.times.size());

    // Incremental for the two families used at scale; generic compensator
    // calls otherwise.
    if (const auto* poisson = std::get_if<Poisson>(&m)) {
        double prev = 0.0;
        for (double t : seq.times) {
            out.push_back(poisson->mu0 * (t - prev));
            prev = t;
        }
        return out;
    }
    if (const auto* hawkes = std::get_if<Hawkes>(&m)) {
        double prev = 0.0;
        double s = 0.0;  // sum of exp(-beta (prev - t_k)) over events t_k <= prev
        for (double t : seq.times) {
            const double dt = t - prev;
            const double decay = std::exp(-hawkes->beta * dt);
            out.push_back(hawkes->mu * dt + (hawkes->alpha / hawkes->beta) * s * (1.0 - decay));
            s = s * decay + 1.0;
            prev = t;
        }
        return out;
    }

    EventSequence hist;
    hist.horizon = seq.horizon;
    double prev_comp = 0.0;
    for (std::size_t i = 0; i < seq.times.size(); ++i) {
        const double comp = compensator_at(m, seq.times[i], hist);
        out.push_back(comp - prev_comp);
        prev_comp = comp;
        hist.times.push_back(seq.times[i]);
        hist.marks.push_back(seq.marks.empty() ? 0 : seq.marks[i]);
    }
    return out;
}

double ks_statistic_exp1(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic_exp1: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = 1.0 - std::exp(-samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, std::fabs(cdf - lo), std::fabs(hi - cdf)});
    }
    return d;
}

double ks_critical_value(std::size_t n, double alpha) {
    // c(alpha) / (sqrt(n) + 0.12 + 0.11/sqrt(n)), Stephens (1970).
    double c;
    if (alpha <= 0.01) {
        c = 1.628;
    } else if (alpha <= 0.05) {
        c = 1.358;
    } else {
        c = 1.224;
    }
    const double sn = std::sqrt(static_cast<double>(n));
    return c / (sn + 0.12 + 0.11 / sn);
}

}  // namespace twinpp::ppsim
