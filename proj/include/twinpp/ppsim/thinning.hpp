#pragma once

#include <cstdint>

#include "twinpp/ppsim/intensity.hpp"

namespace twinpp::ppsim {

// Ogata thinning on [0, T]. Exact per-seed-deterministic samples; proposal
// bounds are family-specific:
//  - Poisson / time-varying Poisson: the (max) rate over the horizon;
//  - reinforced Poisson: event count times the kernel maximum;
//  - Hawkes: lambda just after the last event (non-increasing in between);
//  - reactive: mu plus the exciting sum alone (the inhibiting term only
//    lowers the intensity, and the intensity itself need not decrease
//    between events when the inhibitor decays faster);
//  - self-correcting: the right edge of a 1/mu look-ahead window,
//    re-proposed on expiry.
EventSequence sample_thinning(const IntensityModel& m, double horizon, std::uint64_t seed);

// Multivariate thinning: each accepted event receives a mark drawn
// proportionally to the per-dimension intensities. When `history` is given
// the simulation continues it on (t_start, t_start + horizon].
EventSequence sample_thinning(const MultiHawkes& m, double horizon, std::uint64_t seed,
                              const EventSequence* history = nullptr, double t_start = 0.0);

}  // namespace twinpp::ppsim
