#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "twinpp/data/event_log.hpp"
#include "twinpp/numcore/rng.hpp"
#include "twinpp/ppsim/diagnostics.hpp"
#include "twinpp/ppsim/intensity.hpp"
#include "twinpp/ppsim/synthetic.hpp"
#include "twinpp/ppsim/thinning.hpp"

using namespace twinpp;
using ppsim::EventSequence;
using ppsim::IntensityModel;

namespace {

EventSequence history_of(std::vector<double> times) {
    EventSequence s;
    s.times = std::move(times);
    s.marks.assign(s.times.size(), 0);
    s.horizon = s.times.empty() ? 0.0 : s.times.back();
    return s;
}

// Composite-Simpson quadrature of the exact intensity, split at event
// times where the integrand has kinks. Independent of compensator_at.
double quad_compensator(const IntensityModel& m, double t_end, const EventSequence& history) {
    std::vector<double> cuts{0.0};
    for (double ti : history.times)
        if (ti > 0.0 && ti < t_end) cuts.push_back(ti);
    cuts.push_back(t_end);

    // Left segment endpoints sit on a kink: nudge the evaluation just past
    // it so the event at the endpoint counts as history.
    auto eval = [&](double x) {
        EventSequence pre;
        for (double ti : history.times)
            if (ti < x) pre.times.push_back(ti);
        return ppsim::intensity_at(m, x, pre);
    };

    double acc = 0.0;
    for (std::size_t s = 1; s < cuts.size(); ++s) {
        const double a = cuts[s - 1], b = cuts[s];
        const int n = 2000;  // even
        const double h = (b - a) / n;
        double sum = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = i == 0 ? a + 1e-9 * (b - a) : a + h * i;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            sum += w * eval(x);
        }
        acc += sum * h / 3.0;
    }
    return acc;
}

}  // namespace

TEST_CASE("intensity_at: Table-1 closed forms") {
    const auto hist = history_of({1.0});

    CHECK(ppsim::intensity_at(ppsim::Poisson{2.0}, 5.0, hist) == 2.0);
    CHECK(ppsim::intensity_at(ppsim::Poisson{2.0}, 5.0, history_of({})) == 2.0);

    const double hawkes = ppsim::intensity_at(ppsim::Hawkes{0.5, 0.8, 1.0}, 2.0, hist);
    CHECK(hawkes == doctest::Approx(0.5 + 0.8 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(hawkes == doctest::Approx(0.79430).epsilon(1e-5));

    CHECK(ppsim::intensity_at(ppsim::SelfCorrecting{1.0, 0.2}, 0.0, history_of({})) == 1.0);

    // Reinforced: gamma(t) * count of prior events.
    ppsim::ReinforcedPoisson rp{ppsim::PiecewiseLinear::constant(0.3)};
    CHECK(ppsim::intensity_at(rp, 4.0, history_of({1.0, 2.0, 3.0})) == doctest::Approx(0.9));

    // Reactive clamps at zero when inhibition dominates.
    ppsim::Reactive reactive{0.0, 0.1, 1.0, 5.0, 0.5};
    CHECK(ppsim::intensity_at(reactive, 1.5, hist) == 0.0);

    // Time-varying Poisson interpolates its table.
    ppsim::TimeVaryingPoisson tv{ppsim::PiecewiseLinear{{0.0, 10.0}, {1.0, 3.0}}};
    CHECK(ppsim::intensity_at(tv, 5.0, history_of({})) == doctest::Approx(2.0));

    CHECK_THROWS(ppsim::intensity_at(ppsim::Poisson{2.0}, 5.0, history_of({3.0, 2.0})));
    CHECK_THROWS(ppsim::intensity_at(ppsim::Poisson{2.0}, 0.5, hist));  // history not before t
}

TEST_CASE("reinforced intensity is nondecreasing in event count at fixed t") {
    ppsim::ReinforcedPoisson rp{ppsim::PiecewiseLinear{{0.0, 50.0}, {0.4, 0.1}}};
    double prev = -1.0;
    for (std::size_t n = 0; n <= 6; ++n) {
        std::vector<double> times;
        for (std::size_t i = 0; i < n; ++i) times.push_back(1.0 + static_cast<double>(i));
        const double lam = ppsim::intensity_at(rp, 10.0, history_of(times));
        CHECK(lam >= prev);
        prev = lam;
    }
}

TEST_CASE("compensator matches quadrature for every family") {
    const auto hist = history_of({0.7, 2.3, 4.1});
    const double t_end = 6.0;

    const std::vector<IntensityModel> models{
        ppsim::Poisson{1.3},
        ppsim::TimeVaryingPoisson{ppsim::PiecewiseLinear{{0.0, 3.0, 6.0}, {0.5, 2.0, 1.0}}},
        ppsim::ReinforcedPoisson{ppsim::PiecewiseLinear{{0.0, 6.0}, {0.5, 0.2}}},
        ppsim::Hawkes{0.4, 0.7, 1.3},
        ppsim::Reactive{0.6, 0.5, 1.0, 0.2, 2.0},  // stays positive for this history
        ppsim::SelfCorrecting{0.4, 0.3}};

    for (const auto& m : models) {
        const double exact = ppsim::compensator_at(m, t_end, hist);
        const double numeric = quad_compensator(m, t_end, hist);
        CHECK(exact == doctest::Approx(numeric).epsilon(1e-6));
    }
}

TEST_CASE("thinning: empty horizon, determinism, ordering") {
    const IntensityModel m = ppsim::Hawkes{0.5, 0.8, 1.0};
    CHECK(ppsim::sample_thinning(m, 0.0, 9).times.empty());

    const auto a = ppsim::sample_thinning(m, 200.0, 4242);
    const auto b = ppsim::sample_thinning(m, 200.0, 4242);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i) CHECK(a.times[i] == b.times[i]);
    CHECK_NOTHROW(a.validate_sorted());
    CHECK_FALSE(a.times.empty());

    const auto c = ppsim::sample_thinning(m, 200.0, 4243);
    CHECK(a.times != c.times);
}

TEST_CASE("thinning: Poisson count statistics within 3 sigma") {
    const auto seq = ppsim::sample_thinning(ppsim::Poisson{2.0}, 1000.0, 1);
    const double n = static_cast<double>(seq.times.size());
    CHECK(std::fabs(n - 2000.0) <= 3.0 * std::sqrt(2000.0));
}

TEST_CASE("thinning: Hawkes stationary rate within 3 sigma") {
    const double mu = 0.5, alpha = 0.8, beta = 1.0, horizon = 2000.0;
    const auto seq = ppsim::sample_thinning(ppsim::Hawkes{mu, alpha, beta}, horizon, 7);
    const double rho = alpha / beta;
    const double mean = horizon * mu / (1.0 - rho);
    // Asymptotic count variance of a stationary exponential Hawkes process.
    const double var = horizon * mu / std::pow(1.0 - rho, 3);
    CHECK(std::fabs(static_cast<double>(seq.times.size()) - mean) <= 3.0 * std::sqrt(var));
}

TEST_CASE("thinning: reinforced process with no seed events stays empty") {
    ppsim::ReinforcedPoisson rp{ppsim::PiecewiseLinear::constant(0.5)};
    CHECK(ppsim::sample_thinning(rp, 100.0, 3).times.empty());
}

TEST_CASE("thinning: self-correcting and reactive run and stay sorted") {
    const auto sc = ppsim::sample_thinning(ppsim::SelfCorrecting{1.0, 0.2}, 20.0, 11);
    CHECK_FALSE(sc.times.empty());
    CHECK_NOTHROW(sc.validate_sorted());

    // Inhibition decaying faster than excitation: intensity can rise
    // between events, the bound must still hold (no assertion fires).
    // Net branching a1/b1 - a2/b2 = 0.8 - 0.2 keeps the process stable.
    const auto re = ppsim::sample_thinning(ppsim::Reactive{0.4, 0.4, 0.5, 1.0, 5.0}, 300.0, 13);
    CHECK_FALSE(re.times.empty());
    CHECK_NOTHROW(re.validate_sorted());
}

TEST_CASE("time rescaling: KS test passes at 1% for Poisson and Hawkes") {
    {
        const auto seq = ppsim::sample_thinning(ppsim::Poisson{2.0}, 600.0, 21);
        const auto u = ppsim::rescaled_intervals(ppsim::Poisson{2.0}, seq);
        CHECK(ppsim::ks_statistic_exp1(u) < ppsim::ks_critical_value(u.size(), 0.01));
    }
    {
        const ppsim::Hawkes h{0.5, 0.8, 1.0};
        const auto seq = ppsim::sample_thinning(h, 500.0, 22);
        const auto u = ppsim::rescaled_intervals(h, seq);
        REQUIRE(u.size() > 500);
        CHECK(ppsim::ks_statistic_exp1(u) < ppsim::ks_critical_value(u.size(), 0.01));
    }
    // Misspecification is detected: Poisson residuals under a wrong rate fail.
    {
        const auto seq = ppsim::sample_thinning(ppsim::Poisson{2.0}, 600.0, 23);
        const auto u = ppsim::rescaled_intervals(ppsim::Poisson{1.0}, seq);
        CHECK(ppsim::ks_statistic_exp1(u) > ppsim::ks_critical_value(u.size(), 0.01));
    }
}

TEST_CASE("multivariate thinning assigns in-range marks and honors history") {
    ppsim::MultiHawkes m;
    m.mu = {0.2, 0.1};
    m.A = {{0.3, 0.2}, {0.1, 0.4}};
    m.beta = 1.0;
    CHECK(m.branching_bound() < 1.0);

    const auto seq = ppsim::sample_thinning(m, 500.0, 5);
    CHECK_FALSE(seq.times.empty());
    for (int mark : seq.marks) {
        CHECK(mark >= 0);
        CHECK(mark < 2);
    }
    bool saw[2] = {false, false};
    for (int mark : seq.marks) saw[mark] = true;
    CHECK(saw[0]);
    CHECK(saw[1]);

    // Continuation after history starts strictly later.
    EventSequence hist;
    hist.times = {1.0, 2.0};
    hist.marks = {0, 1};
    const auto cont = ppsim::sample_thinning(m, 50.0, 6, &hist, 2.0);
    for (double t : cont.times) CHECK(t > 2.0);
}

TEST_CASE("multivariate intensity matches the direct kernel sum") {
    ppsim::MultiHawkes m;
    m.mu = {0.2, 0.1};
    m.A = {{0.3, 0.2}, {0.1, 0.4}};
    m.beta = 1.5;
    EventSequence hist;
    hist.times = {1.0, 2.5};
    hist.marks = {1, 0};
    const double t = 3.0;
    const double expected0 = 0.2 + 0.2 * std::exp(-1.5 * 2.0) + 0.3 * std::exp(-1.5 * 0.5);
    CHECK(ppsim::multi_intensity_at(m, 0, t, hist) == doctest::Approx(expected0).epsilon(1e-14));
}

TEST_CASE("synthetic dataset: count statistics, round trip, determinism") {
    ppsim::SyntheticSpec spec;
    spec.n_entities = 2;
    spec.horizon_days = 70.0;
    spec.profile_effect = false;
    spec.taxonomy.main_names = {"a", "b"};
    spec.taxonomy.sub_names = {"a1", "b1"};
    spec.taxonomy.sub_parent = {0, 1};
    spec.generator.mu = {0.5, 0.5};  // total rate 1/day
    spec.generator.A = {{0.0, 0.0}, {0.0, 0.0}};
    spec.generator.beta = 1.0;

    const auto ds = ppsim::make_synthetic_dataset(spec, 17);
    const double n = static_cast<double>(ds.events.size());
    CHECK(std::fabs(n - 140.0) <= 3.0 * std::sqrt(140.0));

    // Round trip through the data module.
    std::stringstream stream(data::to_jsonl(ds.events, ds.taxonomy));
    const auto parsed = data::parse_event_log(stream, ds.taxonomy);
    CHECK(parsed.records.size() == ds.events.size());
    CHECK(parsed.duplicates_removed == 0);

    // Byte-identical rerun.
    const auto again = ppsim::make_synthetic_dataset(spec, 17);
    CHECK(data::to_jsonl(again.events, again.taxonomy) == data::to_jsonl(ds.events, ds.taxonomy));
    CHECK(again.manifest.dump() == ds.manifest.dump());

    // Different seed differs.
    const auto other = ppsim::make_synthetic_dataset(spec, 18);
    CHECK(data::to_jsonl(other.events, other.taxonomy) != data::to_jsonl(ds.events, ds.taxonomy));
}

TEST_CASE("default synthetic spec mirrors the two-level 7-subtype taxonomy") {
    const auto spec = ppsim::SyntheticSpec::default_spec();
    CHECK(spec.taxonomy.k_main() == 2);
    CHECK(spec.taxonomy.k_sub() == 7);
    CHECK(spec.generator.dims() == 7);
    CHECK(spec.generator.branching_bound() < 1.0);
    int error_subs = 0;
    for (int p : spec.taxonomy.sub_parent)
        if (p == 1) error_subs++;
    CHECK(error_subs == 6);
}

TEST_CASE("synthetic spec validation") {
    ppsim::SyntheticSpec bad = ppsim::SyntheticSpec::default_spec();
    bad.generator.mu.pop_back();  // dims mismatch
    CHECK_THROWS(ppsim::make_synthetic_dataset(bad, 1));

    ppsim::SyntheticSpec tiny;
    tiny.taxonomy.main_names = {"a", "b"};
    tiny.taxonomy.sub_names = {"only"};
    tiny.taxonomy.sub_parent = {0};
    tiny.generator.mu = {1.0};
    tiny.generator.A = {{0.0}};
    CHECK_THROWS(ppsim::make_synthetic_dataset(tiny, 1));  // 2 mains need >= 2 dims
}
