#include "twinpp/ppsim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "twinpp/numcore/param_store.hpp"
#include "twinpp/numcore/rng.hpp"
#include "twinpp/ppsim/thinning.hpp"

namespace twinpp::ppsim {

void SyntheticSpec::validate() const {
    generator.validate();
    taxonomy.validate();
    if (n_entities < 1) throw std::invalid_argument("synthetic spec: n_entities must be >= 1");
    if (horizon_days < 0.0) throw std::invalid_argument("synthetic spec: negative horizon");
    if (taxonomy.k_sub() != generator.dims())
        throw std::invalid_argument("synthetic spec: taxonomy size must match generator dims");
    if (taxonomy.k_main() >= 2 && generator.dims() < 2)
        throw std::invalid_argument(
            "synthetic spec: hierarchical evaluation needs at least 2 dimensions");
}

SyntheticSpec SyntheticSpec::default_spec() {
    SyntheticSpec spec;
    spec.taxonomy = Taxonomy::default_two_level();
    const int d = spec.taxonomy.k_sub();  // 7: ticket + six error subtypes

    MultiHawkes gen;
    gen.beta = 2.4;  // roughly half-day excitation memory
    gen.mu = {0.010, 0.016, 0.016, 0.016, 0.016, 0.016, 0.016};
    gen.A.assign(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d), 0.0));
    // Error subtypes excite each other in a cycle, and the two tail
    // subtypes raise tickets; tickets themselves are terminal.
    for (int j = 1; j < d; ++j) {
        const int next = j == d - 1 ? 1 : j + 1;
        gen.A[static_cast<std::size_t>(next)][static_cast<std::size_t>(j)] = 1.60;
    }
    gen.A[0][5] = 0.25;
    gen.A[0][6] = 0.25;
    spec.generator = gen;
    return spec;
}

namespace {

// Deterministic profile draw; the first feature doubles as the rate
// multiplier source when profile_effect is set.
data::ProfileRecord make_profile(const std::string& entity, num::Rng& rng) {
    data::ProfileRecord p;
    p.entity_id = entity;
    const double model_code = static_cast<double>(rng.integer(5));
    const double age_years = std::floor(rng.uniform(0.0, 10.0) * 100.0) / 100.0;
    const double location_code = static_cast<double>(rng.integer(10));
    p.features = {model_code, age_years, location_code};
    return p;
}

double rate_multiplier(const data::ProfileRecord& p) {
    // Older units and higher model codes fail slightly more often.
    return 0.8 + 0.05 * p.features[0] + 0.015 * p.features[1];
}

}  // namespace

SyntheticDataset make_synthetic_dataset(const SyntheticSpec& spec, std::uint64_t seed,
                                        int threads) {
    spec.validate();
    SyntheticDataset out;
    out.taxonomy = spec.taxonomy;
    out.profiles.feature_names = {"model_code", "age_years", "location_code"};

    const int n = spec.n_entities;
    std::vector<std::string> names(static_cast<std::size_t>(n));
    std::vector<data::ProfileRecord> profiles(static_cast<std::size_t>(n));
    std::vector<double> multipliers(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) {
        std::string id = std::to_string(i);
        while (id.size() < 4) id.insert(id.begin(), '0');
        names[static_cast<std::size_t>(i)] = spec.entity_prefix + id;
        num::Rng rng(num::Rng::mix(seed, 0xA000 + static_cast<std::uint64_t>(i)));
        profiles[static_cast<std::size_t>(i)] = make_profile(names[static_cast<std::size_t>(i)], rng);
        if (spec.profile_effect)
            multipliers[static_cast<std::size_t>(i)] =
                rate_multiplier(profiles[static_cast<std::size_t>(i)]);
    }

    std::vector<EventSequence> sequences(static_cast<std::size_t>(n));
    auto simulate_range = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            MultiHawkes gen = spec.generator;
            for (auto& mu : gen.mu) mu *= multipliers[static_cast<std::size_t>(i)];
            sequences[static_cast<std::size_t>(i)] = sample_thinning(
                gen, spec.horizon_days, num::Rng::mix(seed, static_cast<std::uint64_t>(i)));
        }
    };
    int n_threads = threads;
    if (n_threads <= 0)
        n_threads = static_cast<int>(
            std::min(4u, std::max(1u, std::thread::hardware_concurrency())));
    if (n >= 32 && n_threads > 1) {
        std::vector<std::thread> pool;
        const int chunk = (n + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(simulate_range, t * chunk, std::min(n, (t + 1) * chunk));
        for (auto& th : pool) th.join();
    } else {
        simulate_range(0, n);
    }

    for (int i = 0; i < n; ++i) {
        const auto& seq = sequences[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < seq.times.size(); ++k) {
            data::EventLogRecord rec;
            rec.entity_id = names[static_cast<std::size_t>(i)];
            rec.timestamp = seq.times[k];
            rec.sub_type = seq.marks[k];
            rec.main_type = spec.taxonomy.sub_parent[static_cast<std::size_t>(seq.marks[k])];
            out.events.push_back(std::move(rec));
        }
        out.profiles.records.push_back(profiles[static_cast<std::size_t>(i)]);
    }
    std::sort(out.events.begin(), out.events.end(),
              [](const data::EventLogRecord& a, const data::EventLogRecord& b) {
                  if (a.entity_id != b.entity_id) return a.entity_id < b.entity_id;
                  return a.timestamp < b.timestamp;
              });

    out.manifest["format_version"] = num::kFormatVersion;
    out.manifest["seed"] = seed;
    out.manifest["n_entities"] = n;
    out.manifest["horizon_days"] = spec.horizon_days;
    out.manifest["generator"] = {{"mu", spec.generator.mu},
                                 {"A", spec.generator.A},
                                 {"beta", spec.generator.beta}};
    out.manifest["profile_effect"] = spec.profile_effect;
    out.manifest["rate_multipliers"] = multipliers;
    out.manifest["taxonomy"] = spec.taxonomy.to_json();
    return out;
}

}  // namespace twinpp::ppsim
