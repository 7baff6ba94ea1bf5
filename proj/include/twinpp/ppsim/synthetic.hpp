#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twinpp/data/event_log.hpp"
#include "twinpp/ppsim/intensity.hpp"
#include "twinpp/taxonomy.hpp"

namespace twinpp::ppsim {

// Recipe for a labeled synthetic corpus: one multivariate-Hawkes generator
// shared by all entities (A = 0 reduces it to independent Poisson streams),
// subtype dimensions mapped onto a two-level taxonomy, and per-entity
// profiles that optionally scale the base rates.
struct SyntheticSpec {
    int n_entities = 200;
    double horizon_days = 200.0;
    MultiHawkes generator;
    Taxonomy taxonomy;
    bool profile_effect = true;  // profiles scale mu per entity
    std::string entity_prefix = "atm-";

    void validate() const;

    // Default recipe: 7 subtype dimensions under 2 main types with a
    // cyclic excitation chain among the error subtypes.
    static SyntheticSpec default_spec();
};

struct SyntheticDataset {
    std::vector<data::EventLogRecord> events;  // sorted by (entity, time)
    data::ParsedProfiles profiles;
    Taxonomy taxonomy;
    nlohmann::json manifest;  // ground-truth generator parameters
};

// Deterministic per seed; each entity draws from an independent substream,
// so the result does not depend on `threads` (0 picks a hardware default).
SyntheticDataset make_synthetic_dataset(const SyntheticSpec& spec, std::uint64_t seed,
                                        int threads = 0);

}  // namespace twinpp::ppsim
