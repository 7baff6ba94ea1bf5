#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "twinpp/model/network.hpp"
#include "twinpp/taxonomy.hpp"

namespace twinpp::train {

// Which cross-entropy terms the run optimizes. Disabled terms get
// exactly-zero weights.
enum class LossMode { Joint, MainOnly, SubOnly };

std::string to_string(LossMode m);
LossMode loss_mode_from_string(const std::string& s);

struct TrainConfig {
    double learning_rate = 1e-3;
    double rms_decay = 0.9;
    double rms_eps = 1e-8;
    int batch_size = 32;
    int max_epochs = 30;
    int patience = 5;  // epochs without validation improvement before stopping
    std::uint64_t rng_seed = 42;
    double grad_clip_norm = 5.0;
    int threads = 1;
    LossMode loss_mode = LossMode::Joint;

    void validate() const;
    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& doc);
};

// Per-parameter running mean-square cache for RMSprop.
struct OptimizerState {
    std::map<std::string, num::Mat> cache;
    void init(const num::ParamStore& params);
};

// Inverse-frequency weights: weight_k = N_total / n_k, normalized so the
// mean weight is 1. A class with no training occurrences is an error
// naming the class (unless its loss term is disabled).
model::ClassWeights compute_class_weights(const std::vector<model::Sample>& samples,
                                          const Taxonomy& taxonomy,
                                          LossMode mode = LossMode::Joint);

// cache <- rho*cache + (1-rho)*g^2; param <- param - lr*g/(sqrt(cache)+eps);
// gradients are zeroed afterwards. Throws on non-finite gradients.
void rmsprop_step(num::ParamStore& params, OptimizerState& state, const TrainConfig& cfg);

// Scales gradients so the global norm is at most max_norm; returns the
// pre-clip norm.
double clip_gradients(num::ParamStore& params, double max_norm);

struct EpochStat {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainResult {
    std::vector<EpochStat> curve;  // entry 0 is the untrained model
    int best_epoch = 0;
    double best_val_loss = 0.0;
    model::ClassWeights weights;
};

// End-to-end loop: deterministic shuffling from (rng_seed, epoch),
// mini-batch mean loss, gradient clipping, RMSprop, early stopping on
// validation loss. The model is (re)initialized from cfg.rng_seed and left
// holding the parameters of the best validation epoch.
TrainResult train(model::TwinRnn& m, const std::vector<model::Sample>& train_set,
                  const std::vector<model::Sample>& val_set, const Taxonomy& taxonomy,
                  const TrainConfig& cfg);

// Mean loss over a set with fixed parameters.
double mean_loss(const model::TwinRnn& m, const std::vector<model::Sample>& set,
                 const model::ClassWeights& w, int threads = 1);

}  // namespace twinpp::train
