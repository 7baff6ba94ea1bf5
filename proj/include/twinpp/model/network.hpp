#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "twinpp/model/config.hpp"
#include "twinpp/model/lstm.hpp"
#include "twinpp/numcore/param_store.hpp"

namespace twinpp::model {

// The conditional-intensity network: an LSTM over the time-series window,
// an LSTM over the event window, a tanh fusion embedding and three output
// heads (main type, subtype, time gap). Degraded variants keep a single
// stream; the fusion layer then reads that stream's final hidden state
// alone.
class TwinRnn {
public:
    explicit TwinRnn(ModelConfig cfg);

    TwinRnn(const TwinRnn&) = delete;
    TwinRnn& operator=(const TwinRnn&) = delete;

    // Uniform [-0.08, 0.08] for all weights; forget-gate biases shifted +1.
    void init_params(std::uint64_t seed);

    // Fresh network with the same config and copied parameter values.
    std::unique_ptr<TwinRnn> clone() const;

    struct Output {
        num::Vec main_probs, main_logp;
        num::Vec sub_probs, sub_logp;
        double s_hat = 0.0;
    };

    struct Prediction {
        int main_type = 0;
        int sub_type = 0;
        double gap_days = 0.0;  // clamped to >= 0
    };

    Output forward(const Sample& s) const;

    double loss(const Output& out, const Sample& s, const ClassWeights& w) const;

    // Forward + loss + BPTT; gradients accumulate (+=) into the store.
    double loss_and_backward(const Sample& s, const ClassWeights& w);

    Prediction predict_next(const Sample& s) const;

    num::ParamStore& params() { return store_; }
    const num::ParamStore& params() const { return store_; }
    const ModelConfig& config() const { return cfg_; }

    // Rebuilds tensor views after loading values into the store.
    static std::unique_ptr<TwinRnn> from_store(ModelConfig cfg, const num::ParamStore& values);

private:
    struct Trace;
    Output forward_impl(const Sample& s, Trace* trace) const;
    void validate_sample(const Sample& s) const;
    std::vector<num::Vec> event_inputs(const Sample& s,
                                       std::vector<num::Vec>* raw_tokens) const;

    ModelConfig cfg_;
    num::ParamStore store_;
    bool has_ts_ = false, has_ev_ = false;
    LstmParams ts_lstm_{}, ev_lstm_{};
    num::Tensor* ev_proj_ = nullptr;  // event_embed_dim x event_input_dim, optional
    num::Tensor *fuse_W_ = nullptr, *fuse_b_ = nullptr;
    num::Tensor *main_W_ = nullptr, *main_b_ = nullptr;
    num::Tensor *sub_W_ = nullptr, *sub_b_ = nullptr;
    num::Tensor *time_W_ = nullptr, *time_b_ = nullptr;
};

}  // namespace twinpp::model
