#include "twinpp/model/network.hpp"

#include <cmath>
#include <stdexcept>

#include "twinpp/numcore/rng.hpp"

namespace twinpp::model {

using num::Mat;
using num::Vec;

struct TwinRnn::Trace {
    std::vector<LstmStepTrace> ts_steps, ev_steps;
    std::vector<Vec> ev_raw;     // raw one-hot+dt tokens (projection input)
    std::vector<Vec> ev_inputs;  // what the event LSTM consumed
    Vec h_ts, h_ev;
    Vec fusion_in;
    Vec embed;     // e = tanh(...)
    Vec sub_in;    // e, or [e; main_probs] in hierarchical mode
};

TwinRnn::TwinRnn(ModelConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const auto h = cfg_.hidden_dim;
    has_ts_ = cfg_.variant != Variant::Event;
    has_ev_ = cfg_.variant != Variant::TimeSeries;

    if (has_ts_)
        ts_lstm_ = LstmParams::create(store_, "y.", cfg_.ts_feature_dim, h, cfg_.dense_peephole);
    if (has_ev_) {
        if (cfg_.event_embed_dim > 0)
            ev_proj_ = &store_.add("z.P", static_cast<std::size_t>(cfg_.event_embed_dim),
                                   static_cast<std::size_t>(cfg_.event_input_dim()));
        ev_lstm_ = LstmParams::create(store_, "z.", cfg_.event_lstm_input_dim(), h,
                                      cfg_.dense_peephole);
    }

    const auto e = static_cast<std::size_t>(cfg_.embed_dim);
    fuse_W_ = &store_.add("fuse.W", e, static_cast<std::size_t>(cfg_.fusion_input_dim()));
    fuse_b_ = &store_.add("fuse.b", e, 1);
    main_W_ = &store_.add("head.main.W", static_cast<std::size_t>(cfg_.k_main), e);
    main_b_ = &store_.add("head.main.b", static_cast<std::size_t>(cfg_.k_main), 1);
    const std::size_t sub_in =
        cfg_.head_mode == HeadMode::Hierarchical ? e + static_cast<std::size_t>(cfg_.k_main) : e;
    sub_W_ = &store_.add("head.sub.W", static_cast<std::size_t>(cfg_.k_sub), sub_in);
    sub_b_ = &store_.add("head.sub.b", static_cast<std::size_t>(cfg_.k_sub), 1);
    time_W_ = &store_.add("head.time.W", 1, e);
    time_b_ = &store_.add("head.time.b", 1, 1);
}

void TwinRnn::init_params(std::uint64_t seed) {
    num::Rng rng(seed);
    for (const auto& name : store_.names()) {
        Mat& v = store_.at(name).value;
        for (std::size_t i = 0; i < v.size(); ++i) v.data()[i] = rng.uniform(-0.08, 0.08);
    }
    for (const char* fb : {"y.b_f", "z.b_f"}) {
        if (!store_.contains(fb)) continue;
        Mat& v = store_.at(fb).value;
        for (std::size_t i = 0; i < v.size(); ++i) v.data()[i] += 1.0;
    }
}

std::unique_ptr<TwinRnn> TwinRnn::clone() const {
    auto copy = std::make_unique<TwinRnn>(cfg_);
    copy->store_.assign_values(store_);
    return copy;
}

std::unique_ptr<TwinRnn> TwinRnn::from_store(ModelConfig cfg, const num::ParamStore& values) {
    auto m = std::make_unique<TwinRnn>(std::move(cfg));
    m->store_.assign_values(values);
    return m;
}

void TwinRnn::validate_sample(const Sample& s) const {
    if (has_ts_) {
        if (s.ts_window.empty()) throw std::invalid_argument("sample: empty time-series window");
        for (const auto& v : s.ts_window) {
            if (v.size() != static_cast<std::size_t>(cfg_.ts_feature_dim))
                throw std::invalid_argument("sample: ts feature dimension mismatch");
            num::check_finite(v, "ts feature");
        }
    }
    if (has_ev_) {
        if (s.event_window.empty()) throw std::invalid_argument("sample: empty event window");
        for (const auto& tok : s.event_window) {
            // k_sub is the reserved null pad id.
            if (tok.type_id < 0 || tok.type_id > cfg_.k_sub)
                throw std::invalid_argument("sample: unknown event type id " +
                                            std::to_string(tok.type_id));
            if (!(tok.dt >= 0.0) || !std::isfinite(tok.dt))
                throw std::invalid_argument("sample: bad event dt");
        }
    }
}

std::vector<Vec> TwinRnn::event_inputs(const Sample& s, std::vector<Vec>* raw_tokens) const {
    std::vector<Vec> inputs;
    inputs.reserve(s.event_window.size());
    if (raw_tokens != nullptr) raw_tokens->clear();
    for (const auto& tok : s.event_window) {
        Vec raw(static_cast<std::size_t>(cfg_.event_input_dim()), 0.0);
        raw[static_cast<std::size_t>(tok.type_id)] = 1.0;
        raw[raw.size() - 1] = tok.dt;
        if (ev_proj_ != nullptr) {
            if (raw_tokens != nullptr) raw_tokens->push_back(raw);
            inputs.push_back(num::matvec(ev_proj_->value, raw));
        } else {
            inputs.push_back(std::move(raw));
        }
    }
    return inputs;
}

TwinRnn::Output TwinRnn::forward_impl(const Sample& s, Trace* trace) const {
    validate_sample(s);
    Trace local;
    Trace& tr = trace != nullptr ? *trace : local;

    if (has_ts_) tr.h_ts = lstm_forward(ts_lstm_, s.ts_window, tr.ts_steps);
    if (has_ev_) {
        tr.ev_inputs = event_inputs(s, ev_proj_ != nullptr ? &tr.ev_raw : nullptr);
        tr.h_ev = lstm_forward(ev_lstm_, tr.ev_inputs, tr.ev_steps);
    }

    if (has_ts_ && has_ev_) {
        tr.fusion_in = num::concat(tr.h_ts, tr.h_ev);
    } else {
        tr.fusion_in = has_ts_ ? tr.h_ts : tr.h_ev;
    }

    Vec z = num::matvec(fuse_W_->value, tr.fusion_in);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += fuse_b_->value.data()[k];
    tr.embed = num::tanh_v(z);

    Output out;
    Vec main_logits = num::matvec(main_W_->value, tr.embed);
    for (std::size_t k = 0; k < main_logits.size(); ++k) main_logits[k] += main_b_->value.data()[k];
    out.main_probs = num::softmax(main_logits);
    out.main_logp = num::log_softmax(main_logits);

    tr.sub_in = cfg_.head_mode == HeadMode::Hierarchical ? num::concat(tr.embed, out.main_probs)
                                                         : tr.embed;
    Vec sub_logits = num::matvec(sub_W_->value, tr.sub_in);
    for (std::size_t k = 0; k < sub_logits.size(); ++k) sub_logits[k] += sub_b_->value.data()[k];
    out.sub_probs = num::softmax(sub_logits);
    out.sub_logp = num::log_softmax(sub_logits);

    double acc = 0.0;
    for (std::size_t k = 0; k < tr.embed.size(); ++k) acc += time_W_->value.data()[k] * tr.embed[k];
    out.s_hat = acc + time_b_->value.data()[0];
    return out;
}

TwinRnn::Output TwinRnn::forward(const Sample& s) const { return forward_impl(s, nullptr); }

double TwinRnn::loss(const Output& out, const Sample& s, const ClassWeights& w) const {
    if (w.main.size() != static_cast<std::size_t>(cfg_.k_main) ||
        w.sub.size() != static_cast<std::size_t>(cfg_.k_sub))
        throw std::invalid_argument("loss: class weight length mismatch");
    if (s.target_main < 0 || s.target_main >= cfg_.k_main || s.target_sub < 0 ||
        s.target_sub >= cfg_.k_sub)
        throw std::invalid_argument("loss: target id out of range");
    const double ce_main =
        -w.main[static_cast<std::size_t>(s.target_main)] *
        out.main_logp[static_cast<std::size_t>(s.target_main)];
    const double ce_sub = -w.sub[static_cast<std::size_t>(s.target_sub)] *
                          out.sub_logp[static_cast<std::size_t>(s.target_sub)];
    return ce_main + ce_sub + time_penalty(s.target_gap, out.s_hat, cfg_.sigma2);
}

double TwinRnn::loss_and_backward(const Sample& s, const ClassWeights& w) {
    Trace tr;
    Output out = forward_impl(s, &tr);
    const double loss_value = loss(out, s, w);

    const auto e_dim = static_cast<std::size_t>(cfg_.embed_dim);
    const auto k_main = static_cast<std::size_t>(cfg_.k_main);
    const auto k_sub = static_cast<std::size_t>(cfg_.k_sub);

    // Subtype head: weighted cross-entropy through the fused log-softmax.
    Vec d_sub_logits(k_sub);
    const double w_sub = w.sub[static_cast<std::size_t>(s.target_sub)];
    for (std::size_t k = 0; k < k_sub; ++k) {
        d_sub_logits[k] = w_sub * (out.sub_probs[k] -
                                   (k == static_cast<std::size_t>(s.target_sub) ? 1.0 : 0.0));
    }
    num::outer_acc(d_sub_logits, tr.sub_in, sub_W_->grad);
    for (std::size_t k = 0; k < k_sub; ++k) sub_b_->grad.data()[k] += d_sub_logits[k];
    Vec d_sub_in = num::matvec_t(sub_W_->value, d_sub_logits);

    Vec d_embed(e_dim, 0.0);
    for (std::size_t k = 0; k < e_dim; ++k) d_embed[k] += d_sub_in[k];

    // Main head: cross-entropy plus, in hierarchical mode, the path through
    // the probability vector feeding the subtype head.
    Vec d_main_logits(k_main);
    const double w_main = w.main[static_cast<std::size_t>(s.target_main)];
    for (std::size_t k = 0; k < k_main; ++k) {
        d_main_logits[k] = w_main * (out.main_probs[k] -
                                     (k == static_cast<std::size_t>(s.target_main) ? 1.0 : 0.0));
    }
    if (cfg_.head_mode == HeadMode::Hierarchical) {
        Vec d_main_probs(k_main);
        for (std::size_t k = 0; k < k_main; ++k) d_main_probs[k] = d_sub_in[e_dim + k];
        double inner = 0.0;
        for (std::size_t k = 0; k < k_main; ++k) inner += out.main_probs[k] * d_main_probs[k];
        for (std::size_t k = 0; k < k_main; ++k)
            d_main_logits[k] += out.main_probs[k] * (d_main_probs[k] - inner);
    }
    num::outer_acc(d_main_logits, tr.embed, main_W_->grad);
    for (std::size_t k = 0; k < k_main; ++k) main_b_->grad.data()[k] += d_main_logits[k];
    num::matvec_t_acc(main_W_->value, d_main_logits, d_embed);

    // Time head.
    const double d_s = (out.s_hat - s.target_gap) / cfg_.sigma2;
    for (std::size_t k = 0; k < e_dim; ++k) {
        time_W_->grad.data()[k] += d_s * tr.embed[k];
        d_embed[k] += d_s * time_W_->value.data()[k];
    }
    time_b_->grad.data()[0] += d_s;

    // Fusion tanh.
    Vec d_fuse_z(e_dim);
    for (std::size_t k = 0; k < e_dim; ++k)
        d_fuse_z[k] = d_embed[k] * (1.0 - tr.embed[k] * tr.embed[k]);
    num::outer_acc(d_fuse_z, tr.fusion_in, fuse_W_->grad);
    for (std::size_t k = 0; k < e_dim; ++k) fuse_b_->grad.data()[k] += d_fuse_z[k];
    Vec d_fusion_in = num::matvec_t(fuse_W_->value, d_fuse_z);

    const auto h_dim = static_cast<std::size_t>(cfg_.hidden_dim);
    if (has_ts_) {
        Vec d_h_ts(h_dim);
        for (std::size_t k = 0; k < h_dim; ++k) d_h_ts[k] = d_fusion_in[k];
        lstm_backward(ts_lstm_, tr.ts_steps, d_h_ts);
    }
    if (has_ev_) {
        const std::size_t off = has_ts_ ? h_dim : 0;
        Vec d_h_ev(h_dim);
        for (std::size_t k = 0; k < h_dim; ++k) d_h_ev[k] = d_fusion_in[off + k];
        if (ev_proj_ != nullptr) {
            std::vector<Vec> d_inputs;
            lstm_backward(ev_lstm_, tr.ev_steps, d_h_ev, &d_inputs);
            for (std::size_t t = 0; t < d_inputs.size(); ++t)
                num::outer_acc(d_inputs[t], tr.ev_raw[t], ev_proj_->grad);
        } else {
            lstm_backward(ev_lstm_, tr.ev_steps, d_h_ev);
        }
    }
    return loss_value;
}

TwinRnn::Prediction TwinRnn::predict_next(const Sample& s) const {
    const Output out = forward(s);
    Prediction p;
    p.main_type = static_cast<int>(num::argmax(out.main_probs));
    p.sub_type = static_cast<int>(num::argmax(out.sub_probs));
    p.gap_days = out.s_hat < 0.0 ? 0.0 : out.s_hat;
    return p;
}

}  // namespace twinpp::model
