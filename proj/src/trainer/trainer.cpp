#include "twinpp/trainer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "twinpp/numcore/rng.hpp"

namespace twinpp::train {

using model::ClassWeights;
using model::Sample;
using model::TwinRnn;
using num::Mat;
using num::ParamStore;

std::string to_string(LossMode m) {
    switch (m) {
        case LossMode::Joint: return "joint";
        case LossMode::MainOnly: return "main-only";
        case LossMode::SubOnly: return "sub-only";
    }
    return "joint";
}

LossMode loss_mode_from_string(const std::string& s) {
    if (s == "joint") return LossMode::Joint;
    if (s == "main-only") return LossMode::MainOnly;
    if (s == "sub-only") return LossMode::SubOnly;
    throw std::invalid_argument("unknown loss mode: " + s);
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("train config: learning_rate must be > 0");
    if (!(rms_decay > 0.0 && rms_decay < 1.0))
        throw std::invalid_argument("train config: rms_decay must be in (0,1)");
    if (rms_eps <= 0.0) throw std::invalid_argument("train config: rms_eps must be > 0");
    if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("train config: max_epochs must be >= 1");
    if (patience < 0) throw std::invalid_argument("train config: patience must be >= 0");
    if (grad_clip_norm <= 0.0) throw std::invalid_argument("train config: grad_clip_norm must be > 0");
    if (threads < 1) throw std::invalid_argument("train config: threads must be >= 1");
}

nlohmann::json TrainConfig::to_json() const {
    return nlohmann::json{{"learning_rate", learning_rate},
                          {"rms_decay", rms_decay},
                          {"rms_eps", rms_eps},
                          {"batch_size", batch_size},
                          {"max_epochs", max_epochs},
                          {"patience", patience},
                          {"rng_seed", rng_seed},
                          {"grad_clip_norm", grad_clip_norm},
                          {"loss_mode", to_string(loss_mode)}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& doc) {
    TrainConfig cfg;
    cfg.learning_rate = doc.value("learning_rate", cfg.learning_rate);
    cfg.rms_decay = doc.value("rms_decay", cfg.rms_decay);
    cfg.rms_eps = doc.value("rms_eps", cfg.rms_eps);
    cfg.batch_size = doc.value("batch_size", cfg.batch_size);
    cfg.max_epochs = doc.value("max_epochs", cfg.max_epochs);
    cfg.patience = doc.value("patience", cfg.patience);
    cfg.rng_seed = doc.value("rng_seed", cfg.rng_seed);
    cfg.grad_clip_norm = doc.value("grad_clip_norm", cfg.grad_clip_norm);
    if (doc.contains("loss_mode")) cfg.loss_mode = loss_mode_from_string(doc.at("loss_mode"));
    return cfg;
}

void OptimizerState::init(const ParamStore& params) {
    cache.clear();
    for (const auto& name : params.names()) {
        const Mat& v = params.at(name).value;
        cache.emplace(name, Mat(v.rows(), v.cols(), 0.0));
    }
}

ClassWeights compute_class_weights(const std::vector<Sample>& samples, const Taxonomy& taxonomy,
                                   LossMode mode) {
    if (samples.empty()) throw std::invalid_argument("compute_class_weights: empty dataset");
    const auto k_main = static_cast<std::size_t>(taxonomy.k_main());
    const auto k_sub = static_cast<std::size_t>(taxonomy.k_sub());
    std::vector<std::size_t> n_main(k_main, 0), n_sub(k_sub, 0);
    for (const auto& s : samples) {
        n_main.at(static_cast<std::size_t>(s.target_main))++;
        n_sub.at(static_cast<std::size_t>(s.target_sub))++;
    }
    const double total = static_cast<double>(samples.size());

    auto inverse_freq = [&](const std::vector<std::size_t>& counts,
                            const std::vector<std::string>& names) {
        num::Vec w(counts.size());
        for (std::size_t k = 0; k < counts.size(); ++k) {
            if (counts[k] == 0)
                throw std::runtime_error("compute_class_weights: class '" + names[k] +
                                         "' absent from training data");
            w[k] = total / static_cast<double>(counts[k]);
        }
        double mean = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) mean += w[k];
        mean /= static_cast<double>(w.size());
        for (std::size_t k = 0; k < w.size(); ++k) w[k] /= mean;
        return w;
    };

    ClassWeights w;
    w.main = mode == LossMode::SubOnly ? num::Vec(k_main, 0.0)
                                       : inverse_freq(n_main, taxonomy.main_names);
    w.sub = mode == LossMode::MainOnly ? num::Vec(k_sub, 0.0)
                                       : inverse_freq(n_sub, taxonomy.sub_names);
    return w;
}

void rmsprop_step(ParamStore& params, OptimizerState& state, const TrainConfig& cfg) {
    const double rho = cfg.rms_decay;
    for (const auto& name : params.names()) {
        num::Tensor& t = params.at(name);
        Mat& c = state.cache.at(name);
        double* cp = c.data();
        double* vp = t.value.data();
        const double* gp = t.grad.data();
        for (std::size_t i = 0; i < t.value.size(); ++i) {
            if (!std::isfinite(gp[i]))
                throw std::runtime_error("rmsprop_step: non-finite gradient in " + name);
            cp[i] = rho * cp[i] + (1.0 - rho) * gp[i] * gp[i];
            vp[i] -= cfg.learning_rate * gp[i] / (std::sqrt(cp[i]) + cfg.rms_eps);
        }
    }
    params.zero_grads();
}

double clip_gradients(ParamStore& params, double max_norm) {
    const double norm = std::sqrt(params.grad_sq_norm());
    if (norm > max_norm && norm > 0.0) params.scale_grads(max_norm / norm);
    return norm;
}

namespace {

// Deterministic Fisher-Yates driven by (seed, epoch).
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed, int epoch) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    num::Rng rng(num::Rng::mix(seed, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = rng.integer(i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

// Accumulates losses and gradients for one batch chunk into a replica.
double backward_chunk(TwinRnn& replica, const std::vector<Sample>& set,
                      const std::vector<std::size_t>& order, std::size_t begin, std::size_t end,
                      const ClassWeights& w) {
    double loss_sum = 0.0;
    for (std::size_t k = begin; k < end; ++k) loss_sum += replica.loss_and_backward(set[order[k]], w);
    return loss_sum;
}

void add_grads(ParamStore& dst, const ParamStore& src) {
    for (const auto& name : dst.names()) {
        double* d = dst.at(name).grad.data();
        const Mat& s = src.at(name).grad;
        for (std::size_t i = 0; i < s.size(); ++i) d[i] += s.data()[i];
    }
}

}  // namespace

double mean_loss(const TwinRnn& m, const std::vector<Sample>& set, const ClassWeights& w,
                 int threads) {
    if (set.empty()) throw std::invalid_argument("mean_loss: empty set");
    if (threads <= 1 || set.size() < 64) {
        double acc = 0.0;
        for (const auto& s : set) acc += m.loss(m.forward(s), s, w);
        return acc / static_cast<double>(set.size());
    }
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(threads), set.size());
    std::vector<double> partial(n_threads, 0.0);
    std::vector<std::thread> pool;
    const std::size_t chunk = (set.size() + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(set.size(), lo + chunk);
            double acc = 0.0;
            for (std::size_t k = lo; k < hi; ++k) acc += m.loss(m.forward(set[k]), set[k], w);
            partial[t] = acc;
        });
    }
    for (auto& th : pool) th.join();
    double acc = 0.0;
    for (double p : partial) acc += p;  // fixed reduce order
    return acc / static_cast<double>(set.size());
}

TrainResult train(TwinRnn& m, const std::vector<Sample>& train_set,
                  const std::vector<Sample>& val_set, const Taxonomy& taxonomy,
                  const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.empty() || val_set.empty())
        throw std::invalid_argument("train: datasets must be non-empty");

    TrainResult result;
    result.weights = compute_class_weights(train_set, taxonomy, cfg.loss_mode);
    const ClassWeights& w = result.weights;

    m.init_params(cfg.rng_seed);
    OptimizerState opt;
    opt.init(m.params());
    m.params().zero_grads();

    auto best = m.clone();
    result.curve.push_back({0, mean_loss(m, train_set, w, cfg.threads),
                            mean_loss(m, val_set, w, cfg.threads)});
    result.best_epoch = 0;
    result.best_val_loss = result.curve[0].val_loss;

    std::vector<std::unique_ptr<TwinRnn>> replicas;
    const auto n_threads =
        static_cast<std::size_t>(std::max(1, std::min<int>(cfg.threads,
                                                           static_cast<int>(train_set.size()))));
    if (n_threads > 1)
        for (std::size_t t = 0; t < n_threads; ++t) replicas.push_back(m.clone());

    int epochs_without_improvement = 0;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto order = shuffled_indices(train_set.size(), cfg.rng_seed, epoch);
        double epoch_loss_sum = 0.0;

        try {
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(cfg.batch_size)) {
                const std::size_t stop =
                    std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
                const std::size_t batch_n = stop - start;

                if (n_threads > 1 && batch_n >= 2 * n_threads) {
                    for (auto& r : replicas) {
                        r->params().assign_values(m.params());
                        r->params().zero_grads();
                    }
                    std::vector<double> partial(n_threads, 0.0);
                    std::vector<std::thread> pool;
                    const std::size_t chunk = (batch_n + n_threads - 1) / n_threads;
                    for (std::size_t t = 0; t < n_threads; ++t) {
                        pool.emplace_back([&, t] {
                            const std::size_t lo = start + t * chunk;
                            const std::size_t hi = std::min(stop, lo + chunk);
                            if (lo < hi)
                                partial[t] =
                                    backward_chunk(*replicas[t], train_set, order, lo, hi, w);
                        });
                    }
                    for (auto& th : pool) th.join();
                    for (std::size_t t = 0; t < n_threads; ++t) {
                        epoch_loss_sum += partial[t];
                        add_grads(m.params(), replicas[t]->params());
                    }
                } else {
                    epoch_loss_sum += backward_chunk(m, train_set, order, start, stop, w);
                }

                // Batch loss is the mean over samples.
                m.params().scale_grads(1.0 / static_cast<double>(batch_n));
                clip_gradients(m.params(), cfg.grad_clip_norm);
                rmsprop_step(m.params(), opt, cfg);
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("train: diverged at epoch " + std::to_string(epoch) + ": " +
                                     e.what());
        }

        const double train_loss = epoch_loss_sum / static_cast<double>(order.size());
        const double val_loss = mean_loss(m, val_set, w, cfg.threads);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
            throw std::runtime_error("train: loss diverged (non-finite) at epoch " +
                                     std::to_string(epoch));
        result.curve.push_back({epoch, train_loss, val_loss});

        if (val_loss < result.best_val_loss) {
            result.best_val_loss = val_loss;
            result.best_epoch = epoch;
            best->params().assign_values(m.params());
            epochs_without_improvement = 0;
        } else {
            epochs_without_improvement++;
            if (epochs_without_improvement > cfg.patience) break;
        }
    }

    m.params().assign_values(best->params());
    return result;
}

}  // namespace twinpp::train
