#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "twinpp/numcore/rng.hpp"
#include "twinpp/trainer/trainer.hpp"

using namespace twinpp;
using model::ModelConfig;
using model::Sample;
using model::TwinRnn;
using num::Vec;

namespace {

Taxonomy tiny_taxonomy() {
    Taxonomy t;
    t.main_names = {"m0", "m1"};
    t.sub_names = {"s0", "s1", "s2"};
    t.sub_parent = {0, 1, 1};
    return t;
}

ModelConfig tiny_config() {
    ModelConfig cfg;
    cfg.hidden_dim = 6;
    cfg.embed_dim = 4;
    cfg.k_main = 2;
    cfg.k_sub = 3;
    cfg.ts_feature_dim = 3;
    return cfg;
}

// Learnable toy task: the most recent event type cycles to the next one,
// and the gap tracks a feature of the time-series window.
std::vector<Sample> toy_samples(std::size_t n, std::uint64_t seed, int n_entities = 8) {
    num::Rng rng(seed);
    std::vector<Sample> out;
    for (std::size_t i = 0; i < n; ++i) {
        Sample s;
        s.entity_id = "e" + std::to_string(i % static_cast<std::size_t>(n_entities));
        s.anchor_time = static_cast<double>(i);
        const int last_type = static_cast<int>(rng.integer(3));
        for (int t = 0; t < 4; ++t) {
            Vec v(3);
            for (auto& x : v) x = rng.uniform(-1.0, 1.0);
            s.ts_window.push_back(std::move(v));
        }
        for (int t = 0; t < 5; ++t)
            s.event_window.push_back({static_cast<int>(rng.integer(4)), rng.uniform(0.0, 2.0)});
        s.event_window.back() = {last_type, rng.uniform(0.0, 2.0)};
        s.target_sub = (last_type + 1) % 3;
        s.target_main = s.target_sub == 0 ? 0 : 1;
        s.target_gap = 2.0 + s.ts_window[0][0];
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

TEST_CASE("class weights follow the inverse-frequency rule with mean one") {
    const Taxonomy tax = tiny_taxonomy();
    std::vector<Sample> samples;
    // main counts 90/10; sub counts 90/5/5.
    for (int i = 0; i < 100; ++i) {
        Sample s;
        s.target_main = i < 90 ? 0 : 1;
        s.target_sub = i < 90 ? 0 : (i < 95 ? 1 : 2);
        samples.push_back(s);
    }
    const auto w = train::compute_class_weights(samples, tax);
    CHECK(w.main[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(w.main[1] == doctest::Approx(1.8).epsilon(1e-12));
    // Ratio property: w_a / w_b = n_b / n_a.
    CHECK(w.main[0] / w.main[1] == doctest::Approx(10.0 / 90.0).epsilon(1e-14));
    CHECK(w.sub[1] / w.sub[0] == doctest::Approx(90.0 / 5.0).epsilon(1e-14));
    const double mean_sub = (w.sub[0] + w.sub[1] + w.sub[2]) / 3.0;
    CHECK(mean_sub == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("class weights: equal counts, missing class, disabled terms") {
    const Taxonomy tax = tiny_taxonomy();
    std::vector<Sample> balanced;
    for (int i = 0; i < 9; ++i) {
        Sample s;
        s.target_main = i % 2;
        s.target_sub = i % 3;
        balanced.push_back(s);
    }
    const auto w = train::compute_class_weights(balanced, tax);
    for (std::size_t k = 0; k < 3; ++k) CHECK(w.sub[k] == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<Sample> missing;
    for (int i = 0; i < 5; ++i) {
        Sample s;
        s.target_main = 0;
        s.target_sub = 0;
        missing.push_back(s);
    }
    CHECK_THROWS_WITH_AS(train::compute_class_weights(missing, tax),
                         doctest::Contains("'m1'"), std::runtime_error);

    // Both mains present, subtypes 1 and 2 absent: fine once the subtype
    // term is disabled.
    std::vector<Sample> missing_sub;
    for (int i = 0; i < 6; ++i) {
        Sample s;
        s.target_main = i % 2;
        s.target_sub = 0;
        missing_sub.push_back(s);
    }
    CHECK_THROWS_WITH_AS(train::compute_class_weights(missing_sub, tax),
                         doctest::Contains("'s1'"), std::runtime_error);
    const auto main_only =
        train::compute_class_weights(missing_sub, tax, train::LossMode::MainOnly);
    CHECK(main_only.sub[0] == 0.0);
    CHECK(main_only.sub[1] == 0.0);
    CHECK(main_only.main[0] == doctest::Approx(1.0).epsilon(1e-12));
    const auto sub_only = train::compute_class_weights(balanced, tax, train::LossMode::SubOnly);
    CHECK(sub_only.main[0] == 0.0);
}

TEST_CASE("rmsprop: closed-form first and second steps") {
    num::ParamStore params;
    num::Tensor& t = params.add("w", 1, 1);
    t.value(0, 0) = 1.0;
    t.grad(0, 0) = 1.0;
    train::OptimizerState state;
    state.init(params);
    train::TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.rms_decay = 0.9;
    cfg.rms_eps = 1e-8;

    train::rmsprop_step(params, state, cfg);
    CHECK(state.cache.at("w")(0, 0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(t.value(0, 0) - 1.0 == doctest::Approx(-0.0316227766).epsilon(1e-7));
    CHECK(t.grad(0, 0) == 0.0);  // gradients zeroed by the step

    t.grad(0, 0) = 1.0;
    train::rmsprop_step(params, state, cfg);
    CHECK(state.cache.at("w")(0, 0) == doctest::Approx(0.19).epsilon(1e-15));
}

TEST_CASE("rmsprop: zero gradient leaves parameters, decays cache; non-finite throws") {
    num::ParamStore params;
    num::Tensor& t = params.add("w", 2, 1);
    t.value(0, 0) = 3.0;
    t.value(1, 0) = -1.0;
    train::OptimizerState state;
    state.init(params);
    state.cache.at("w")(0, 0) = 0.5;
    train::TrainConfig cfg;

    train::rmsprop_step(params, state, cfg);
    CHECK(t.value(0, 0) == 3.0);
    CHECK(t.value(1, 0) == -1.0);
    CHECK(state.cache.at("w")(0, 0) == doctest::Approx(0.45).epsilon(1e-15));

    t.grad(0, 0) = std::nan("");
    CHECK_THROWS_AS(train::rmsprop_step(params, state, cfg), std::runtime_error);
}

TEST_CASE("gradient clipping bounds the global norm") {
    num::ParamStore params;
    num::Tensor& t = params.add("w", 1, 4);
    for (std::size_t i = 0; i < 4; ++i) t.grad.data()[i] = 10.0;
    const double before = train::clip_gradients(params, 5.0);
    CHECK(before == doctest::Approx(20.0));
    CHECK(std::sqrt(params.grad_sq_norm()) == doctest::Approx(5.0).epsilon(1e-12));
    // Already-small gradients are untouched.
    const double small = train::clip_gradients(params, 50.0);
    CHECK(small == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(std::sqrt(params.grad_sq_norm()) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("training reduces loss on a learnable toy task") {
    const Taxonomy tax = tiny_taxonomy();
    const auto train_set = toy_samples(160, 1);
    const auto val_set = toy_samples(48, 2, 3);
    TwinRnn net(tiny_config());
    train::TrainConfig cfg;
    cfg.max_epochs = 12;
    cfg.patience = 12;
    cfg.batch_size = 16;
    cfg.rng_seed = 5;
    const auto result = train::train(net, train_set, val_set, tax, cfg);
    REQUIRE(result.curve.size() >= 2);
    CHECK(result.curve.front().epoch == 0);
    CHECK(result.best_val_loss < result.curve.front().val_loss);
    CHECK(result.curve.back().train_loss < result.curve.front().train_loss);
}

TEST_CASE("training is bit-deterministic for a fixed seed") {
    const Taxonomy tax = tiny_taxonomy();
    const auto train_set = toy_samples(96, 3);
    const auto val_set = toy_samples(32, 4, 3);
    train::TrainConfig cfg;
    cfg.max_epochs = 4;
    cfg.batch_size = 16;
    cfg.rng_seed = 11;

    TwinRnn a(tiny_config()), b(tiny_config());
    const auto ra = train::train(a, train_set, val_set, tax, cfg);
    const auto rb = train::train(b, train_set, val_set, tax, cfg);
    REQUIRE(ra.curve.size() == rb.curve.size());
    for (std::size_t i = 0; i < ra.curve.size(); ++i) {
        CHECK(ra.curve[i].train_loss == rb.curve[i].train_loss);
        CHECK(ra.curve[i].val_loss == rb.curve[i].val_loss);
    }
    for (const auto& name : a.params().names()) {
        const num::Mat& va = a.params().at(name).value;
        const num::Mat& vb = b.params().at(name).value;
        for (std::size_t i = 0; i < va.size(); ++i) CHECK(va.data()[i] == vb.data()[i]);
    }
}

TEST_CASE("patience zero stops at the first non-improving epoch") {
    const Taxonomy tax = tiny_taxonomy();
    const auto train_set = toy_samples(96, 6);
    const auto val_set = toy_samples(32, 7, 3);
    train::TrainConfig cfg;
    cfg.max_epochs = 30;
    cfg.patience = 0;
    cfg.rng_seed = 8;
    TwinRnn net(tiny_config());
    const auto result = train::train(net, train_set, val_set, tax, cfg);
    // Every epoch before the last must have improved the best validation
    // loss, otherwise training would have stopped there already.
    double best = result.curve.front().val_loss;
    for (std::size_t i = 1; i + 1 < result.curve.size(); ++i) {
        CHECK(result.curve[i].val_loss < best);
        best = std::min(best, result.curve[i].val_loss);
    }
    if (result.curve.back().epoch < cfg.max_epochs)
        CHECK(result.curve.back().val_loss >= best);
}

TEST_CASE("returned parameters are the best-validation snapshot") {
    const Taxonomy tax = tiny_taxonomy();
    const auto train_set = toy_samples(96, 9);
    const auto val_set = toy_samples(32, 10, 3);
    train::TrainConfig cfg;
    cfg.max_epochs = 6;
    cfg.patience = 6;
    cfg.rng_seed = 12;
    TwinRnn net(tiny_config());
    const auto result = train::train(net, train_set, val_set, tax, cfg);
    const double val_now = train::mean_loss(net, val_set, result.weights);
    CHECK(val_now == doctest::Approx(result.best_val_loss).epsilon(1e-12));
}

TEST_CASE("training diverges loudly instead of silently") {
    const Taxonomy tax = tiny_taxonomy();
    const auto train_set = toy_samples(64, 13);
    const auto val_set = toy_samples(16, 14, 2);
    train::TrainConfig cfg;
    cfg.max_epochs = 3;
    cfg.learning_rate = 1e155;  // drives the squared time error to overflow
    TwinRnn net(tiny_config());
    CHECK_THROWS_AS(train::train(net, train_set, val_set, tax, cfg), std::runtime_error);
}

TEST_CASE("threaded training matches its own rerun") {
    const Taxonomy tax = tiny_taxonomy();
    const auto train_set = toy_samples(128, 15);
    const auto val_set = toy_samples(32, 16, 3);
    train::TrainConfig cfg;
    cfg.max_epochs = 2;
    cfg.threads = 2;
    cfg.rng_seed = 9;
    TwinRnn a(tiny_config()), b(tiny_config());
    const auto ra = train::train(a, train_set, val_set, tax, cfg);
    const auto rb = train::train(b, train_set, val_set, tax, cfg);
    for (std::size_t i = 0; i < ra.curve.size(); ++i)
        CHECK(ra.curve[i].val_loss == rb.curve[i].val_loss);
}

TEST_CASE("batch loss is invariant under sample reordering") {
    const Taxonomy tax = tiny_taxonomy();
    auto batch = toy_samples(33, 21);
    TwinRnn net(tiny_config());
    net.init_params(2);
    const auto w = model::ClassWeights::uniform(2, 3);
    const double forward_order = train::mean_loss(net, batch, w);
    std::reverse(batch.begin(), batch.end());
    const double reverse_order = train::mean_loss(net, batch, w);
    CHECK(forward_order == doctest::Approx(reverse_order).epsilon(1e-12));
}

TEST_CASE("config validation rejects bad values") {
    train::TrainConfig cfg;
    cfg.learning_rate = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.rms_decay = 1.0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.batch_size = 0;
    CHECK_THROWS(cfg.validate());
    CHECK_THROWS(train::loss_mode_from_string("bogus"));
}
