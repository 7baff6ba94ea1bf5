#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "twinpp/numcore/gradcheck.hpp"
#include "twinpp/numcore/rng.hpp"
#include "twinpp/numcore/serialize.hpp"
#include "twinpp/numcore/vec.hpp"

using namespace twinpp;
using num::Mat;
using num::ParamStore;
using num::Vec;

TEST_CASE("sigmoid matches closed form and saturates without overflow") {
    CHECK(num::sigmoid(0.0) == 0.5);
    // 1/(1+e^-1) evaluated independently.
    const double expected = 1.0 / (1.0 + std::exp(-1.0));
    CHECK(num::sigmoid(1.0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(0.731058578630).epsilon(1e-9));

    const double hi = num::sigmoid(50.0);
    // 1 - 1e-20 is below one ulp of 1.0, so >= encodes the open bound here.
    CHECK(hi >= 1.0 - 1e-20);
    CHECK(hi <= 1.0);
    CHECK(std::isfinite(hi));
    const double lo = num::sigmoid(-50.0);
    CHECK(lo > 0.0);
    CHECK(lo < 1e-20);

    CHECK_THROWS(num::sigmoid(std::numeric_limits<double>::infinity()));
    CHECK_THROWS(num::sigmoid(std::nan("")));
}

TEST_CASE("sigmoid is monotone and interior on moderate inputs") {
    num::Rng rng(11);
    double prev_x = -40.0, prev_y = num::sigmoid(prev_x);
    for (int i = 0; i < 200; ++i) {
        const double x = -30.0 + 60.0 * (static_cast<double>(i) / 199.0);
        const double y = num::sigmoid(x);
        CHECK(y > 0.0);
        CHECK(y < 1.0);
        CHECK(y >= prev_y);
        prev_x = x;
        prev_y = y;
    }
    (void)prev_x;
    (void)rng;
}

TEST_CASE("softmax: uniform, closed form, shift invariance") {
    const Vec u = num::softmax(Vec{0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < 3; ++i) CHECK(u[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const Vec two = num::softmax(Vec{1.0, 0.0});
    const double e1 = std::exp(1.0);
    CHECK(two[0] == doctest::Approx(e1 / (e1 + 1.0)).epsilon(1e-14));
    CHECK(two[1] == doctest::Approx(1.0 / (e1 + 1.0)).epsilon(1e-14));

    const Vec shifted = num::softmax(Vec{1000.0, 999.0});
    CHECK(std::fabs(shifted[0] - two[0]) < 1e-12);
    CHECK(std::fabs(shifted[1] - two[1]) < 1e-12);

    CHECK_THROWS(num::softmax(Vec{}));
}

TEST_CASE("softmax sums to one and stays positive on random logits") {
    num::Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        Vec logits(1 + rng.integer(8));
        for (auto& v : logits) v = rng.uniform(-30.0, 30.0);
        const Vec p = num::softmax(logits);
        double sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(p[i] >= 0.0);
            sum += p[i];
        }
        CHECK(std::fabs(sum - 1.0) < 1e-12);
        const Vec lp = num::log_softmax(logits);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(std::isfinite(lp[i]));
            CHECK(std::exp(lp[i]) == doctest::Approx(p[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("matrix and vector operations validate dimensions") {
    Mat a(2, 3, 1.0);
    Vec x{1.0, 2.0, 3.0};
    const Vec y = num::matvec(a, x);
    CHECK(y.size() == 2);
    CHECK(y[0] == 6.0);
    CHECK_THROWS(num::matvec(a, Vec{1.0, 2.0}));
    CHECK_THROWS(num::dot(Vec{1.0}, Vec{1.0, 2.0}));
    Mat m(2, 2);
    CHECK_THROWS(num::outer_acc(Vec{1.0}, Vec{1.0, 2.0}, m));
}

TEST_CASE("argmax breaks ties toward the lowest index") {
    CHECK(num::argmax(Vec{0.3, 0.3, 0.2}) == 0);
    CHECK(num::argmax(Vec{0.1, 0.5, 0.5}) == 1);
}

TEST_CASE("param store enforces unique names and zeroes gradients exactly") {
    ParamStore store;
    num::Tensor& t = store.add("w", 2, 2);
    CHECK_THROWS(store.add("w", 1, 1));
    t.grad(0, 0) = 3.5;
    t.grad(1, 1) = -2.0;
    store.zero_grads();
    for (std::size_t i = 0; i < t.grad.size(); ++i) CHECK(t.grad.data()[i] == 0.0);
    CHECK(store.total_size() == 4);
    CHECK_THROWS(store.at("missing"));
}

TEST_CASE("parameter serialization round-trips bitwise") {
    ParamStore store;
    num::Rng rng(99);
    store.add("alpha", 3, 4);
    store.add("beta", 2, 1);
    for (const auto& name : store.names()) {
        Mat& v = store.at(name).value;
        for (std::size_t i = 0; i < v.size(); ++i) v.data()[i] = rng.uniform(-2.0, 2.0);
    }
    const nlohmann::json doc = num::params_to_json(store);
    CHECK(doc.at("format_version").get<int>() == num::kFormatVersion);
    const ParamStore loaded = num::params_from_json(doc);
    CHECK(loaded.names() == store.names());
    for (const auto& name : store.names()) {
        const Mat& a = store.at(name).value;
        const Mat& b = loaded.at(name).value;
        REQUIRE(a.rows() == b.rows());
        REQUIRE(a.cols() == b.cols());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == b.data()[i]);
    }

    nlohmann::json bad = doc;
    bad["format_version"] = 999;
    CHECK_THROWS(num::params_from_json(bad));

    nlohmann::json nan_doc = doc;
    nan_doc["params"][0]["values"][0] = std::nan("");
    CHECK_THROWS(num::params_from_json(nan_doc));
}

TEST_CASE("gradient check accepts a linear map and rejects bad eps") {
    ParamStore store;
    num::Tensor& w = store.add("w", 1, 4);
    const Vec x{0.3, -1.2, 2.0, 0.7};
    num::Rng rng(3);
    for (std::size_t i = 0; i < 4; ++i) w.value.data()[i] = rng.uniform(-1.0, 1.0);

    auto loss = [&]() {
        double acc = 0.0;
        for (std::size_t i = 0; i < 4; ++i) acc += w.value.data()[i] * x[i];
        return acc;
    };
    store.zero_grads();
    for (std::size_t i = 0; i < 4; ++i) w.grad.data()[i] = x[i];  // analytic gradient

    const double err = num::gradient_check(loss, store, 1e-5);
    CHECK(err < 1e-9);

    CHECK_THROWS(num::gradient_check(loss, store, 1e-1));
    CHECK_THROWS(num::gradient_check(loss, store, 1e-7));
}

TEST_CASE("gradient check rejects a non-deterministic loss") {
    ParamStore store;
    store.add("w", 1, 1);
    int calls = 0;
    auto loss = [&]() { return static_cast<double>(calls++); };
    CHECK_THROWS_AS(num::gradient_check(loss, store, 1e-5), std::runtime_error);
}

TEST_CASE("check_finite flags NaN and Inf") {
    Vec v{1.0, 2.0, 3.0};
    CHECK_NOTHROW(num::check_finite(v, "v"));
    v[1] = std::nan("");
    CHECK_THROWS(num::check_finite(v, "v"));
    v[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS(num::check_finite(v, "v"));
}

TEST_CASE("rng streams are deterministic and mix distinguishes substreams") {
    num::Rng a(123), b(123), c(124);
    for (int i = 0; i < 16; ++i) {
        const double av = a.uniform();
        CHECK(av == b.uniform());
        CHECK(av >= 0.0);
        CHECK(av < 1.0);
    }
    CHECK(num::Rng::mix(1, 2) != num::Rng::mix(2, 1));
    CHECK(num::Rng::mix(1, 2) == num::Rng::mix(1, 2));
    (void)c;
}
