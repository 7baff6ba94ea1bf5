#pragma once

#include <json.hpp>
#include <vector>

#include "twinpp/model/config.hpp"
#include "twinpp/numcore/vec.hpp"

namespace twinpp::baselines {

// The classical comparison models over the concatenated time-series window
// features: a multinomial classifier for the subtype and a ridge regressor
// for the gap in days.
struct LogisticModels {
    num::Mat W;      // k_sub x feature_dim
    num::Vec b;      // k_sub
    num::Vec w_gap;  // feature_dim (+ intercept held separately)
    double b_gap = 0.0;
    int feature_dim = 0;
    int k_sub = 0;

    nlohmann::json to_json() const;
    static LogisticModels from_json(const nlohmann::json& doc);
};

// Flattened window features: ts_window vectors concatenated oldest-first.
num::Vec logistic_features(const model::Sample& s);

// Classifier by full-batch gradient descent with backtracking line search
// on cross-entropy + l2; gap regressor by ridge least squares in closed
// form. Deterministic. Degenerate one-class data trains a constant
// classifier (warned via the returned flag).
struct LogisticFitReport {
    LogisticModels models;
    int classifier_iterations = 0;
    bool single_class_warning = false;
};

LogisticFitReport fit_logistic(const std::vector<model::Sample>& train, double l2_weight,
                               int k_sub, int max_iters = 500);

struct LogisticPrediction {
    int sub_type = 0;
    double gap_days = 0.0;  // clamped to >= 0
};

LogisticPrediction predict_logistic(const LogisticModels& m, const model::Sample& s);

}  // namespace twinpp::baselines
