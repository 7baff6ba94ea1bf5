#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace twinpp::metrics {

// K x K count table, row = truth, column = prediction.
struct ConfusionMatrix {
    int k = 0;
    std::vector<long long> counts;  // row-major
    std::vector<std::string> names;

    long long at(int truth, int pred) const {
        return counts[static_cast<std::size_t>(truth) * static_cast<std::size_t>(k) +
                      static_cast<std::size_t>(pred)];
    }
    long long total() const;
    std::string to_csv() const;
};

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& pred, int k,
                          std::vector<std::string> names = {});

// Per-class and macro precision/recall/F1; 0/0 counts as 0 so rare classes
// keep the macro average defined.
struct PrfReport {
    std::vector<double> precision, recall, f1;
    double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
};

PrfReport macro_prf(const ConfusionMatrix& m);

double mae(const std::vector<double>& pred_gaps, const std::vector<double>& true_gaps);

// Macro PRF restricted to samples whose absolute time error is strictly
// below the threshold. An empty subset is reported as undefined, not zero.
struct FilteredPrf {
    bool defined = false;
    std::size_t count = 0;
    PrfReport prf;
};

FilteredPrf f1_plus(const std::vector<int>& truth, const std::vector<int>& pred,
                    const std::vector<double>& pred_gaps, const std::vector<double>& true_gaps,
                    int k, double threshold_days = 3.0);

// MAE restricted to samples whose type was predicted correctly.
struct FilteredMae {
    bool defined = false;
    std::size_t count = 0;
    double value = 0.0;
};

FilteredMae mae_plus(const std::vector<int>& truth, const std::vector<int>& pred,
                     const std::vector<double>& pred_gaps, const std::vector<double>& true_gaps);

// The full per-level evaluation bundle.
struct MetricsReport {
    std::size_t n = 0;
    ConfusionMatrix cm;
    PrfReport prf;
    double mae_days = 0.0;
    FilteredPrf f1p;
    FilteredMae maep;

    nlohmann::json to_json() const;
    std::string to_csv() const;  // one row per class plus the macro row
};

MetricsReport evaluate(const std::vector<int>& truth, const std::vector<int>& pred,
                       const std::vector<double>& pred_gaps, const std::vector<double>& true_gaps,
                       int k, std::vector<std::string> names = {}, double threshold_days = 3.0);

}  // namespace twinpp::metrics
