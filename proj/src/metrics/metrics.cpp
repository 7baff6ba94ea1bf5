#include "twinpp/metrics/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace twinpp::metrics {

long long ConfusionMatrix::total() const {
    long long acc = 0;
    for (long long c : counts) acc += c;
    return acc;
}

std::string ConfusionMatrix::to_csv() const {
    std::ostringstream out;
    out << "truth\\pred";
    for (int j = 0; j < k; ++j) out << "," << names[static_cast<std::size_t>(j)];
    out << "\n";
    for (int i = 0; i < k; ++i) {
        out << names[static_cast<std::size_t>(i)];
        for (int j = 0; j < k; ++j) out << "," << at(i, j);
        out << "\n";
    }
    return out.str();
}

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& pred, int k,
                          std::vector<std::string> names) {
    if (truth.size() != pred.size())
        throw std::invalid_argument("confusion: truth/pred length mismatch");
    if (k < 1) throw std::invalid_argument("confusion: k must be >= 1");
    ConfusionMatrix m;
    m.k = k;
    m.counts.assign(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0);
    if (names.empty()) {
        for (int i = 0; i < k; ++i) names.push_back("class_" + std::to_string(i));
    }
    if (static_cast<int>(names.size()) != k)
        throw std::invalid_argument("confusion: name count mismatch");
    m.names = std::move(names);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= k || pred[i] < 0 || pred[i] >= k)
            throw std::invalid_argument("confusion: class id out of range");
        m.counts[static_cast<std::size_t>(truth[i]) * static_cast<std::size_t>(k) +
                 static_cast<std::size_t>(pred[i])]++;
    }
    return m;
}

PrfReport macro_prf(const ConfusionMatrix& m) {
    PrfReport r;
    r.precision.resize(static_cast<std::size_t>(m.k));
    r.recall.resize(static_cast<std::size_t>(m.k));
    r.f1.resize(static_cast<std::size_t>(m.k));
    for (int c = 0; c < m.k; ++c) {
        long long col = 0, row = 0;
        for (int i = 0; i < m.k; ++i) {
            col += m.at(i, c);
            row += m.at(c, i);
        }
        const double tp = static_cast<double>(m.at(c, c));
        const double p = col > 0 ? tp / static_cast<double>(col) : 0.0;
        const double rec = row > 0 ? tp / static_cast<double>(row) : 0.0;
        const double f = (p + rec) > 0.0 ? 2.0 * p * rec / (p + rec) : 0.0;
        r.precision[static_cast<std::size_t>(c)] = p;
        r.recall[static_cast<std::size_t>(c)] = rec;
        r.f1[static_cast<std::size_t>(c)] = f;
        r.macro_precision += p;
        r.macro_recall += rec;
        r.macro_f1 += f;
    }
    r.macro_precision /= static_cast<double>(m.k);
    r.macro_recall /= static_cast<double>(m.k);
    r.macro_f1 /= static_cast<double>(m.k);
    return r;
}

double mae(const std::vector<double>& pred_gaps, const std::vector<double>& true_gaps) {
    if (pred_gaps.size() != true_gaps.size())
        throw std::invalid_argument("mae: length mismatch");
    if (pred_gaps.empty()) throw std::invalid_argument("mae: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred_gaps.size(); ++i)
        acc += std::fabs(pred_gaps[i] - true_gaps[i]);
    return acc / static_cast<double>(pred_gaps.size());
}

FilteredPrf f1_plus(const std::vector<int>& truth, const std::vector<int>& pred,
                    const std::vector<double>& pred_gaps, const std::vector<double>& true_gaps,
                    int k, double threshold_days) {
    if (truth.size() != pred.size() || truth.size() != pred_gaps.size() ||
        truth.size() != true_gaps.size())
        throw std::invalid_argument("f1_plus: length mismatch");
    std::vector<int> t_sub, p_sub;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (std::fabs(pred_gaps[i] - true_gaps[i]) < threshold_days) {
            t_sub.push_back(truth[i]);
            p_sub.push_back(pred[i]);
        }
    }
    FilteredPrf out;
    out.count = t_sub.size();
    if (t_sub.empty()) return out;
    out.defined = true;
    out.prf = macro_prf(confusion(t_sub, p_sub, k));
    return out;
}

FilteredMae mae_plus(const std::vector<int>& truth, const std::vector<int>& pred,
                     const std::vector<double>& pred_gaps, const std::vector<double>& true_gaps) {
    if (truth.size() != pred.size() || truth.size() != pred_gaps.size() ||
        truth.size() != true_gaps.size())
        throw std::invalid_argument("mae_plus: length mismatch");
    FilteredMae out;
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == pred[i]) {
            acc += std::fabs(pred_gaps[i] - true_gaps[i]);
            out.count++;
        }
    }
    if (out.count == 0) return out;
    out.defined = true;
    out.value = acc / static_cast<double>(out.count);
    return out;
}

MetricsReport evaluate(const std::vector<int>& truth, const std::vector<int>& pred,
                       const std::vector<double>& pred_gaps, const std::vector<double>& true_gaps,
                       int k, std::vector<std::string> names, double threshold_days) {
    MetricsReport rep;
    rep.n = truth.size();
    rep.cm = confusion(truth, pred, k, std::move(names));
    rep.prf = macro_prf(rep.cm);
    rep.mae_days = truth.empty() ? 0.0 : mae(pred_gaps, true_gaps);
    rep.f1p = f1_plus(truth, pred, pred_gaps, true_gaps, k, threshold_days);
    rep.maep = mae_plus(truth, pred, pred_gaps, true_gaps);
    return rep;
}

nlohmann::json MetricsReport::to_json() const {
    nlohmann::json per_class = nlohmann::json::array();
    for (int c = 0; c < cm.k; ++c) {
        per_class.push_back({{"class", cm.names[static_cast<std::size_t>(c)]},
                             {"precision", prf.precision[static_cast<std::size_t>(c)]},
                             {"recall", prf.recall[static_cast<std::size_t>(c)]},
                             {"f1", prf.f1[static_cast<std::size_t>(c)]}});
    }
    nlohmann::json doc{{"n", n},
                       {"per_class", std::move(per_class)},
                       {"macro_precision", prf.macro_precision},
                       {"macro_recall", prf.macro_recall},
                       {"macro_f1", prf.macro_f1},
                       {"mae_days", mae_days}};
    doc["f1_plus"] = f1p.defined
                         ? nlohmann::json{{"defined", true},
                                          {"count", f1p.count},
                                          {"macro_f1", f1p.prf.macro_f1},
                                          {"macro_precision", f1p.prf.macro_precision},
                                          {"macro_recall", f1p.prf.macro_recall}}
                         : nlohmann::json{{"defined", false}, {"count", 0}};
    doc["mae_plus"] = maep.defined
                          ? nlohmann::json{{"defined", true}, {"count", maep.count},
                                           {"value", maep.value}}
                          : nlohmann::json{{"defined", false}, {"count", 0}};
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < cm.k; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < cm.k; ++j) row.push_back(cm.at(i, j));
        rows.push_back(std::move(row));
    }
    doc["confusion"] = std::move(rows);
    return doc;
}

std::string MetricsReport::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "class,precision,recall,f1\n";
    for (int c = 0; c < cm.k; ++c) {
        out << cm.names[static_cast<std::size_t>(c)] << ","
            << prf.precision[static_cast<std::size_t>(c)] << ","
            << prf.recall[static_cast<std::size_t>(c)] << "," << prf.f1[static_cast<std::size_t>(c)]
            << "\n";
    }
    out << "macro," << prf.macro_precision << "," << prf.macro_recall << "," << prf.macro_f1
        << "\n";
    return out.str();
}

}  // namespace twinpp::metrics
