#include "twinpp/baselines/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twinpp::baselines {

using model::Sample;
using num::Mat;
using num::Vec;

Vec logistic_features(const Sample& s) {
    std::size_t total = 0;
    for (const auto& v : s.ts_window) total += v.size();
    Vec out(total);
    std::size_t off = 0;
    for (const auto& v : s.ts_window) {
        for (std::size_t i = 0; i < v.size(); ++i) out[off + i] = v[i];
        off += v.size();
    }
    return out;
}

namespace {

// Solves (G + jitter*I) x = rhs by Cholesky; G must be symmetric PSD.
Vec chol_solve(Mat g, Vec rhs) {
    const std::size_t n = g.rows();
    if (g.cols() != n || rhs.size() != n) throw std::invalid_argument("chol_solve: bad shapes");
    for (std::size_t i = 0; i < n; ++i) g(i, i) += 1e-10;
    // In-place lower Cholesky.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = g(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= g(i, k) * g(j, k);
            if (i == j) {
                if (sum <= 0.0) throw std::runtime_error("chol_solve: matrix not positive definite");
                g(i, i) = std::sqrt(sum);
            } else {
                g(i, j) = sum / g(j, j);
            }
        }
    }
    // Forward then backward substitution.
    for (std::size_t i = 0; i < n; ++i) {
        double sum = rhs[i];
        for (std::size_t k = 0; k < i; ++k) sum -= g(i, k) * rhs[k];
        rhs[i] = sum / g(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double sum = rhs[i];
        for (std::size_t k = i + 1; k < n; ++k) sum -= g(k, i) * rhs[k];
        rhs[i] = sum / g(i, i);
    }
    return rhs;
}

double classifier_loss(const Mat& w, const Vec& b, const std::vector<Vec>& x,
                       const std::vector<int>& y, double l2) {
    const double n = static_cast<double>(x.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        Vec logits = num::matvec(w, x[i]);
        for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += b[k];
        loss -= num::log_softmax(logits)[static_cast<std::size_t>(y[i])];
    }
    loss /= n;
    double reg = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) reg += w.data()[i] * w.data()[i];
    return loss + l2 * reg;
}

}  // namespace

LogisticFitReport fit_logistic(const std::vector<Sample>& train, double l2_weight, int k_sub,
                               int max_iters) {
    if (train.empty()) throw std::invalid_argument("fit_logistic: empty dataset");
    if (l2_weight < 0.0) throw std::invalid_argument("fit_logistic: negative l2_weight");
    if (k_sub < 1) throw std::invalid_argument("fit_logistic: k_sub must be >= 1");

    std::vector<Vec> x;
    std::vector<int> y;
    x.reserve(train.size());
    for (const auto& s : train) {
        x.push_back(logistic_features(s));
        if (x.back().size() != x.front().size())
            throw std::invalid_argument("fit_logistic: inconsistent feature dimensions");
        if (s.target_sub < 0 || s.target_sub >= k_sub)
            throw std::invalid_argument("fit_logistic: target out of range");
        y.push_back(s.target_sub);
    }
    const std::size_t f_dim = x.front().size();
    const double n = static_cast<double>(x.size());

    LogisticFitReport report;
    report.single_class_warning =
        std::all_of(y.begin(), y.end(), [&](int v) { return v == y.front(); });

    LogisticModels m;
    m.feature_dim = static_cast<int>(f_dim);
    m.k_sub = k_sub;
    m.W = Mat(static_cast<std::size_t>(k_sub), f_dim, 0.0);
    m.b = Vec(static_cast<std::size_t>(k_sub), 0.0);

    // Full-batch gradient descent with Armijo backtracking; the objective
    // is convex so this converges without tuning.
    double f = classifier_loss(m.W, m.b, x, y, l2_weight);
    double step = 1.0;
    Mat gw(m.W.rows(), m.W.cols());
    Vec gb(m.b.size());
    for (int iter = 0; iter < max_iters; ++iter) {
        gw.fill(0.0);
        gb.fill(0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            Vec logits = num::matvec(m.W, x[i]);
            for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += m.b[k];
            Vec p = num::softmax(logits);
            p[static_cast<std::size_t>(y[i])] -= 1.0;
            num::outer_acc(p, x[i], gw);
            for (std::size_t k = 0; k < gb.size(); ++k) gb[k] += p[k];
        }
        double g_sq = 0.0;
        for (std::size_t i = 0; i < gw.size(); ++i) {
            gw.data()[i] = gw.data()[i] / n + 2.0 * l2_weight * m.W.data()[i];
            g_sq += gw.data()[i] * gw.data()[i];
        }
        for (std::size_t k = 0; k < gb.size(); ++k) {
            gb[k] /= n;
            g_sq += gb[k] * gb[k];
        }
        if (std::sqrt(g_sq) < 1e-6) break;

        Mat w_trial = m.W;
        Vec b_trial = m.b;
        bool accepted = false;
        for (int back = 0; back < 50; ++back) {
            for (std::size_t i = 0; i < w_trial.size(); ++i)
                w_trial.data()[i] = m.W.data()[i] - step * gw.data()[i];
            for (std::size_t k = 0; k < b_trial.size(); ++k) b_trial[k] = m.b[k] - step * gb[k];
            const double f_trial = classifier_loss(w_trial, b_trial, x, y, l2_weight);
            if (f_trial <= f - 1e-4 * step * g_sq) {
                m.W = w_trial;
                m.b = b_trial;
                f = f_trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        report.classifier_iterations = iter + 1;
        if (!accepted) break;
        step *= 2.0;
    }

    // Ridge regression for the gap with an unpenalized intercept:
    // (X^T X / n + l2 I) w = X^T y / n on [x; 1]-augmented rows.
    const std::size_t fa = f_dim + 1;
    Mat gram(fa, fa, 0.0);
    Vec rhs(fa, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t a = 0; a < f_dim; ++a) {
            const double xa = x[i][a];
            for (std::size_t c = 0; c < f_dim; ++c) gram(a, c) += xa * x[i][c];
            gram(a, f_dim) += xa;
            gram(f_dim, a) += xa;
            rhs[a] += xa * train[i].target_gap;
        }
        gram(f_dim, f_dim) += 1.0;
        rhs[f_dim] += train[i].target_gap;
    }
    for (std::size_t i = 0; i < fa; ++i) {
        for (std::size_t j = 0; j < fa; ++j) gram(i, j) /= n;
        rhs[i] /= n;
    }
    for (std::size_t a = 0; a < f_dim; ++a) gram(a, a) += l2_weight;
    const Vec sol = chol_solve(gram, rhs);
    m.w_gap = Vec(f_dim);
    for (std::size_t a = 0; a < f_dim; ++a) m.w_gap[a] = sol[a];
    m.b_gap = sol[f_dim];

    report.models = std::move(m);
    return report;
}

LogisticPrediction predict_logistic(const LogisticModels& m, const Sample& s) {
    const Vec x = logistic_features(s);
    if (x.size() != static_cast<std::size_t>(m.feature_dim))
        throw std::invalid_argument("predict_logistic: feature dimension mismatch");
    Vec logits = num::matvec(m.W, x);
    for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += m.b[k];
    LogisticPrediction out;
    out.sub_type = static_cast<int>(num::argmax(logits));
    const double gap = num::dot(m.w_gap, x) + m.b_gap;
    out.gap_days = gap < 0.0 ? 0.0 : gap;
    return out;
}

nlohmann::json LogisticModels::to_json() const {
    return nlohmann::json{
        {"format_version", 1},
        {"feature_dim", feature_dim},
        {"k_sub", k_sub},
        {"W", std::vector<double>(W.data(), W.data() + W.size())},
        {"b", b.values()},
        {"w_gap", w_gap.values()},
        {"b_gap", b_gap}};
}

LogisticModels LogisticModels::from_json(const nlohmann::json& doc) {
    LogisticModels m;
    m.feature_dim = doc.at("feature_dim").get<int>();
    m.k_sub = doc.at("k_sub").get<int>();
    const auto w_flat = doc.at("W").get<std::vector<double>>();
    m.W = Mat(static_cast<std::size_t>(m.k_sub), static_cast<std::size_t>(m.feature_dim));
    if (w_flat.size() != m.W.size()) throw std::runtime_error("logistic model: W size mismatch");
    std::copy(w_flat.begin(), w_flat.end(), m.W.data());
    const auto b_vals = doc.at("b").get<std::vector<double>>();
    m.b = Vec(b_vals.size());
    std::copy(b_vals.begin(), b_vals.end(), m.b.data());
    const auto wg = doc.at("w_gap").get<std::vector<double>>();
    m.w_gap = Vec(wg.size());
    std::copy(wg.begin(), wg.end(), m.w_gap.data());
    m.b_gap = doc.at("b_gap").get<double>();
    return m;
}

}  // namespace twinpp::baselines
