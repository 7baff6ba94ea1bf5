#include "twinpp/numcore/vec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twinpp::num {

namespace {

[[noreturn]] void dim_error(const std::string& op, std::size_t a, std::size_t b) {
    throw std::invalid_argument(op + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
}

}  // namespace

Vec matvec(const Mat& a, const Vec& x) {
    Vec out(a.rows(), 0.0);
    matvec_acc(a, x, out);
    return out;
}

void matvec_acc(const Mat& a, const Vec& x, Vec& out) {
    if (a.cols() != x.size()) dim_error("matvec", a.cols(), x.size());
    if (a.rows() != out.size()) dim_error("matvec out", a.rows(), out.size());
    const std::size_t r = a.rows(), c = a.cols();
    const double* xp = x.data();
    for (std::size_t i = 0; i < r; ++i) {
        const double* ap = a.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < c; ++j) acc += ap[j] * xp[j];
        out[i] += acc;
    }
}

Vec matvec_t(const Mat& a, const Vec& x) {
    Vec out(a.cols(), 0.0);
    matvec_t_acc(a, x, out);
    return out;
}

void matvec_t_acc(const Mat& a, const Vec& x, Vec& out) {
    if (a.rows() != x.size()) dim_error("matvec_t", a.rows(), x.size());
    if (a.cols() != out.size()) dim_error("matvec_t out", a.cols(), out.size());
    const std::size_t r = a.rows(), c = a.cols();
    double* op = out.data();
    for (std::size_t i = 0; i < r; ++i) {
        const double* ap = a.row(i);
        const double xi = x[i];
        for (std::size_t j = 0; j < c; ++j) op[j] += xi * ap[j];
    }
}

void outer_acc(const Vec& a, const Vec& b, Mat& m) {
    if (m.rows() != a.size()) dim_error("outer_acc rows", m.rows(), a.size());
    if (m.cols() != b.size()) dim_error("outer_acc cols", m.cols(), b.size());
    const std::size_t r = m.rows(), c = m.cols();
    for (std::size_t i = 0; i < r; ++i) {
        double* mp = m.row(i);
        const double ai = a[i];
        for (std::size_t j = 0; j < c; ++j) mp[j] += ai * b[j];
    }
}

void axpy(double s, const Vec& x, Vec& y) {
    if (x.size() != y.size()) dim_error("axpy", x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) dim_error("dot", a.size(), b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

Vec concat(const Vec& a, const Vec& b) {
    Vec out(a.size() + b.size());
    std::copy(a.begin(), a.end(), out.begin());
    std::copy(b.begin(), b.end(), out.begin() + static_cast<std::ptrdiff_t>(a.size()));
    return out;
}

double sigmoid(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("sigmoid: non-finite input");
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Vec sigmoid(const Vec& x) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = sigmoid(x[i]);
    return out;
}

Vec tanh_v(const Vec& x) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::tanh(x[i]);
    return out;
}

Vec softmax(const Vec& logits) {
    if (logits.empty()) throw std::invalid_argument("softmax: empty input");
    check_finite(logits, "softmax input");
    const double m = *std::max_element(logits.begin(), logits.end());
    Vec out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        sum += out[i];
    }
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] /= sum;
    return out;
}

Vec log_softmax(const Vec& logits) {
    if (logits.empty()) throw std::invalid_argument("log_softmax: empty input");
    check_finite(logits, "log_softmax input");
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) sum += std::exp(logits[i] - m);
    const double lse = m + std::log(sum);
    Vec out(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
    return out;
}

std::size_t argmax(const Vec& v) {
    if (v.empty()) throw std::invalid_argument("argmax: empty input");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

void check_finite(const double* p, std::size_t n, const std::string& what) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(p[i])) {
            throw std::runtime_error(what + ": non-finite value at index " + std::to_string(i));
        }
    }
}

void check_finite(const Vec& v, const std::string& what) { check_finite(v.data(), v.size(), what); }
void check_finite(const Mat& m, const std::string& what) { check_finite(m.data(), m.size(), what); }

}  // namespace twinpp::num
