#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

// Minimal dense numeric layer: vectors, row-major matrices and the
// elementwise activations used by the network. All storage is double;
// every composition validates dimensions and throws std::invalid_argument
// on mismatch.

namespace twinpp::num {

class Vec {
public:
    Vec() = default;
    explicit Vec(std::size_t n, double fill = 0.0) : d_(n, fill) {}
    Vec(std::initializer_list<double> init) : d_(init) {}

    std::size_t size() const { return d_.size(); }
    bool empty() const { return d_.empty(); }

    double& operator[](std::size_t i) { return d_[i]; }
    double operator[](std::size_t i) const { return d_[i]; }

    double* data() { return d_.data(); }
    const double* data() const { return d_.data(); }

    auto begin() { return d_.begin(); }
    auto end() { return d_.end(); }
    auto begin() const { return d_.begin(); }
    auto end() const { return d_.end(); }

    const std::vector<double>& values() const { return d_; }

    void fill(double v) { d_.assign(d_.size(), v); }

private:
    std::vector<double> d_;
};

class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), d_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return d_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return d_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return d_[r * cols_ + c]; }

    double* data() { return d_.data(); }
    const double* data() const { return d_.data(); }

    const double* row(std::size_t r) const { return d_.data() + r * cols_; }
    double* row(std::size_t r) { return d_.data() + r * cols_; }

    void fill(double v) { d_.assign(d_.size(), v); }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> d_;
};

// y = A x
Vec matvec(const Mat& a, const Vec& x);
// out += A x
void matvec_acc(const Mat& a, const Vec& x, Vec& out);
// y = A^T x
Vec matvec_t(const Mat& a, const Vec& x);
// out += A^T x
void matvec_t_acc(const Mat& a, const Vec& x, Vec& out);
// m += a b^T
void outer_acc(const Vec& a, const Vec& b, Mat& m);
// y += s x
void axpy(double s, const Vec& x, Vec& y);

double dot(const Vec& a, const Vec& b);
Vec concat(const Vec& a, const Vec& b);

// Stable logistic sigmoid; throws on non-finite input.
double sigmoid(double x);
Vec sigmoid(const Vec& x);
Vec tanh_v(const Vec& x);

// Max-subtracted softmax; throws on empty or non-finite input.
Vec softmax(const Vec& logits);
// Fused log-softmax: use wherever a log of a probability is consumed.
Vec log_softmax(const Vec& logits);

// Index of the largest entry; ties break toward the lowest index.
std::size_t argmax(const Vec& v);

// Throws std::runtime_error naming `what` if any value is NaN or Inf.
void check_finite(const double* p, std::size_t n, const std::string& what);
void check_finite(const Vec& v, const std::string& what);
void check_finite(const Mat& m, const std::string& what);

}  // namespace twinpp::num
