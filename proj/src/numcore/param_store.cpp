#include "twinpp/numcore/param_store.hpp"

#include <stdexcept>

namespace twinpp::num {

Tensor& ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols) {
    if (items_.count(name)) throw std::invalid_argument("ParamStore: duplicate name " + name);
    if (rows == 0 || cols == 0) throw std::invalid_argument("ParamStore: empty shape for " + name);
    Tensor& t = items_[name];
    t.value = Mat(rows, cols, 0.0);
    t.grad = Mat(rows, cols, 0.0);
    order_.push_back(name);
    return t;
}

Tensor& ParamStore::at(const std::string& name) {
    auto it = items_.find(name);
    if (it == items_.end()) throw std::invalid_argument("ParamStore: unknown name " + name);
    return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
    auto it = items_.find(name);
    if (it == items_.end()) throw std::invalid_argument("ParamStore: unknown name " + name);
    return it->second;
}

bool ParamStore::contains(const std::string& name) const { return items_.count(name) > 0; }

std::size_t ParamStore::total_size() const {
    std::size_t n = 0;
    for (const auto& name : order_) n += items_.at(name).value.size();
    return n;
}

void ParamStore::zero_grads() {
    for (auto& [name, t] : items_) t.grad.fill(0.0);
}

double ParamStore::grad_sq_norm() const {
    double acc = 0.0;
    for (const auto& name : order_) {
        const Mat& g = items_.at(name).grad;
        for (std::size_t i = 0; i < g.size(); ++i) acc += g.data()[i] * g.data()[i];
    }
    return acc;
}

void ParamStore::scale_grads(double s) {
    for (auto& [name, t] : items_) {
        double* p = t.grad.data();
        for (std::size_t i = 0; i < t.grad.size(); ++i) p[i] *= s;
    }
}

void ParamStore::assign_values(const ParamStore& other) {
    if (order_ != other.order_) throw std::invalid_argument("ParamStore: layout mismatch in assign_values");
    for (const auto& name : order_) {
        Tensor& dst = items_.at(name);
        const Tensor& src = other.items_.at(name);
        if (dst.value.rows() != src.value.rows() || dst.value.cols() != src.value.cols())
            throw std::invalid_argument("ParamStore: shape mismatch for " + name);
        dst.value = src.value;
    }
}

}  // namespace twinpp::num
