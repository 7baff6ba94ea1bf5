#pragma once

#include <map>
#include <string>
#include <vector>

#include "twinpp/numcore/vec.hpp"

namespace twinpp::num {

// One learnable tensor paired with a same-shaped gradient accumulator.
struct Tensor {
    Mat value;
    Mat grad;
};

// Named parameter tensors. Names are unique; iteration follows insertion
// order so that serialization, optimizer sweeps and gradient checks are
// deterministic. References returned by add()/at() stay valid for the
// lifetime of the store.
class ParamStore {
public:
    Tensor& add(const std::string& name, std::size_t rows, std::size_t cols);
    Tensor& at(const std::string& name);
    const Tensor& at(const std::string& name) const;
    bool contains(const std::string& name) const;

    const std::vector<std::string>& names() const { return order_; }
    std::size_t total_size() const;

    // Resets every gradient accumulator to exactly 0.
    void zero_grads();

    double grad_sq_norm() const;
    void scale_grads(double s);

    // Copies parameter values from another store with identical layout.
    void assign_values(const ParamStore& other);

private:
    std::map<std::string, Tensor> items_;
    std::vector<std::string> order_;
};

inline constexpr int kFormatVersion = 1;

}  // namespace twinpp::num
