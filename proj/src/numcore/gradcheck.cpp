#include "twinpp/numcore/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twinpp::num {

double gradient_check(const std::function<double()>& loss_fn, ParamStore& params, double eps) {
    if (!(eps >= 1e-6 && eps <= 1e-3))
        throw std::invalid_argument("gradient_check: eps out of [1e-6, 1e-3]");

    const double base_a = loss_fn();
    const double base_b = loss_fn();
    if (base_a != base_b)
        throw std::runtime_error("gradient_check: loss_fn is not deterministic");
    if (!std::isfinite(base_a))
        throw std::runtime_error("gradient_check: non-finite loss at base point");

    double max_rel = 0.0;
    for (const auto& name : params.names()) {
        Tensor& t = params.at(name);
        for (std::size_t i = 0; i < t.value.size(); ++i) {
            double& x = t.value.data()[i];
            const double saved = x;
            x = saved + eps;
            const double lp = loss_fn();
            x = saved - eps;
            const double lm = loss_fn();
            x = saved;
            const double numeric = (lp - lm) / (2.0 * eps);
            const double analytic = t.grad.data()[i];
            const double denom = std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
            max_rel = std::max(max_rel, std::fabs(analytic - numeric) / denom);
        }
    }
    return max_rel;
}

}  // namespace twinpp::num
