#pragma once

#include <functional>

#include "twinpp/numcore/param_store.hpp"

namespace twinpp::num {

// Central finite-difference verification of the analytic gradients held in
// `params`. The caller must have populated the gradient accumulators (one
// backward pass over the same loss) before calling. `loss_fn` evaluates the
// loss at the current parameter values and must be deterministic; it is
// called twice at the base point and an error is raised if the results
// differ. eps must lie in [1e-6, 1e-3].
//
// Returns max over all coordinates of
//   |analytic - central_difference| / max(1, |analytic|, |numeric|).
double gradient_check(const std::function<double()>& loss_fn, ParamStore& params, double eps);

}  // namespace twinpp::num
