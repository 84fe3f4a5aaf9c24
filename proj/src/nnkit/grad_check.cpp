#include "daqn/nnkit/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace daqn {
namespace {

struct Probe {
  double loss;
  std::vector<std::int64_t> signature;
};

Probe evaluate(Network& net, const Tensor& input, LossKind kind, const Tensor& target) {
  Tensor out = net.forward(input);
  return {loss_and_grad(kind, out, target).value, net.activation_signature()};
}

}  // namespace

GradCheckResult grad_check(Network& net, const Tensor& input, LossKind kind, const Tensor& target, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) throw std::invalid_argument("grad_check eps must lie in [1e-7, 1e-3]");
  const Mode saved_mode = net.mode();
  net.set_mode(Mode::eval);

  Tensor out = net.forward(input);
  const auto base_sig = net.activation_signature();
  Tensor input_grad = net.backward(loss_and_grad(kind, out, target).grad);

  GradCheckResult result;
  auto check = [&](double& slot, double analytic, const Tensor& probe_input) {
    const double saved = slot;
    slot = saved + eps;
    const Probe plus = evaluate(net, probe_input, kind, target);
    slot = saved - eps;
    const Probe minus = evaluate(net, probe_input, kind, target);
    slot = saved;
    if (plus.signature != base_sig || minus.signature != base_sig) {
      ++result.skipped;
      return;
    }
    const double numeric = (plus.loss - minus.loss) / (2.0 * eps);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    result.max_rel_error = std::max(result.max_rel_error, std::abs(analytic - numeric) / denom);
    ++result.checked;
  };

  // Snapshot analytic gradients first; probing forwards overwrite caches but
  // not the gradient tensors, which only backward writes.
  for (const auto& p : net.parameters()) {
    const Tensor analytic = *p.grad;
    for (Index i = 0; i < p.value->size(); ++i) check((*p.value)[i], analytic[i], input);
  }

  Tensor probe_input = input;
  for (Index i = 0; i < probe_input.size(); ++i) check(probe_input[i], input_grad[i], probe_input);

  net.set_mode(saved_mode);
  return result;
}

}  // namespace daqn
