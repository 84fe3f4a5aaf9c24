#include "daqn/transfer/transfer.hpp"

#include <cmath>

namespace daqn {
namespace {

std::vector<LayerSpec> with_head(const Shape& input_shape, std::span<const LayerSpec> body, int n_actions) {
  if (n_actions < 2) throw std::invalid_argument("n_actions must be >= 2");
  std::vector<LayerSpec> layers(body.begin(), body.end());
  const Shape out = shape_chain(NetworkSpec{input_shape, layers}).back();
  if (out.size() > 1) layers.push_back(LayerSpec::flatten());
  layers.push_back(LayerSpec::dense(static_cast<int>(shape_size(out)), n_actions));
  return layers;
}

/// Number of leading body layers taken over from the encoder.
std::size_t copied_prefix(const AutoEncoder& ae, const TransferPlan& plan, std::span<const LayerSpec> body) {
  const auto& enc = ae.encoder.spec().layers;
  std::size_t need = enc.size();
  if (plan.depth == TransferDepth::first_layer_only) {
    need = 0;
    while (need < enc.size() && !enc[need].has_params()) ++need;
    if (need == enc.size()) throw ShapeError("encoder has no parameterized layer to copy");
    ++need;
  }
  for (std::size_t i = 0; i < need; ++i) {
    if (i >= body.size())
      throw ShapeError("body layer " + std::to_string(i) + " missing: encoder layer " + std::to_string(i) + " (" +
                       describe(enc[i]) + ") has no counterpart");
    if (!(body[i] == enc[i]))
      throw ShapeError("body layer " + std::to_string(i) + " (" + describe(body[i]) + ") does not match encoder layer " +
                       std::to_string(i) + " (" + describe(enc[i]) + ")");
  }
  if (plan.depth == TransferDepth::all_encoder_layers && body.size() != enc.size())
    throw ShapeError("body layer " + std::to_string(enc.size()) + " (" + describe(body[enc.size()]) +
                     ") has no encoder counterpart; all_encoder_layers needs the body to equal the encoder");
  return need;
}

}  // namespace

std::string_view to_string(TransferDepth d) {
  return d == TransferDepth::all_encoder_layers ? "all_encoder_layers" : "first_layer_only";
}

std::optional<TransferDepth> parse_transfer_depth(std::string_view name) {
  if (name == "all_encoder_layers") return TransferDepth::all_encoder_layers;
  if (name == "first_layer_only") return TransferDepth::first_layer_only;
  return std::nullopt;
}

Json to_json(const TransferPlan& plan) {
  return Json{{"depth", std::string(to_string(plan.depth))},
              {"n_actions", plan.n_actions},
              {"head_init_seed", plan.head_init_seed}};
}

TransferPlan transfer_plan_from_json(const Json& j) {
  TransferPlan plan;
  try {
    const auto depth = parse_transfer_depth(j.value("depth", std::string(to_string(plan.depth))));
    if (!depth) throw ConfigError("unknown transfer depth");
    plan.depth = *depth;
    plan.n_actions = j.value("n_actions", plan.n_actions);
    plan.head_init_seed = j.value("head_init_seed", plan.head_init_seed);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("transfer plan: ") + e.what());
  }
  if (plan.n_actions < 2) throw ConfigError("transfer plan: n_actions must be >= 2");
  return plan;
}

Network build_fresh_q_network(const Shape& input_shape, std::span<const LayerSpec> body, int n_actions,
                              std::uint64_t seed) {
  return Network(NetworkSpec{input_shape, with_head(input_shape, body, n_actions)}, seed);
}

Network build_q_network(const AutoEncoder& ae, const TransferPlan& plan, std::span<const LayerSpec> body) {
  const std::size_t prefix = copied_prefix(ae, plan, body);
  Network q = build_fresh_q_network(ae.input_shape(), body, plan.n_actions, plan.head_init_seed);
  for (std::size_t i = 0; i < prefix; ++i) {
    const auto src = ae.encoder.layer_params(i);
    if (src.empty()) continue;
    std::vector<Tensor> values;
    for (const Tensor* t : src) values.push_back(*t);
    q.set_layer_params(i, values);
  }
  return q;
}

TransferReport verify_transfer(const Network& qnet, const AutoEncoder& ae, const TransferPlan& plan) {
  const auto& enc = ae.encoder.spec().layers;
  std::size_t copy_limit = enc.size();
  if (plan.depth == TransferDepth::first_layer_only) {
    copy_limit = 0;
    while (copy_limit < enc.size() && !enc[copy_limit].has_params()) ++copy_limit;
    ++copy_limit;
  }
  TransferReport report;
  const std::size_t head = qnet.layer_count() - 1;
  for (std::size_t i = 0; i < qnet.layer_count(); ++i) {
    const auto q = qnet.layer_params(i);
    if (q.empty()) continue;
    if (i == head) {
      for (const Tensor* t : q) report.head_parameter_count += static_cast<std::size_t>(t->size());
    }
    TransferLayerReport row{i, describe(qnet.spec().layers[i]), i < copy_limit && i < enc.size(), std::nullopt};
    if (i < enc.size() && i != head && qnet.spec().layers[i] == enc[i]) {
      const auto e = ae.encoder.layer_params(i);
      double worst = 0.0;
      for (std::size_t k = 0; k < q.size(); ++k)
        worst = std::max(worst, (q[k]->data() - e[k]->data()).cwiseAbs().maxCoeff());
      row.max_abs_diff = worst;
    }
    report.layers.push_back(std::move(row));
  }
  return report;
}

}  // namespace daqn
