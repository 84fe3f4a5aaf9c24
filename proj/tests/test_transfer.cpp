#include <doctest.h>

#include "daqn/autoenc.hpp"
#include "daqn/qlearn.hpp"
#include "daqn/transfer.hpp"
#include "random_nets.hpp"

using namespace daqn;

namespace {

AutoEncoder cartpole_ae(std::uint64_t seed) {
  const int widths[] = {4, 16, 16, 3};
  return build_dense_ae(widths, seed);
}

std::vector<LayerSpec> conv_encoder() {
  return {LayerSpec::conv2d(1, 3, 3, 1, 1), LayerSpec::relu(), LayerSpec::maxpool2d(2), LayerSpec::conv2d(3, 4, 3),
          LayerSpec::relu()};
}

}  // namespace

TEST_CASE("all encoder layers are copied bit-exactly") {
  AutoEncoder ae = cartpole_ae(1);
  const auto body = ae.encoder.spec().layers;
  Network q = build_q_network(ae, {TransferDepth::all_encoder_layers, 2, 9}, body);
  CHECK(q.output_shape() == Shape{2});
  for (std::size_t i = 0; i < body.size(); ++i) {
    const auto a = q.layer_params(i), b = ae.encoder.layer_params(i);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(*a[k] == *b[k]);
  }
  CHECK(q.spec().layers.back() == LayerSpec::dense(3, 2));
}

TEST_CASE("first_layer_only copies layer 1 and leaves deeper layers fresh") {
  AutoEncoder ae = cartpole_ae(2);
  const auto body = ae.encoder.spec().layers;
  const TransferPlan plan{TransferDepth::first_layer_only, 2, 9};
  Network q = build_q_network(ae, plan, body);
  CHECK(*q.layer_params(0)[0] == *ae.encoder.layer_params(0)[0]);
  CHECK(*q.layer_params(2)[0] != *ae.encoder.layer_params(2)[0]);
  const TransferReport r = verify_transfer(q, ae, plan);
  CHECK(std::count_if(r.layers.begin(), r.layers.end(), [](const auto& l) { return l.copied; }) == 1);
  CHECK(*r.layers[0].max_abs_diff == 0.0);
  CHECK(*r.layers[1].max_abs_diff > 0.0);
}

TEST_CASE("first_layer_only accepts a body deeper than the encoder") {
  AutoEncoder ae = cartpole_ae(3);
  const std::vector<LayerSpec> body{LayerSpec::dense(4, 16), LayerSpec::relu(), LayerSpec::dense(16, 32),
                                    LayerSpec::relu()};
  Network q = build_q_network(ae, {TransferDepth::first_layer_only, 2, 0}, body);
  CHECK(q.spec().layers.back() == LayerSpec::dense(32, 2));
  CHECK_THROWS_AS(build_q_network(ae, {TransferDepth::all_encoder_layers, 2, 0}, body), ShapeError);
}

TEST_CASE("incompatible body is rejected naming the first mismatching layer") {
  AutoEncoder ae = cartpole_ae(4);
  std::vector<LayerSpec> body = ae.encoder.spec().layers;
  body[2] = LayerSpec::dense(16, 8);
  body[4] = LayerSpec::dense(8, 3);
  try {
    build_q_network(ae, {TransferDepth::all_encoder_layers, 2, 0}, body);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("body layer 2 (dense(16->8))") != std::string::npos);
    CHECK(msg.find("dense(16->16)") != std::string::npos);
  }
  CHECK_THROWS_AS(build_q_network(ae, {TransferDepth::all_encoder_layers, 1, 0}, ae.encoder.spec().layers),
                  std::invalid_argument);
}

TEST_CASE("copied prefix reproduces encoder activations and no decoder layer remains") {
  const auto enc = conv_encoder();
  AutoEncoder ae = build_conv_ae({1, 8, 8}, enc, 5);
  Network q = build_q_network(ae, {TransferDepth::all_encoder_layers, 3, 1}, enc);
  CHECK(q.output_shape() == Shape{3});
  for (const auto& l : q.spec().layers) CHECK(l.kind != LayerKind::upsample2d);
  Rng rng(6);
  for (int i = 0; i < 10; ++i) {
    const Tensor x = testing::random_tensor({2, 1, 8, 8}, rng, 0, 1);
    const Eigen::MatrixXd a = q.forward_columns(x.columns(), enc.size());
    const Eigen::MatrixXd b = ae.encoder.forward_columns(x.columns());
    CHECK(a == b);
  }
}

TEST_CASE("transfer is deterministic and leaves the auto-encoder untouched") {
  AutoEncoder ae = cartpole_ae(7);
  const Tensor before = *ae.encoder.layer_params(0)[0];
  const TransferPlan plan{TransferDepth::all_encoder_layers, 2, 42};
  Network a = build_q_network(ae, plan, ae.encoder.spec().layers);
  Network b = build_q_network(ae, plan, ae.encoder.spec().layers);
  for (std::size_t i = 0; i < a.layer_count(); ++i)
    for (std::size_t k = 0; k < a.layer_params(i).size(); ++k) CHECK(*a.layer_params(i)[k] == *b.layer_params(i)[k]);
  CHECK(*ae.encoder.layer_params(0)[0] == before);
}

TEST_CASE("verify_transfer: zero diffs after build, head moves after a td step") {
  AutoEncoder ae = cartpole_ae(8);
  const TransferPlan plan{TransferDepth::all_encoder_layers, 2, 3};
  Network q = build_q_network(ae, plan, ae.encoder.spec().layers);
  TransferReport r = verify_transfer(q, ae, plan);
  REQUIRE(r.layers.size() == 4);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.layers[i].copied);
    CHECK(*r.layers[i].max_abs_diff == 0.0);
  }
  CHECK_FALSE(r.layers[3].copied);
  CHECK(r.head_parameter_count == 3 * 2 + 2);

  DqnConfig cfg;
  cfg.optimizer.kind = OptimizerKind::sgd;
  cfg.optimizer.learning_rate = 0.1;
  Agent agent(q, cfg, 0);
  const Network head_before = agent.online();
  std::vector<Transition> batch{{Tensor({4}, {0.5, 0.5, 0.5, 0.5}), 1, 5.0, Tensor({4}), true}};
  std::vector<const Transition*> p{&batch[0]};
  agent.td_train_step(p);
  CHECK(*agent.online().layer_params(6)[0] != *head_before.layer_params(6)[0]);
}

TEST_CASE("TransferPlan JSON round trip") {
  const TransferPlan plan{TransferDepth::first_layer_only, 3, 77};
  CHECK(transfer_plan_from_json(to_json(plan)) == plan);
  CHECK_THROWS_AS(transfer_plan_from_json(Json{{"depth", "half"}}), ConfigError);
  CHECK_THROWS_AS(transfer_plan_from_json(Json{{"n_actions", 1}}), ConfigError);
}
