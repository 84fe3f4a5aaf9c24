#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "daqn/nnkit.hpp"
#include "random_nets.hpp"

using namespace daqn;

namespace {

Network single(const LayerSpec& layer, Shape input) { return Network(NetworkSpec{std::move(input), {layer}}, 1); }

}  // namespace

TEST_CASE("conv2d valid 3x3 on 1x32x32 gives 1x30x30") {
  Network net = single(LayerSpec::conv2d(1, 1, 3), {1, 32, 32});
  CHECK(net.output_shape() == Shape{1, 30, 30});
  CHECK(net.forward(Tensor({1, 32, 32}, 0.5)).shape() == Shape{1, 30, 30});
}

TEST_CASE("relu forward") {
  Network net = single(LayerSpec::relu(), {3});
  Tensor y = net.forward(Tensor({3}, {-1.0, 0.0, 2.0}));
  CHECK(y == Tensor({3}, {0.0, 0.0, 2.0}));
}

TEST_CASE("dense with zero weights outputs zeros") {
  Network net = single(LayerSpec::dense(4, 2), {4});
  net.set_layer_params(0, {Tensor({2, 4}), Tensor({2})});
  CHECK(net.forward(Tensor({4}, {1, -2, 3, 7})) == Tensor({2}, {0.0, 0.0}));
}

TEST_CASE("forward rejects a mismatched input and names the layer") {
  Network net(NetworkSpec{{4}, {LayerSpec::dense(4, 3), LayerSpec::relu(), LayerSpec::dense(3, 2)}}, 0);
  try {
    net.forward(Tensor({3}));
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("layer 0 (dense(4->3))") != std::string::npos);
  }
}

TEST_CASE("inconsistent chain is rejected naming the offending layer") {
  try {
    Network net(NetworkSpec{{4}, {LayerSpec::dense(4, 3), LayerSpec::relu(), LayerSpec::dense(5, 2)}}, 0);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("layer 2") != std::string::npos);
  }
}

TEST_CASE("dense 1->1 backward") {
  Network net = single(LayerSpec::dense(1, 1), {1});
  net.set_layer_params(0, {Tensor({1, 1}, {3.0}), Tensor({1}, {0.0})});
  net.forward(Tensor({1}, {2.0}));
  Tensor dx = net.backward(Tensor({1}, {1.0}));
  CHECK(dx[0] == 3.0);
  CHECK(find_param(net, "0.dense.weight")[0] == 3.0);
  auto params = net.parameters();
  CHECK((*params[0].grad)[0] == 2.0);
  CHECK((*params[1].grad)[0] == 1.0);
}

TEST_CASE("maxpool routes the gradient to the maximum only") {
  Network net = single(LayerSpec::maxpool2d(2), {1, 2, 2});
  Tensor y = net.forward(Tensor({1, 2, 2}, {1, 2, 3, 4}));
  CHECK(y[0] == 4.0);
  Tensor dx = net.backward(Tensor({1, 1, 1}, {1.0}));
  CHECK(dx == Tensor({1, 2, 2}, {0, 0, 0, 1}));
}

TEST_CASE("upsample is nearest-neighbour and its backward sums blocks") {
  Network net = single(LayerSpec::upsample2d(2), {1, 1, 2});
  Tensor y = net.forward(Tensor({1, 1, 2}, {5, 7}));
  CHECK(y == Tensor({1, 2, 4}, {5, 5, 7, 7, 5, 5, 7, 7}));
  Tensor dx = net.backward(Tensor({1, 2, 4}, {1, 2, 3, 4, 5, 6, 7, 8}));
  CHECK(dx == Tensor({1, 1, 2}, {1 + 2 + 5 + 6, 3 + 4 + 7 + 8}));
}

TEST_CASE("conv2d matches a direct convolution") {
  // Direct nested-loop cross-correlation as an independent reference.
  Rng rng(3);
  const LayerSpec spec = LayerSpec::conv2d(2, 3, 3, 2, 1);
  Network net = single(spec, {2, 5, 6});
  Tensor x = testing::random_tensor({2, 5, 6}, rng);
  Tensor y = net.forward(x);
  const Tensor& w = *net.parameters()[0].value;
  const Tensor& b = *net.parameters()[1].value;
  const Shape out = net.output_shape();
  REQUIRE(out == Shape{3, 3, 3});
  for (int oc = 0; oc < 3; ++oc)
    for (int oy = 0; oy < out[1]; ++oy)
      for (int ox = 0; ox < out[2]; ++ox) {
        double acc = b[oc];
        for (int c = 0; c < 2; ++c)
          for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx) {
              const int iy = oy * 2 + ky - 1, ix = ox * 2 + kx - 1;
              if (iy < 0 || iy >= 5 || ix < 0 || ix >= 6) continue;
              acc += w.at({oc, c, ky, kx}) * x.at({c, iy, ix});
            }
        CHECK(y.at({oc, oy, ox}) == doctest::Approx(acc).epsilon(1e-12));
      }
}

TEST_CASE("backward without forward is an error") {
  Network net = single(LayerSpec::dense(2, 2), {2});
  CHECK_THROWS_AS(net.backward(Tensor({2})), std::logic_error);
}

TEST_CASE("batch and single-sample forward agree") {
  Network net(NetworkSpec{{3}, {LayerSpec::dense(3, 4), LayerSpec::relu(), LayerSpec::dense(4, 2)}}, 5);
  Rng rng(1);
  Tensor batch = testing::random_tensor({4, 3}, rng);
  Tensor ys = net.forward(batch);
  for (int i = 0; i < 4; ++i) CHECK(net.forward(batch.slice(i)) == ys.slice(i));
}

TEST_CASE("loss values") {
  CHECK(loss_and_grad(LossKind::mse, Tensor({2}, {1, 2}), Tensor({2}, {1, 2})).value == 0.0);
  const auto r = loss_and_grad(LossKind::mse, Tensor({2}, {0, 0}), Tensor({2}, {2, 0}));
  CHECK(r.value == 2.0);
  CHECK(r.grad == Tensor({2}, {-2.0, 0.0}));
  const int cls = 0;
  CHECK(cross_entropy(Tensor({2}, {0.5, 0.5}), std::span(&cls, 1)).value == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(loss_and_grad(LossKind::mse, Tensor({2}), Tensor({3})), ShapeError);
}

TEST_CASE("cross-entropy clamps zero probabilities instead of failing") {
  const auto r = loss_and_grad(LossKind::cross_entropy, Tensor({2}, {0.0, 1.0}), Tensor({2}, {1.0, 0.0}));
  CHECK(std::isfinite(r.value));
  CHECK(r.value == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("sgd step") {
  Tensor p({1}, {1.0}), g({1}, {2.0});
  std::vector<ParamRef> refs{{"p", &p, &g}};
  Optimizer sgd({OptimizerKind::sgd, 0.1});
  sgd.step(refs);
  CHECK(p[0] == doctest::Approx(0.8).epsilon(1e-15));
  g[0] = 0.0;
  Optimizer big({OptimizerKind::sgd, 123.0});
  big.step(refs);
  CHECK(p[0] == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("adam first step moves by about the learning rate") {
  // t=1: m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  Tensor p({1}, {1.0}), g({1}, {1.0});
  std::vector<ParamRef> refs{{"p", &p, &g}};
  Optimizer adam({OptimizerKind::adam, 0.001});
  adam.step(refs);
  CHECK(p[0] == doctest::Approx(1.0 - 0.001 / (1.0 + 1e-8)).epsilon(1e-14));
}

TEST_CASE("optimizer rejects a non-positive learning rate") {
  CHECK_THROWS_AS(Optimizer({OptimizerKind::sgd, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Optimizer({OptimizerKind::adam, -1.0}), std::invalid_argument);
}

TEST_CASE("grad_check on dense-relu-dense with MSE") {
  Network net(NetworkSpec{{3}, {LayerSpec::dense(3, 2), LayerSpec::relu(), LayerSpec::dense(2, 1)}}, 11);
  Rng rng(2);
  Tensor x = testing::random_tensor({3}, rng);
  Tensor t = testing::random_tensor({1}, rng);
  const auto before = net.parameters();
  std::vector<Tensor> snapshot;
  for (const auto& p : before) snapshot.push_back(*p.value);
  const auto r = grad_check(net, x, LossKind::mse, t, 1e-5);
  CHECK(r.max_rel_error < 1e-4);
  CHECK(r.checked > 0);
  const auto after = net.parameters();
  for (std::size_t i = 0; i < after.size(); ++i) CHECK(*after[i].value == snapshot[i]);
}

TEST_CASE("grad_check matches a hand-rolled central difference") {
  // Independent route: perturb the weight directly and difference the loss.
  Network net(NetworkSpec{{2}, {LayerSpec::dense(2, 2), LayerSpec::relu(), LayerSpec::dense(2, 1)}}, 4);
  const Tensor x({2}, {0.3, -0.7}), t({1}, {0.25});
  auto loss_at = [&](Network& n) { return loss_and_grad(LossKind::mse, n.forward(x), t).value; };
  Tensor out = net.forward(x);
  net.backward(loss_and_grad(LossKind::mse, out, t).grad);
  auto params = net.parameters();
  for (auto& p : params)
    for (Index i = 0; i < p.value->size(); ++i) {
      const double analytic = (*p.grad)[i];
      const double saved = (*p.value)[i];
      (*p.value)[i] = saved + 1e-6;
      const double up = loss_at(net);
      (*p.value)[i] = saved - 1e-6;
      const double down = loss_at(net);
      (*p.value)[i] = saved;
      CHECK(analytic == doctest::Approx((up - down) / 2e-6).epsilon(1e-6));
    }
}

TEST_CASE("grad_check skips a relu kink instead of failing") {
  Network net = single(LayerSpec::relu(), {1});
  const auto r = grad_check(net, Tensor({1}, {0.0}), LossKind::mse, Tensor({1}, {1.0}), 1e-5);
  CHECK(r.skipped == 1);
  CHECK(r.checked == 0);
  CHECK(r.max_rel_error == 0.0);
}

TEST_CASE("grad_check on conv+flatten+dense+softmax with cross-entropy") {
  Network net(NetworkSpec{{1, 5, 5},
                          {LayerSpec::conv2d(1, 2, 3), LayerSpec::flatten(), LayerSpec::dense(18, 3),
                           LayerSpec::softmax()}},
              9);
  Rng rng(8);
  Tensor x = testing::random_tensor({1, 5, 5}, rng);
  const auto r = grad_check(net, x, LossKind::cross_entropy, Tensor({3}, {0.0, 1.0, 0.0}), 1e-5);
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("grad_check rejects eps outside [1e-7, 1e-3]") {
  Network net = single(LayerSpec::relu(), {1});
  CHECK_THROWS_AS(grad_check(net, Tensor({1}, {1.0}), LossKind::mse, Tensor({1}), 1e-2), std::invalid_argument);
}

TEST_CASE("gradient property over 20 random networks") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto c = testing::random_grad_case(seed);
    CHECK(c.net.parameter_count() <= 500);
    const auto r = grad_check(c.net, c.input, c.loss, c.target, 1e-5);
    INFO("seed " << seed << " checked " << r.checked << " skipped " << r.skipped);
    CHECK(r.max_rel_error < 1e-4);
    CHECK(r.checked > 0);
  }
}

TEST_CASE("softmax outputs are positive and sum to one") {
  Network net = single(LayerSpec::softmax(), {5});
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor y = net.forward(testing::random_tensor({5}, rng, -30.0, 30.0));
    CHECK(std::abs(y.data().sum() - 1.0) < 1e-12);
    CHECK((y.data().array() > 0.0).all());
  }
}

TEST_CASE("eval forward is bit-identical; train dropout reproducible by seed") {
  NetworkSpec spec{{8}, {LayerSpec::dense(8, 16), LayerSpec::relu(), LayerSpec::dropout(0.5), LayerSpec::dense(16, 2)}};
  Network net(spec, 2);
  Rng rng(0);
  Tensor x = testing::random_tensor({8}, rng);
  CHECK(net.forward(x) == net.forward(x));

  Network a = net, b = net;
  a.set_mode(Mode::train);
  b.set_mode(Mode::train);
  a.seed_dropout(77);
  b.seed_dropout(77);
  for (int i = 0; i < 5; ++i) CHECK(a.forward(x) == b.forward(x));
  a.set_mode(Mode::eval);
  CHECK(a.forward(x) == net.forward(x));
}

TEST_CASE("inverted dropout keeps the expected activation") {
  Network net = single(LayerSpec::dropout(0.25), {20000});
  net.set_mode(Mode::train);
  Tensor y = net.forward(Tensor({20000}, 1.0));
  CHECK(y.data().mean() == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("initialization: He for relu-followed layers, Glorot otherwise, zero biases") {
  Network net(NetworkSpec{{100}, {LayerSpec::dense(100, 50), LayerSpec::relu(), LayerSpec::dense(50, 30)}}, 3);
  auto params = net.parameters();
  const double he = std::sqrt(6.0 / 100.0), glorot = std::sqrt(6.0 / 80.0);
  CHECK(params[0].value->data().cwiseAbs().maxCoeff() <= he);
  CHECK(params[0].value->data().cwiseAbs().maxCoeff() > 0.9 * he);
  CHECK(params[2].value->data().cwiseAbs().maxCoeff() <= glorot);
  CHECK(params[2].value->data().cwiseAbs().maxCoeff() > 0.9 * glorot);
  CHECK(params[1].value->data().isZero());
  CHECK(params[3].value->data().isZero());
}

TEST_CASE("network spec JSON and parameter blob round trip") {
  NetworkSpec spec{{1, 8, 8},
                   {LayerSpec::conv2d(1, 2, 3, 1, 1), LayerSpec::relu(), LayerSpec::maxpool2d(2),
                    LayerSpec::dropout(0.1), LayerSpec::flatten(), LayerSpec::dense(32, 3, false), LayerSpec::softmax()}};
  CHECK(network_spec_from_json(to_json(spec)) == spec);

  Network net(spec, 12);
  const auto dir = std::filesystem::temp_directory_path() / "daqn_test_nnkit";
  std::filesystem::create_directories(dir);
  save_network(net, dir / "net", Json{{"note", "x"}});
  Json meta;
  Network loaded = load_network(dir / "net", &meta);
  CHECK(meta["note"] == "x");
  CHECK(loaded.spec() == spec);
  auto a = net.parameters(), b = loaded.parameters();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i].value == *b[i].value);

  // Manifest offsets are byte offsets into a float64 little-endian blob.
  CHECK(std::filesystem::file_size(dir / "net.bin") == net.parameter_count() * 8);
}

TEST_CASE("network spec JSON rejects unknown kinds and bad chains") {
  CHECK_THROWS_AS(network_spec_from_json(Json::parse(R"({"input_shape":[2],"layers":[{"kind":"lstm"}]})")),
                  ConfigError);
  CHECK_THROWS_AS(
      network_spec_from_json(Json::parse(R"({"input_shape":[2],"layers":[{"kind":"dense","in_units":3,"out_units":1}]})")),
      ConfigError);
}

TEST_CASE("normalization standardizes each feature") {
  Tensor data({4, 2}, {1, 10, 3, 10, 5, 10, 7, 10});
  Normalization n = Normalization::fit(data);
  CHECK(n.mean[0] == doctest::Approx(4.0));
  CHECK(n.stddev[1] == 1.0);  // constant feature
  Tensor z = n.apply(data);
  CHECK(z.columns().row(0).mean() == doctest::Approx(0.0));
  CHECK(normalization_from_json(to_json(n)) == n);
}
