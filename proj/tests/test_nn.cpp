// Copyright 2026 The iqaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "iqaug/error.hpp"
#include "iqaug/nn/adam.hpp"
#include "iqaug/nn/lstm.hpp"
#include "iqaug/nn/model.hpp"
#include "iqaug/nn/schedule.hpp"
#include "iqaug/nn/trainer.hpp"
#include "nn_checks.hpp"
#include "test_util.hpp"

using namespace iqaug;
using namespace iqaug::nn;

namespace {

std::vector<FeatureFrame> random_features(int n, std::size_t len, std::uint64_t seed) {
  RandomEngine rng(seed);
  std::vector<FeatureFrame> out;
  for (int k = 0; k < n; ++k) out.push_back(frame_features(test::random_frame(len, rng)));
  return out;
}

}  // namespace

TEST_CASE("parameter counts") {
  CHECK(count_params(128, 11, 2) == 201099);
  CHECK(count_params(64, 11, 2) == 51403);
  // h=1, K=2, d=2: 4*2 + 4 + 8 + 4 + 4 + 8 + 2 + 2
  CHECK(count_params(1, 2, 2) == 40);
  for (int h : {1, 8, 64, 128}) {
    const NetworkParams<float> p(Shape{2, h, 11});
    std::int64_t total = 0;
    for (const TensorInfo& t : p.layout()) total += t.size();
    CHECK(total == count_params(h, 11, 2));
    CHECK(p.size() == total);
  }
  CHECK(macs_per_step(128, 2) == 4 * 128 * (2 + 128) + 4 * 128 * (128 + 128));
}

TEST_CASE("tensor layout order") {
  const NetworkParams<float> p(Shape{2, 4, 3});
  std::vector<std::string> names;
  for (const TensorInfo& t : p.layout()) names.push_back(t.name);
  CHECK(names == std::vector<std::string>{"lstm1.w_ih", "lstm1.w_hh", "lstm1.b_ih", "lstm1.b_hh", "lstm2.w_ih",
                                          "lstm2.w_hh", "lstm2.b_ih", "lstm2.b_hh", "head.w", "head.b"});
  CHECK(p.head_w().rows() == 3);
  CHECK(p.head_w().cols() == 4);
  CHECK(p.w_ih(1).cols() == 4);
}

TEST_CASE("forget-gate bias initialisation") {
  const auto p = init_params<float>(Shape{2, 8, 3}, 1);
  for (int l = 0; l < kLayers; ++l) {
    for (int k = 0; k < 8; ++k) {
      CHECK(p.b_ih(l)(8 + k) == 1.0f);
      CHECK(p.b_hh(l)(8 + k) == 0.0f);
    }
  }
  const float bound = 1.0f / std::sqrt(8.0f);
  CHECK(p.w_hh(0).cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("softmax output is a distribution") {
  const auto p = init_params<float>(Shape{2, 16, 11}, 2);
  for (const FeatureFrame& f : random_features(5, 32, 3)) {
    const auto probs = forward(p, f);
    REQUIRE(probs.size() == 11);
    for (float v : probs) CHECK(v > 0.0f);
    CHECK(std::accumulate(probs.begin(), probs.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("zero parameters give the uniform distribution") {
  NetworkParams<double> p(Shape{2, 8, 11});
  const auto probs = forward(p, random_features(1, 16, 4)[0]);
  for (double v : probs) CHECK(v == doctest::Approx(1.0 / 11.0));
  // -ln(1/11)
  CHECK(cross_entropy<double>(probs, 3) == doctest::Approx(2.397895).epsilon(1e-6));
  const std::vector<double> half = {0.5, 0.5};
  CHECK(cross_entropy<double>(half, 1) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK_THROWS_AS(cross_entropy<double>(half, 2), Error);
}

TEST_CASE("eval forward is a pure function") {
  const auto p = init_params<float>(Shape{2, 16, 4}, 7);
  const auto frames = random_features(3, 64, 8);
  const std::vector<int> labels = {0, 1, 2};
  const auto a = forward(p, make_batch<float>(frames, labels));
  const auto b = forward(p, make_batch<float>(frames, labels));
  CHECK(a == b);
  // Batched and single-frame evaluation agree.
  for (int k = 0; k < 3; ++k) {
    const auto single = forward(p, frames[static_cast<std::size_t>(k)]);
    for (int c = 0; c < 4; ++c) CHECK(single[static_cast<std::size_t>(c)] == doctest::Approx(a(c, k)).epsilon(1e-5));
  }
}

TEST_CASE("gradients match central differences") {
  for (bool dropout : {false, true}) {
    CAPTURE(dropout);
    for (const test::TensorError& e : test::gradient_check(11, dropout)) {
      CAPTURE(e.name);
      CHECK(e.max_rel < 1e-4);
    }
  }
}

TEST_CASE("single-sample batch gradient equals the mean of one") {
  const auto p = init_params<double>(Shape{2, 6, 3}, 5);
  const auto frames = random_features(2, 12, 6);
  const std::vector<int> labels = {1, 2};
  const auto both = backward(p, make_batch<double>(frames, labels));
  const auto first = backward(p, make_batch<double>(std::span(frames).first(1), std::span(labels).first(1)));
  const auto second = backward(p, make_batch<double>(std::span(frames).last(1), std::span(labels).last(1)));
  CHECK((both.grad.flat() - 0.5 * (first.grad.flat() + second.grad.flat())).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(both.loss == doctest::Approx(0.5 * (first.loss + second.loss)));
}

TEST_CASE("dense head gradient is (p - y) times the last hidden state") {
  const auto p = init_params<double>(Shape{2, 8, 5}, 9);
  const auto frames = random_features(3, 20, 10);
  const std::vector<int> labels = {4, 0, 2};
  const auto batch = make_batch<double>(frames, labels);
  const auto probs = forward(p, batch);
  const auto last = last_hidden(p, batch);
  Matrix<double> delta = probs;
  for (int b = 0; b < 3; ++b) delta(labels[static_cast<std::size_t>(b)], b) -= 1.0;
  const Matrix<double> expected_w = delta * last.transpose() / 3.0;
  const Eigen::VectorXd expected_b = delta.rowwise().sum() / 3.0;
  const auto r = backward(p, batch);
  CHECK((r.grad.head_w() - expected_w).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.grad.head_b() - expected_b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dropout masks") {
  RandomEngine rng(1);
  const auto none = make_dropout_masks<float>(4, 10, 3, 0.0, rng);
  CHECK(none.layer[0].minCoeff() == 1.0f);
  const auto half = make_dropout_masks<float>(64, 50, 8, 0.5, rng);
  for (const auto& m : half.layer) {
    CHECK(((m.array() == 0.0f) || (m.array() == 2.0f)).all());
    CHECK(m.mean() == doctest::Approx(1.0).epsilon(0.05));
  }
  CHECK_THROWS_AS(make_dropout_masks<float>(4, 4, 1, 1.0, rng), Error);
}

TEST_CASE("Adam") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    Eigen::VectorXd params = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
    const Eigen::VectorXd before = params;
    AdamState<double> state(5);
    adam_step(state, params, Eigen::VectorXd(Eigen::VectorXd::Zero(5)), 0.001);
    CHECK(params == before);
    CHECK(state.step == 1);
  }
  SUBCASE("first step moves each coordinate by about lr against the gradient sign") {
    Eigen::VectorXd params = Eigen::VectorXd::Zero(3);
    Eigen::VectorXd grads(3);
    grads << 0.3, -2.0, 1e-3;
    AdamState<double> state(3);
    adam_step(state, params, grads, 0.001);
    CHECK(params(0) == doctest::Approx(-0.001).epsilon(1e-4));
    CHECK(params(1) == doctest::Approx(0.001).epsilon(1e-4));
    CHECK(params(2) == doctest::Approx(-0.001).epsilon(1e-4));
  }
  SUBCASE("size mismatch") {
    Eigen::VectorXd params = Eigen::VectorXd::Zero(3);
    AdamState<double> state(2);
    CHECK_THROWS_AS(adam_step(state, params, Eigen::VectorXd(Eigen::VectorXd::Zero(3)), 0.001), Error);
  }
}

TEST_CASE("plateau schedule") {
  const std::vector<double> three = {52, 51.9, 51.8};
  const std::vector<double> four = {52, 51.9, 51.8, 51.7};
  CHECK(next_learning_rate(three, 0.001) == 0.001);
  CHECK(next_learning_rate(four, 0.001) == 0.0005);

  PlateauSchedule s;
  std::vector<double> lrs;
  double lr = 0.001;
  for (double acc : {52.0, 51.9, 51.8, 51.7, 51.0, 51.5, 51.9}) {
    if (s.observe(acc)) lr /= 2;
    lrs.push_back(lr);
  }
  CHECK(lrs == std::vector<double>{0.001, 0.001, 0.001, 0.0005, 0.0005, 0.0005, 0.00025});

  PlateauSchedule improving;
  for (double acc : {0.1, 0.2, 0.3, 0.4, 0.5}) CHECK_FALSE(improving.observe(acc));
  PlateauSchedule equal;
  CHECK_FALSE(equal.observe(0.5));
  CHECK_FALSE(equal.observe(0.5));
  CHECK_FALSE(equal.observe(0.5));
  CHECK(equal.observe(0.5));
}

TEST_CASE("RMDL round trip") {
  Model m;
  m.params = init_params<float>(Shape{2, 8, 3}, 4);
  m.class_names = {"BPSK", "QPSK", "AM-DSB"};
  m.seq_len = 64;
  m.provenance = "unit test";
  const auto bytes = encode_rmdl(m);
  const std::string head(bytes.begin(), bytes.begin() + 7);
  CHECK(head == "RMDL v1");
  const Model back = decode_rmdl(bytes);
  CHECK(back.params.flat() == m.params.flat());
  CHECK(back.class_names == m.class_names);
  CHECK(back.seq_len == 64);
  CHECK(back.provenance == "unit test");
  CHECK(encode_rmdl(back) == bytes);
}

TEST_CASE("RMDL rejects malformed input") {
  Model m;
  m.params = init_params<float>(Shape{2, 4, 2}, 4);
  m.class_names = {"A", "B"};
  m.seq_len = 16;
  const auto bytes = encode_rmdl(m);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_rmdl(truncated), Error);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_rmdl(trailing), Error);
  auto magic = bytes;
  magic[5] = '2';
  CHECK_THROWS_AS(decode_rmdl(magic), Error);
  CHECK_THROWS_AS(read_rmdl("/nonexistent/model.rmdl"), Error);
}

TEST_CASE("overfit one batch") {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) ok += test::overfit_one_batch(seed);
  CHECK(ok >= 2);
}

TEST_CASE("training is deterministic and independent of thread count") {
  const Dataset ds = test::tiny_dataset(3, {0}, 12, 16, 2);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  cfg.seed = 5;
  auto a = init_params<float>(Shape{2, 8, 3}, 1);
  auto b = a;
  const auto ha = train_network(a, ds, cfg, 1);
  const auto hb = train_network(b, ds, cfg, 3);
  CHECK(a.flat() == b.flat());
  REQUIRE(ha.size() == 2);
  CHECK(ha[1].train_loss == hb[1].train_loss);
  CHECK(ha[0].lr == 0.001);

  std::vector<SignalFrame> frames;
  for (const auto& rec : ds.frames) frames.push_back(rec.frame);
  CHECK(predict_proba(a, frames, 1) == predict_proba(a, frames, 4));
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.dropout = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.initial_lr = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("argmax ties go to the lowest index") {
  Eigen::VectorXf v(4);
  v << 0.1f, 0.4f, 0.4f, 0.1f;
  CHECK(argmax(v) == 1);
}
