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

#include "iqaug/nn/trainer.hpp"

#include <algorithm>
#include <numeric>

#include "iqaug/error.hpp"
#include "iqaug/nn/adam.hpp"
#include "iqaug/nn/lstm.hpp"
#include "iqaug/nn/schedule.hpp"
#include "iqaug/parallel.hpp"
#include "iqaug/rng.hpp"

namespace iqaug::nn {

namespace {

constexpr int kPredictChunk = 64;

struct ChunkResult {
  NetworkParams<float> grad;
  double loss = 0.0;
  std::size_t correct = 0;
};

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) fail(ErrorKind::kInvalidArgument, "epochs must be positive");
  if (batch_size < 1) fail(ErrorKind::kInvalidArgument, "batch size must be positive");
  if (!(initial_lr > 0.0)) fail(ErrorKind::kInvalidArgument, "learning rate must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail(ErrorKind::kInvalidArgument, "dropout must be in [0, 1)");
  if (plateau_patience < 1) fail(ErrorKind::kInvalidArgument, "plateau patience must be positive");
}

std::vector<EpochRecord> train_network(NetworkParams<float>& params, const Dataset& train, const TrainConfig& cfg,
                                       int threads, const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  if (train.empty()) fail(ErrorKind::kInvalidInput, "train_network: empty training set");
  if (static_cast<std::size_t>(params.shape().classes) != train.class_count()) {
    fail(ErrorKind::kInvalidInput, "train_network: network class count does not match the dataset");
  }
  if (params.shape().input_dim != 2) fail(ErrorKind::kInvalidInput, "train_network: network must take 2 input features");

  const Shape shape = params.shape();
  AdamState<float> adam(params.size());
  PlateauSchedule schedule(cfg.plateau_patience);
  double lr = cfg.initial_lr;
  std::vector<std::size_t> order(train.size());
  std::vector<EpochRecord> history;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    RandomEngine shuffle_rng = make_engine(cfg.seed, {static_cast<std::uint64_t>(epoch), 0x5348});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    const std::size_t n_batches = (order.size() + cfg.batch_size - 1) / cfg.batch_size;
    for (std::size_t b = 0; b < n_batches; ++b) {
      const std::size_t begin = b * cfg.batch_size;
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const std::size_t n_chunks = (end - begin + kGradientChunk - 1) / kGradientChunk;
      std::vector<ChunkResult> chunks(n_chunks);
      parallel_for(n_chunks, threads, [&](std::size_t c) {
        const std::size_t c_begin = begin + c * kGradientChunk;
        const std::size_t c_end = std::min(end, c_begin + kGradientChunk);
        std::vector<FeatureFrame> features;
        std::vector<int> labels;
        for (std::size_t k = c_begin; k < c_end; ++k) {
          const LabeledFrame& rec = train.frames[order[k]];
          features.push_back(frame_features(rec.frame));
          labels.push_back(rec.label);
        }
        const Batch<float> batch = make_batch<float>(features, labels);
        ChunkResult& out = chunks[c];
        out.grad = NetworkParams<float>(shape);
        Matrix<float> probs;
        if (cfg.dropout > 0.0) {
          RandomEngine mask_rng = make_engine(cfg.seed, {static_cast<std::uint64_t>(epoch), b, c});
          const DropoutMasks<float> masks =
              make_dropout_masks<float>(shape.hidden, batch.steps, batch.size, cfg.dropout, mask_rng);
          out.loss = accumulate_gradient(params, batch, &masks, out.grad, &probs);
        } else {
          out.loss = accumulate_gradient(params, batch, static_cast<const DropoutMasks<float>*>(nullptr), out.grad, &probs);
        }
        for (int s = 0; s < batch.size; ++s) {
          if (argmax(probs.col(s)) == labels[static_cast<std::size_t>(s)]) ++out.correct;
        }
      });

      NetworkParams<float>& total = chunks.front().grad;
      for (std::size_t c = 1; c < n_chunks; ++c) total.flat() += chunks[c].grad.flat();
      total.flat() /= static_cast<float>(end - begin);
      for (const ChunkResult& c : chunks) {
        loss_sum += c.loss;
        correct += c.correct;
      }
      adam_step(adam, params.flat(), total.flat(), lr);
    }

    EpochRecord rec{epoch, loss_sum / static_cast<double>(order.size()),
                    static_cast<double>(correct) / static_cast<double>(order.size()), lr};
    history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (schedule.observe(rec.train_acc)) lr /= 2.0;
  }
  return history;
}

Eigen::MatrixXf predict_proba(const NetworkParams<float>& params, std::span<const SignalFrame> frames, int threads) {
  Eigen::MatrixXf out(params.shape().classes, static_cast<Eigen::Index>(frames.size()));
  const std::size_t n_chunks = (frames.size() + kPredictChunk - 1) / kPredictChunk;
  parallel_for(n_chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * kPredictChunk;
    const std::size_t end = std::min(frames.size(), begin + kPredictChunk);
    std::vector<FeatureFrame> features;
    for (std::size_t k = begin; k < end; ++k) features.push_back(frame_features(frames[k]));
    const std::vector<int> labels(features.size(), 0);
    out.middleCols(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin)) =
        forward(params, make_batch<float>(features, labels));
  });
  return out;
}

}  // namespace iqaug::nn
