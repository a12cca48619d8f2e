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

#pragma once

// Two-layer LSTM classifier: forward pass and backpropagation through time.
//
// Activations for a batch of B sequences of length T are stored as
// (features x T*B) matrices; column t*B + b holds step t of sequence b.
// Gate rows are ordered input, forget, cell candidate, output:
//
//   z_t = W_ih x_t + W_hh h_{t-1} + b_ih + b_hh
//   c_t = f * c_{t-1} + i * g,  h_t = o * tanh(c_t)
//
// with zero initial state.  Dropout, when active, multiplies each layer's
// output sequence (not its recurrent state) by a 0 or 1/(1-p) mask.  The
// head reads layer 2's output at the last step.

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "iqaug/error.hpp"
#include "iqaug/nn/params.hpp"
#include "iqaug/rng.hpp"
#include "iqaug/signal.hpp"

namespace iqaug::nn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
struct Batch {
  Matrix<T> inputs;  // input_dim x (steps * size)
  std::vector<int> labels;
  int steps = 0;
  int size = 0;
};

/// Packs amplitude/phase features (input_dim = 2) into a batch.
template <typename T>
Batch<T> make_batch(std::span<const FeatureFrame> frames, std::span<const int> labels) {
  if (frames.empty()) fail(ErrorKind::kInvalidInput, "make_batch: empty batch");
  if (labels.size() != frames.size()) fail(ErrorKind::kInvalidInput, "make_batch: label count mismatch");
  Batch<T> batch;
  batch.size = static_cast<int>(frames.size());
  batch.steps = static_cast<int>(frames.front().size());
  if (batch.steps < 1) fail(ErrorKind::kInvalidInput, "make_batch: zero-length features");
  batch.inputs.resize(2, Eigen::Index{batch.steps} * batch.size);
  for (int b = 0; b < batch.size; ++b) {
    const FeatureFrame& f = frames[static_cast<std::size_t>(b)];
    if (static_cast<int>(f.size()) != batch.steps || f.phase.size() != f.amplitude.size()) {
      fail(ErrorKind::kInvalidInput, "make_batch: frames differ in length");
    }
    for (int t = 0; t < batch.steps; ++t) {
      batch.inputs(0, Eigen::Index{t} * batch.size + b) = static_cast<T>(f.amplitude[static_cast<std::size_t>(t)]);
      batch.inputs(1, Eigen::Index{t} * batch.size + b) = static_cast<T>(f.phase[static_cast<std::size_t>(t)]);
    }
  }
  batch.labels.assign(labels.begin(), labels.end());
  return batch;
}

/// Inverted-dropout masks for both layers, each hidden x (steps * size).
template <typename T>
struct DropoutMasks {
  std::array<Matrix<T>, kLayers> layer;
};

template <typename T>
DropoutMasks<T> make_dropout_masks(int hidden, int steps, int size, double rate, RandomEngine& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) fail(ErrorKind::kInvalidArgument, "dropout rate must be in [0, 1)");
  DropoutMasks<T> masks;
  std::bernoulli_distribution keep(1.0 - rate);
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  for (Matrix<T>& m : masks.layer) {
    m.resize(hidden, Eigen::Index{steps} * size);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = keep(rng) ? scale : T(0);
    }
  }
  return masks;
}

namespace detail {

template <typename T>
struct LayerTrace {
  Matrix<T> gates;  // activated gates, 4h x TB
  Matrix<T> cell;
  Matrix<T> tanh_cell;
  Matrix<T> hidden;  // recurrent state h_t
  Matrix<T> output;  // hidden after dropout; what the next stage reads
};

template <typename T>
struct Trace {
  std::array<LayerTrace<T>, kLayers> layers;
  Matrix<T> logits;  // K x B
};

template <typename Block>
void sigmoid_inplace(Block&& z) {
  using Scalar = typename std::decay_t<Block>::Scalar;
  z = (Scalar(1) + (-z.array()).exp()).inverse().matrix();
}

template <typename T>
void layer_forward(const NetworkParams<T>& p, int layer, const Matrix<T>& x, int steps, int batch,
                   const Matrix<T>* mask, LayerTrace<T>& tr) {
  const Eigen::Index h = p.shape().hidden;
  const Eigen::Index B = batch;
  const Eigen::Index tb = Eigen::Index{steps} * B;
  tr.gates.noalias() = p.w_ih(layer) * x;
  tr.gates.colwise() += (p.b_ih(layer) + p.b_hh(layer));
  tr.cell.resize(h, tb);
  tr.tanh_cell.resize(h, tb);
  tr.hidden.resize(h, tb);
  for (Eigen::Index t = 0; t < steps; ++t) {
    auto z = tr.gates.middleCols(t * B, B);
    if (t > 0) z.noalias() += p.w_hh(layer) * tr.hidden.middleCols((t - 1) * B, B);
    sigmoid_inplace(z.topRows(2 * h));
    z.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
    sigmoid_inplace(z.bottomRows(h));
    auto c = tr.cell.middleCols(t * B, B);
    c = z.topRows(h).cwiseProduct(z.middleRows(2 * h, h));
    if (t > 0) c += z.middleRows(h, h).cwiseProduct(tr.cell.middleCols((t - 1) * B, B));
    tr.tanh_cell.middleCols(t * B, B) = c.array().tanh().matrix();
    tr.hidden.middleCols(t * B, B) = z.bottomRows(h).cwiseProduct(tr.tanh_cell.middleCols(t * B, B));
  }
  if (mask != nullptr) {
    tr.output = tr.hidden.cwiseProduct(*mask);
  } else {
    tr.output = tr.hidden;
  }
}

// d_output (h x TB) holds dL/d(layer output); consumed.
template <typename T>
void layer_backward(const NetworkParams<T>& p, int layer, const Matrix<T>& x, int steps, int batch,
                    const Matrix<T>* mask, const LayerTrace<T>& tr, Matrix<T>& d_output, NetworkParams<T>& grad,
                    Matrix<T>* d_input) {
  const Eigen::Index h = p.shape().hidden;
  const Eigen::Index B = batch;
  const Eigen::Index tb = Eigen::Index{steps} * B;
  if (mask != nullptr) d_output = d_output.cwiseProduct(*mask);

  Matrix<T> dz(4 * h, tb);
  Matrix<T> dh_next = Matrix<T>::Zero(h, B);
  Matrix<T> dc_next = Matrix<T>::Zero(h, B);
  Matrix<T> dh(h, B);
  Matrix<T> dc(h, B);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const auto gates = tr.gates.middleCols(t * B, B);
    const auto i = gates.topRows(h).array();
    const auto f = gates.middleRows(h, h).array();
    const auto g = gates.middleRows(2 * h, h).array();
    const auto o = gates.bottomRows(h).array();
    const auto tc = tr.tanh_cell.middleCols(t * B, B).array();
    auto dzt = dz.middleCols(t * B, B);

    dh = d_output.middleCols(t * B, B) + dh_next;
    dzt.bottomRows(h) = (dh.array() * tc * o * (T(1) - o)).matrix();
    dc = (dh.array() * o * (T(1) - tc.square())).matrix() + dc_next;
    dzt.topRows(h) = (dc.array() * g * i * (T(1) - i)).matrix();
    dzt.middleRows(2 * h, h) = (dc.array() * i * (T(1) - g.square())).matrix();
    if (t > 0) {
      dzt.middleRows(h, h) = (dc.array() * tr.cell.middleCols((t - 1) * B, B).array() * f * (T(1) - f)).matrix();
      dh_next.noalias() = p.w_hh(layer).transpose() * dzt;
    } else {
      dzt.middleRows(h, h).setZero();
    }
    dc_next = (dc.array() * f).matrix();
  }

  grad.w_ih(layer).noalias() += dz * x.transpose();
  if (steps > 1) {
    const Eigen::Index rest = tb - B;
    grad.w_hh(layer).noalias() += dz.rightCols(rest) * tr.hidden.leftCols(rest).transpose();
  }
  const auto db = dz.rowwise().sum();
  grad.b_ih(layer) += db;
  grad.b_hh(layer) += db;
  if (d_input != nullptr) d_input->noalias() = p.w_ih(layer).transpose() * dz;
}

template <typename T>
void check_batch(const NetworkParams<T>& p, const Batch<T>& batch, const DropoutMasks<T>* masks) {
  const Shape& s = p.shape();
  if (batch.size < 1 || batch.steps < 1) fail(ErrorKind::kInvalidInput, "empty batch");
  if (batch.inputs.rows() != s.input_dim || batch.inputs.cols() != Eigen::Index{batch.steps} * batch.size) {
    fail(ErrorKind::kInvalidInput, "batch inputs do not match the network input dimension");
  }
  if (masks != nullptr) {
    for (const Matrix<T>& m : masks->layer) {
      if (m.rows() != s.hidden || m.cols() != batch.inputs.cols()) fail(ErrorKind::kInvalidInput, "dropout mask shape mismatch");
    }
  }
}

template <typename T>
void run_forward(const NetworkParams<T>& p, const Batch<T>& batch, const DropoutMasks<T>* masks, Trace<T>& tr) {
  check_batch(p, batch, masks);
  const Matrix<T>* m0 = masks ? &masks->layer[0] : nullptr;
  const Matrix<T>* m1 = masks ? &masks->layer[1] : nullptr;
  layer_forward(p, 0, batch.inputs, batch.steps, batch.size, m0, tr.layers[0]);
  layer_forward(p, 1, tr.layers[0].output, batch.steps, batch.size, m1, tr.layers[1]);
  const Eigen::Index last = Eigen::Index{batch.steps - 1} * batch.size;
  tr.logits.noalias() = p.head_w() * tr.layers[1].output.middleCols(last, batch.size);
  tr.logits.colwise() += p.head_b();
}

// Column-wise softmax of logits into probs; returns per-column log-sum-exp.
template <typename T>
Eigen::Matrix<T, 1, Eigen::Dynamic> softmax_columns(const Matrix<T>& logits, Matrix<T>& probs) {
  Eigen::Matrix<T, 1, Eigen::Dynamic> lse(logits.cols());
  probs.resize(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const T peak = logits.col(c).maxCoeff();
    probs.col(c) = (logits.col(c).array() - peak).exp().matrix();
    const T sum = probs.col(c).sum();
    probs.col(c) /= sum;
    lse(c) = peak + std::log(sum);
  }
  return lse;
}

}  // namespace detail

/// Class probabilities (K x B).  Pass masks for train mode, nullptr for eval.
template <typename T>
Matrix<T> forward(const NetworkParams<T>& p, const Batch<T>& batch, const DropoutMasks<T>* masks = nullptr) {
  detail::Trace<T> tr;
  detail::run_forward(p, batch, masks, tr);
  Matrix<T> probs;
  detail::softmax_columns(tr.logits, probs);
  return probs;
}

/// Eval-mode class distribution for one frame.
template <typename T>
std::vector<T> forward(const NetworkParams<T>& p, const FeatureFrame& features) {
  const FeatureFrame frames[] = {features};
  const int labels[] = {0};
  const Matrix<T> probs = forward(p, make_batch<T>(frames, labels));
  return std::vector<T>(probs.data(), probs.data() + probs.size());
}

/// Layer-2 output at the last step (after its dropout mask), h x B.
template <typename T>
Matrix<T> last_hidden(const NetworkParams<T>& p, const Batch<T>& batch, const DropoutMasks<T>* masks = nullptr) {
  detail::Trace<T> tr;
  detail::run_forward(p, batch, masks, tr);
  return tr.layers[1].output.middleCols(Eigen::Index{batch.steps - 1} * batch.size, batch.size);
}

/// -log(probs[label]) for a probability vector.
template <typename T>
T cross_entropy(std::span<const T> probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size()) fail(ErrorKind::kInvalidInput, "cross_entropy: label out of range");
  return -std::log(probs[static_cast<std::size_t>(label)]);
}

/// Forward and backward over the batch.  Adds the SUM over samples of the
/// loss gradient into `grad` and returns the summed loss; callers divide by
/// the total batch size.  `probs_out`, if given, receives the K x B
/// probabilities from the same (possibly dropped-out) forward pass.
template <typename T>
T accumulate_gradient(const NetworkParams<T>& p, const Batch<T>& batch, const DropoutMasks<T>* masks,
                      NetworkParams<T>& grad, Matrix<T>* probs_out = nullptr) {
  if (!(grad.shape() == p.shape())) fail(ErrorKind::kInvalidInput, "gradient buffer shape mismatch");
  if (static_cast<int>(batch.labels.size()) != batch.size) fail(ErrorKind::kInvalidInput, "label count mismatch");
  detail::Trace<T> tr;
  detail::run_forward(p, batch, masks, tr);
  Matrix<T> probs;
  const auto lse = detail::softmax_columns(tr.logits, probs);

  T loss = 0;
  Matrix<T> dlogits = probs;
  for (int b = 0; b < batch.size; ++b) {
    const int y = batch.labels[static_cast<std::size_t>(b)];
    if (y < 0 || y >= p.shape().classes) fail(ErrorKind::kInvalidInput, "label out of range");
    loss += lse(b) - tr.logits(y, b);
    dlogits(y, b) -= T(1);
  }

  const Eigen::Index B = batch.size;
  const Eigen::Index last = Eigen::Index{batch.steps - 1} * B;
  const auto& top = tr.layers[1].output;
  grad.head_w().noalias() += dlogits * top.middleCols(last, B).transpose();
  grad.head_b() += dlogits.rowwise().sum();

  Matrix<T> d_out = Matrix<T>::Zero(p.shape().hidden, batch.inputs.cols());
  d_out.middleCols(last, B).noalias() = p.head_w().transpose() * dlogits;
  Matrix<T> d_hidden1;
  const Matrix<T>* m0 = masks ? &masks->layer[0] : nullptr;
  const Matrix<T>* m1 = masks ? &masks->layer[1] : nullptr;
  detail::layer_backward(p, 1, tr.layers[0].output, batch.steps, batch.size, m1, tr.layers[1], d_out, grad, &d_hidden1);
  detail::layer_backward(p, 0, batch.inputs, batch.steps, batch.size, m0, tr.layers[0], d_hidden1, grad,
                         static_cast<Matrix<T>*>(nullptr));
  if (probs_out != nullptr) *probs_out = std::move(probs);
  return loss;
}

template <typename T>
struct GradientResult {
  NetworkParams<T> grad;  // mean over the batch
  T loss = 0;             // mean over the batch
};

/// Mean-over-batch loss and gradient.
template <typename T>
GradientResult<T> backward(const NetworkParams<T>& p, const Batch<T>& batch, const DropoutMasks<T>* masks = nullptr) {
  GradientResult<T> out{NetworkParams<T>(p.shape()), T(0)};
  out.loss = accumulate_gradient(p, batch, masks, out.grad) / static_cast<T>(batch.size);
  out.grad.flat() /= static_cast<T>(batch.size);
  return out;
}

/// Mean loss only; used by finite-difference checks.
template <typename T>
T batch_loss(const NetworkParams<T>& p, const Batch<T>& batch, const DropoutMasks<T>* masks = nullptr) {
  detail::Trace<T> tr;
  detail::run_forward(p, batch, masks, tr);
  Matrix<T> probs;
  const auto lse = detail::softmax_columns(tr.logits, probs);
  T loss = 0;
  for (int b = 0; b < batch.size; ++b) loss += lse(b) - tr.logits(batch.labels[static_cast<std::size_t>(b)], b);
  return loss / static_cast<T>(batch.size);
}

}  // namespace iqaug::nn
