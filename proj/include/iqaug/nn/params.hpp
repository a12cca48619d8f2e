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

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "iqaug/error.hpp"
#include "iqaug/rng.hpp"

namespace iqaug::nn {

/// Dimensions of the two-layer LSTM classifier.
struct Shape {
  int input_dim = 2;
  int hidden = 128;
  int classes = 11;

  friend bool operator==(const Shape&, const Shape&) = default;
};

inline constexpr int kLayers = 2;

/// Closed-form scalar count: per layer 4h*d + 4h*h + 8h (separate input and
/// recurrent bias vectors), plus the h*K + K softmax head.
std::int64_t count_params(int hidden, int classes, int input_dim);

/// Multiply-accumulates per time step for both LSTM layers (gate
/// pre-activations only; element-wise work and the head are excluded).
std::int64_t macs_per_step(int hidden, int input_dim);

/// One named tensor inside the flat parameter vector.
struct TensorInfo {
  std::string name;
  std::int64_t offset;
  int rows;
  int cols;

  std::int64_t size() const { return std::int64_t{rows} * cols; }
};

/// Tensor table in storage order: for each layer w_ih (4h x d), w_hh
/// (4h x h), b_ih (4h), b_hh (4h); then head_w (K x h), head_b (K).
/// Matrices are row-major; gate blocks are ordered input, forget, cell, output.
std::vector<TensorInfo> tensor_layout(const Shape& shape);

/// All weights of the network in one contiguous vector, with typed views.
template <typename T>
class NetworkParams {
 public:
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatrixView = Eigen::Map<RowMatrix>;
  using ConstMatrixView = Eigen::Map<const RowMatrix>;
  using VectorView = Eigen::Map<Vector>;
  using ConstVectorView = Eigen::Map<const Vector>;

  NetworkParams() = default;
  explicit NetworkParams(const Shape& shape) : shape_(shape), layout_(tensor_layout(shape)) {
    if (shape.input_dim < 1 || shape.hidden < 1 || shape.classes < 1) {
      fail(ErrorKind::kInvalidArgument, "network dimensions must be positive");
    }
    data_ = Vector::Zero(static_cast<Eigen::Index>(count_params(shape.hidden, shape.classes, shape.input_dim)));
  }

  const Shape& shape() const noexcept { return shape_; }
  const std::vector<TensorInfo>& layout() const noexcept { return layout_; }
  Eigen::Index size() const noexcept { return data_.size(); }

  Vector& flat() noexcept { return data_; }
  const Vector& flat() const noexcept { return data_; }

  MatrixView w_ih(int layer) { return matrix(4 * layer); }
  MatrixView w_hh(int layer) { return matrix(4 * layer + 1); }
  VectorView b_ih(int layer) { return vector(4 * layer + 2); }
  VectorView b_hh(int layer) { return vector(4 * layer + 3); }
  MatrixView head_w() { return matrix(4 * kLayers); }
  VectorView head_b() { return vector(4 * kLayers + 1); }

  ConstMatrixView w_ih(int layer) const { return matrix(4 * layer); }
  ConstMatrixView w_hh(int layer) const { return matrix(4 * layer + 1); }
  ConstVectorView b_ih(int layer) const { return vector(4 * layer + 2); }
  ConstVectorView b_hh(int layer) const { return vector(4 * layer + 3); }
  ConstMatrixView head_w() const { return matrix(4 * kLayers); }
  ConstVectorView head_b() const { return vector(4 * kLayers + 1); }

  template <typename U>
  NetworkParams<U> cast() const {
    NetworkParams<U> out(shape_);
    out.flat() = data_.template cast<U>();
    return out;
  }

  void set_zero() { data_.setZero(); }

 private:
  MatrixView matrix(std::size_t k) {
    const TensorInfo& t = layout_[k];
    return MatrixView(data_.data() + t.offset, t.rows, t.cols);
  }
  ConstMatrixView matrix(std::size_t k) const {
    const TensorInfo& t = layout_[k];
    return ConstMatrixView(data_.data() + t.offset, t.rows, t.cols);
  }
  VectorView vector(std::size_t k) {
    const TensorInfo& t = layout_[k];
    return VectorView(data_.data() + t.offset, t.rows);
  }
  ConstVectorView vector(std::size_t k) const {
    const TensorInfo& t = layout_[k];
    return ConstVectorView(data_.data() + t.offset, t.rows);
  }

  Shape shape_;
  std::vector<TensorInfo> layout_;
  Vector data_;
};

struct InitOptions {
  /// Input-side forget-gate bias; the recurrent one starts at 0.
  double forget_bias = 1.0;
  /// Multiplier on the first layer's input weights.  Amplitude/phase
  /// features vary little around their mean, so the default uniform range
  /// leaves the first layer nearly input-blind.
  double input_gain = 1.0;
};

/// Uniform(-1/sqrt(h), 1/sqrt(h)) for every weight and bias, then the
/// adjustments in `opts`.
template <typename T>
NetworkParams<T> init_params(const Shape& shape, std::uint64_t seed, const InitOptions& opts = {}) {
  NetworkParams<T> p(shape);
  RandomEngine rng = make_engine(seed, {0x1417});
  const double bound = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index k = 0; k < p.size(); ++k) p.flat()[k] = static_cast<T>(u(rng));
  const int h = shape.hidden;
  for (int layer = 0; layer < kLayers; ++layer) {
    p.b_ih(layer).segment(h, h).setConstant(static_cast<T>(opts.forget_bias));
    p.b_hh(layer).segment(h, h).setZero();
  }
  p.w_ih(0) *= static_cast<T>(opts.input_gain);
  return p;
}

}  // namespace iqaug::nn
