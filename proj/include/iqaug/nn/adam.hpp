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
#include <cmath>
#include <cstdint>

#include "iqaug/error.hpp"

namespace iqaug::nn {

/// Bias-corrected Adam.  Element-wise, so the update of each scalar depends
/// only on its own gradient history.
template <typename T>
struct AdamState {
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  Vector m;
  Vector v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(Eigen::Index n = 0) : m(Vector::Zero(n)), v(Vector::Zero(n)) {}
};

template <typename T>
void adam_step(AdamState<T>& state, Eigen::Matrix<T, Eigen::Dynamic, 1>& params,
               const Eigen::Matrix<T, Eigen::Dynamic, 1>& grads, double lr) {
  if (state.m.size() != params.size() || grads.size() != params.size()) {
    fail(ErrorKind::kInvalidInput, "adam_step: state, parameter and gradient sizes differ");
  }
  ++state.step;
  const T b1 = static_cast<T>(state.beta1);
  const T b2 = static_cast<T>(state.beta2);
  state.m = b1 * state.m + (T(1) - b1) * grads;
  state.v = b2 * state.v + (T(1) - b2) * grads.cwiseProduct(grads);
  const T correct1 = static_cast<T>(1.0 - std::pow(state.beta1, static_cast<double>(state.step)));
  const T correct2 = static_cast<T>(1.0 - std::pow(state.beta2, static_cast<double>(state.step)));
  params.array() -= static_cast<T>(lr) * (state.m.array() / correct1) /
                    ((state.v.array() / correct2).sqrt() + static_cast<T>(state.eps));
}

}  // namespace iqaug::nn
