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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iqaug/rng.hpp"
#include "iqaug/signal.hpp"

namespace iqaug {

struct Identity {
  friend bool operator==(Identity, Identity) = default;
};
/// Counter-clockwise rotation by turns * pi/2, done as coordinate swaps.
struct RotateQuarter {
  int turns = 0;
  friend bool operator==(RotateQuarter, RotateQuarter) = default;
};
/// (I, Q) -> (-I, Q)
struct FlipH {
  friend bool operator==(FlipH, FlipH) = default;
};
/// (I, Q) -> (I, -Q)
struct FlipV {
  friend bool operator==(FlipV, FlipV) = default;
};
/// (I, Q) -> (-I, -Q)
struct FlipBoth {
  friend bool operator==(FlipBoth, FlipBoth) = default;
};
/// Adds N(0, sigma^2) independently to every I and every Q component.
struct AddNoise {
  double sigma = 0.0;
  friend bool operator==(AddNoise, AddNoise) = default;
};

using Transform = std::variant<Identity, RotateQuarter, FlipH, FlipV, FlipBoth, AddNoise>;

std::string transform_name(const Transform& t);

/// The 2x2 integer matrix of a deterministic transform, row-major
/// {a, b, c, d} acting as (I, Q) -> (a I + b Q, c I + d Q).  Empty for
/// noise with sigma > 0, which has no fixed action.
std::optional<std::array<int, 4>> transform_action(const Transform& t);

/// Applies t to every sample.  `rng` is only drawn from by AddNoise with
/// sigma > 0 and must be non-null in that case.
SignalFrame apply_transform(const SignalFrame& frame, const Transform& t, RandomEngine* rng = nullptr);

enum class PolicyKind { kRotation, kFlip, kNoise, kJoint };

struct Policy {
  std::string name;
  std::vector<Transform> transforms;

  std::size_t scale_factor() const noexcept { return transforms.size(); }
  bool deterministic() const;
};

inline constexpr double kDefaultNoiseSigmas[] = {0.0, 0.0005, 0.001, 0.002};

Policy builtin_policy(PolicyKind kind);

/// Single Identity transform, N = 1; what "none" resolves to.
Policy identity_policy();

Policy noise_policy(std::span<const double> sigmas);

/// Resolves rotation | flip | noise | joint | none.  `noise_sigmas`, when
/// given, replaces the built-in noise levels.
Policy policy_from_name(std::string_view name, std::span<const double> noise_sigmas = {});

/// Expands every record into N records, one per policy transform, in
/// (source order x policy order).  Noise for record i and transform n is
/// drawn from the substream (seed, i, n), so the output does not depend on
/// `threads`.
Dataset augment_dataset(const Dataset& ds, const Policy& policy, std::uint64_t seed, int threads = 1);

}  // namespace iqaug
