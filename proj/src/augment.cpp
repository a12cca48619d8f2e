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

#include "iqaug/augment.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <set>

#include "iqaug/error.hpp"
#include "iqaug/parallel.hpp"

namespace iqaug {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void validate(const Transform& t) {
  if (const auto* r = std::get_if<RotateQuarter>(&t); r && (r->turns < 0 || r->turns > 3)) {
    fail(ErrorKind::kInvalidArgument, "rotation turns must be in 0..3");
  }
  if (const auto* n = std::get_if<AddNoise>(&t); n && !(std::isfinite(n->sigma) && n->sigma >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "noise sigma must be finite and non-negative");
  }
}

template <typename Map>
SignalFrame map_samples(const SignalFrame& frame, Map&& map) {
  SignalFrame out(frame.size());
  for (std::size_t t = 0; t < frame.size(); ++t) out[t] = map(frame[t]);
  return out;
}

IQSample quarter_turn(IQSample s, int turns) {
  for (int k = 0; k < turns; ++k) s = {-s.q, s.i};
  return s;
}

}  // namespace

std::string transform_name(const Transform& t) {
  return std::visit(Overloaded{
                        [](Identity) -> std::string { return "identity"; },
                        [](RotateQuarter r) -> std::string { return "rot" + std::to_string(r.turns * 90); },
                        [](FlipH) -> std::string { return "flip_h"; },
                        [](FlipV) -> std::string { return "flip_v"; },
                        [](FlipBoth) -> std::string { return "flip_both"; },
                        [](AddNoise n) -> std::string {
                          char buf[48];
                          std::snprintf(buf, sizeof buf, "noise(%g)", n.sigma);
                          return buf;
                        },
                    },
                    t);
}

std::optional<std::array<int, 4>> transform_action(const Transform& t) {
  using Action = std::array<int, 4>;
  return std::visit(Overloaded{
                        [](Identity) -> std::optional<Action> { return Action{1, 0, 0, 1}; },
                        [](RotateQuarter r) -> std::optional<Action> {
                          // columns are the images of (1,0) and (0,1)
                          const IQSample e1 = quarter_turn({1, 0}, r.turns);
                          const IQSample e2 = quarter_turn({0, 1}, r.turns);
                          return Action{int(e1.i), int(e2.i), int(e1.q), int(e2.q)};
                        },
                        [](FlipH) -> std::optional<Action> { return Action{-1, 0, 0, 1}; },
                        [](FlipV) -> std::optional<Action> { return Action{1, 0, 0, -1}; },
                        [](FlipBoth) -> std::optional<Action> { return Action{-1, 0, 0, -1}; },
                        [](AddNoise n) -> std::optional<Action> {
                          if (n.sigma == 0.0) return Action{1, 0, 0, 1};
                          return std::nullopt;
                        },
                    },
                    t);
}

SignalFrame apply_transform(const SignalFrame& frame, const Transform& t, RandomEngine* rng) {
  validate(t);
  return std::visit(
      Overloaded{
          [&](Identity) { return frame; },
          [&](RotateQuarter r) { return map_samples(frame, [k = r.turns](IQSample s) { return quarter_turn(s, k); }); },
          [&](FlipH) { return map_samples(frame, [](IQSample s) { return IQSample{-s.i, s.q}; }); },
          [&](FlipV) { return map_samples(frame, [](IQSample s) { return IQSample{s.i, -s.q}; }); },
          [&](FlipBoth) { return map_samples(frame, [](IQSample s) { return IQSample{-s.i, -s.q}; }); },
          [&](AddNoise n) {
            if (n.sigma == 0.0) return frame;
            if (rng == nullptr) fail(ErrorKind::kInvalidArgument, "AddNoise requires a random stream");
            std::normal_distribution<double> gauss(0.0, n.sigma);
            return map_samples(frame, [&](IQSample s) {
              const double di = gauss(*rng);
              const double dq = gauss(*rng);
              return IQSample{static_cast<float>(s.i + di), static_cast<float>(s.q + dq)};
            });
          },
      },
      t);
}

bool Policy::deterministic() const {
  for (const Transform& t : transforms) {
    if (!transform_action(t)) return false;
  }
  return true;
}

Policy builtin_policy(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kRotation:
      return {"rotation", {RotateQuarter{0}, RotateQuarter{1}, RotateQuarter{2}, RotateQuarter{3}}};
    case PolicyKind::kFlip:
      return {"flip", {Identity{}, FlipH{}, FlipV{}, FlipBoth{}}};
    case PolicyKind::kNoise: {
      Policy p = noise_policy(kDefaultNoiseSigmas);
      return p;
    }
    case PolicyKind::kJoint: {
      // Union of rotation and flip, keeping the first transform for each
      // distinct action: Identity duplicates Rot0 and FlipBoth duplicates Rot180.
      Policy joint{"joint", {}};
      std::set<std::array<int, 4>> seen;
      for (PolicyKind part : {PolicyKind::kRotation, PolicyKind::kFlip}) {
        for (const Transform& t : builtin_policy(part).transforms) {
          if (seen.insert(*transform_action(t)).second) joint.transforms.push_back(t);
        }
      }
      return joint;
    }
  }
  fail(ErrorKind::kInvalidArgument, "unknown policy kind");
}

Policy identity_policy() { return {"none", {Identity{}}}; }

Policy noise_policy(std::span<const double> sigmas) {
  if (sigmas.empty()) fail(ErrorKind::kInvalidArgument, "noise policy needs at least one sigma");
  Policy p{"noise", {}};
  for (double s : sigmas) {
    Transform t = AddNoise{s};
    validate(t);
    p.transforms.push_back(t);
  }
  return p;
}

Policy policy_from_name(std::string_view name, std::span<const double> noise_sigmas) {
  if (name == "none") return identity_policy();
  if (name == "rotation") return builtin_policy(PolicyKind::kRotation);
  if (name == "flip") return builtin_policy(PolicyKind::kFlip);
  if (name == "joint") return builtin_policy(PolicyKind::kJoint);
  if (name == "noise") return noise_sigmas.empty() ? builtin_policy(PolicyKind::kNoise) : noise_policy(noise_sigmas);
  fail(ErrorKind::kInvalidArgument, "unknown augmentation policy '" + std::string(name) + "'");
}

Dataset augment_dataset(const Dataset& ds, const Policy& policy, std::uint64_t seed, int threads) {
  if (ds.empty()) fail(ErrorKind::kInvalidInput, "augment_dataset: empty dataset");
  if (policy.transforms.empty()) fail(ErrorKind::kInvalidArgument, "augment_dataset: policy has no transforms");
  for (const Transform& t : policy.transforms) validate(t);

  const std::size_t n_out = policy.scale_factor();
  Dataset out = ds.empty_like();
  out.frames.resize(ds.size() * n_out);
  parallel_for(ds.size(), threads, [&](std::size_t i) {
    const LabeledFrame& src = ds.frames[i];
    for (std::size_t n = 0; n < n_out; ++n) {
      const Transform& t = policy.transforms[n];
      SignalFrame frame;
      if (std::holds_alternative<AddNoise>(t)) {
        RandomEngine rng = make_engine(seed, {i, n});
        frame = apply_transform(src.frame, t, &rng);
      } else {
        frame = apply_transform(src.frame, t);
      }
      out.frames[i * n_out + n] = {std::move(frame), src.label, src.snr_db};
    }
  });
  out.provenance += (out.provenance.empty() ? "" : "; ") + std::string("augment policy=") + policy.name +
                    " N=" + std::to_string(n_out) + " seed=" + std::to_string(seed);
  return out;
}

}  // namespace iqaug
