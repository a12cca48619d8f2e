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

#include "iqaug/signal.hpp"

#include <cmath>
#include <numbers>

#include "iqaug/error.hpp"

namespace iqaug {

namespace {

void require_finite(const SignalFrame& frame) {
  for (std::size_t t = 0; t < frame.size(); ++t) {
    if (!std::isfinite(frame[t].i) || !std::isfinite(frame[t].q)) {
      fail(ErrorKind::kInvalidInput, "non-finite sample at index " + std::to_string(t));
    }
  }
}

}  // namespace

void Dataset::validate() const {
  for (std::size_t n = 0; n < frames.size(); ++n) {
    if (frames[n].frame.size() != seq_len) {
      fail(ErrorKind::kInvalidInput, "record " + std::to_string(n) + " has length " +
                                         std::to_string(frames[n].frame.size()) + ", expected " +
                                         std::to_string(seq_len));
    }
    if (frames[n].label >= class_names.size()) {
      fail(ErrorKind::kInvalidInput, "record " + std::to_string(n) + " has label " +
                                         std::to_string(frames[n].label) + " outside the class table");
    }
  }
}

double iq_phase(double i, double q) noexcept {
  if (i == 0.0 && q == 0.0) return 0.0;
  const double phi = std::atan2(q, i);
  // atan2 returns -pi for (negative, -0.0); fold onto the closed end.
  return phi == -std::numbers::pi ? std::numbers::pi : phi;
}

FeatureFrame to_features(const SignalFrame& frame) {
  if (frame.empty()) fail(ErrorKind::kInvalidInput, "to_features: empty frame");
  require_finite(frame);
  FeatureFrame out;
  out.amplitude.resize(frame.size());
  out.phase.resize(frame.size());
  for (std::size_t t = 0; t < frame.size(); ++t) {
    const double i = frame[t].i;
    const double q = frame[t].q;
    out.amplitude[t] = static_cast<float>(std::hypot(i, q));
    out.phase[t] = static_cast<float>(iq_phase(i, q) / std::numbers::pi);
  }
  return out;
}

std::pair<SignalFrame, SignalFrame> halve_frame(const SignalFrame& frame) {
  if (frame.size() % 2 != 0) {
    fail(ErrorKind::kInvalidInput, "halve_frame: odd length " + std::to_string(frame.size()));
  }
  const auto half = static_cast<std::ptrdiff_t>(frame.size() / 2);
  auto s = frame.samples();
  return {SignalFrame(std::vector<IQSample>(s.begin(), s.begin() + half)),
          SignalFrame(std::vector<IQSample>(s.begin() + half, s.end()))};
}

double mean_power(const SignalFrame& frame) noexcept {
  if (frame.empty()) return 0.0;
  double acc = 0.0;
  for (const IQSample& s : frame) acc += double(s.i) * s.i + double(s.q) * s.q;
  return acc / static_cast<double>(frame.size());
}

SignalFrame normalize_frame(const SignalFrame& frame) {
  require_finite(frame);
  const double power = mean_power(frame);
  if (!(power > 0.0)) fail(ErrorKind::kDegenerateInput, "normalize_frame: frame has zero energy");
  const double scale = 1.0 / std::sqrt(power);
  SignalFrame out(frame.size());
  for (std::size_t t = 0; t < frame.size(); ++t) {
    out[t] = {static_cast<float>(frame[t].i * scale), static_cast<float>(frame[t].q * scale)};
  }
  return out;
}

FeatureFrame frame_features(const SignalFrame& frame) { return to_features(normalize_frame(frame)); }

Dataset halve_dataset(const Dataset& ds) {
  if (ds.seq_len % 2 != 0) fail(ErrorKind::kInvalidInput, "halve_dataset: odd sequence length");
  Dataset out = ds.empty_like();
  out.seq_len = ds.seq_len / 2;
  out.provenance += (out.provenance.empty() ? "" : "; ") + std::string("halved ") +
                    std::to_string(ds.seq_len) + "->" + std::to_string(out.seq_len);
  out.frames.reserve(ds.size() * 2);
  for (const LabeledFrame& rec : ds.frames) {
    auto [first, second] = halve_frame(rec.frame);
    out.frames.push_back({std::move(first), rec.label, rec.snr_db});
    out.frames.push_back({std::move(second), rec.label, rec.snr_db});
  }
  return out;
}

}  // namespace iqaug
