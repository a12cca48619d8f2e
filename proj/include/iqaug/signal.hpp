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

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace iqaug {

/// One complex baseband sample.
struct IQSample {
  float i = 0.0f;
  float q = 0.0f;

  friend bool operator==(const IQSample&, const IQSample&) = default;
};

/// Fixed-length run of I/Q samples; the unit of classification.
class SignalFrame {
 public:
  SignalFrame() = default;
  explicit SignalFrame(std::vector<IQSample> samples) : samples_(std::move(samples)) {}
  explicit SignalFrame(std::size_t length) : samples_(length) {}

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  const IQSample& operator[](std::size_t t) const { return samples_[t]; }
  IQSample& operator[](std::size_t t) { return samples_[t]; }

  std::span<const IQSample> samples() const noexcept { return samples_; }
  std::span<IQSample> samples() noexcept { return samples_; }

  auto begin() const noexcept { return samples_.begin(); }
  auto end() const noexcept { return samples_.end(); }

  friend bool operator==(const SignalFrame&, const SignalFrame&) = default;

 private:
  std::vector<IQSample> samples_;
};

struct LabeledFrame {
  SignalFrame frame;
  std::uint8_t label = 0;
  std::int8_t snr_db = 0;

  friend bool operator==(const LabeledFrame&, const LabeledFrame&) = default;
};

/// Labeled frames sharing one length and one class table.
struct Dataset {
  std::vector<LabeledFrame> frames;
  std::vector<std::string> class_names;
  std::size_t seq_len = 0;
  std::string provenance;

  std::size_t size() const noexcept { return frames.size(); }
  bool empty() const noexcept { return frames.empty(); }
  std::size_t class_count() const noexcept { return class_names.size(); }

  /// Throws kInvalidInput if frames disagree on length or carry an
  /// out-of-range label.
  void validate() const;

  /// Copy of the metadata with no frames.
  Dataset empty_like() const { return Dataset{{}, class_names, seq_len, provenance}; }
};

/// Amplitude and scaled phase sequences fed to the classifier.  Phase is the
/// four-quadrant angle divided by pi, so it lies in (-1, 1].
struct FeatureFrame {
  std::vector<float> amplitude;
  std::vector<float> phase;

  std::size_t size() const noexcept { return amplitude.size(); }
};

/// Four-quadrant angle of (i, q) in (-pi, pi]; the origin maps to 0.
double iq_phase(double i, double q) noexcept;

FeatureFrame to_features(const SignalFrame& frame);

/// Splits a frame of length 2L into its first and second halves.
std::pair<SignalFrame, SignalFrame> halve_frame(const SignalFrame& frame);

/// Scales the frame by one positive constant so its RMS magnitude is 1.
SignalFrame normalize_frame(const SignalFrame& frame);

/// normalize_frame followed by to_features; the classifier's input path.
FeatureFrame frame_features(const SignalFrame& frame);

double mean_power(const SignalFrame& frame) noexcept;

/// Applies halve_frame to every record; record i becomes records 2i and 2i+1.
Dataset halve_dataset(const Dataset& ds);

}  // namespace iqaug
