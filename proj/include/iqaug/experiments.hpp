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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iqaug/augment.hpp"
#include "iqaug/nn/model.hpp"
#include "iqaug/nn/trainer.hpp"
#include "iqaug/signal.hpp"

namespace iqaug {

/// Anything that maps frames to class probabilities over a class table.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual const std::vector<std::string>& class_names() const = 0;
  /// K x frames.size() probabilities.
  virtual Eigen::MatrixXf predict_proba(std::span<const SignalFrame> frames) const = 0;
};

class LstmClassifier final : public Classifier {
 public:
  explicit LstmClassifier(const nn::Model& model, int threads = 1) : model_(model), threads_(threads) {}

  const std::vector<std::string>& class_names() const override { return model_.class_names; }
  Eigen::MatrixXf predict_proba(std::span<const SignalFrame> frames) const override {
    return nn::predict_proba(model_.params, frames, threads_);
  }

 private:
  const nn::Model& model_;
  int threads_;
};

enum class AugPhase { kNone, kTrain, kTest, kTrainTest };

AugPhase parse_aug_phase(std::string_view name);
std::string_view aug_phase_name(AugPhase phase);
inline bool augments_training(AugPhase p) { return p == AugPhase::kTrain || p == AugPhase::kTrainTest; }
inline bool augments_testing(AugPhase p) { return p == AugPhase::kTest || p == AugPhase::kTrainTest; }

/// Stage seeds, all derived from one master seed by default.
struct ExperimentSeeds {
  std::uint64_t split = 0;
  std::uint64_t subsample = 0;
  std::uint64_t augment = 0;
  std::uint64_t init = 0;
  std::uint64_t train = 0;
  std::uint64_t eval = 0;

  static ExperimentSeeds from_master(std::uint64_t master);
};

struct ExperimentConfig {
  AugPhase phase = AugPhase::kNone;
  std::string policy = "none";
  std::vector<double> noise_sigmas;  // overrides the built-in noise levels when non-empty
  double train_fraction = 1.0;
  /// Frame length fed to the network; 0 keeps the data's length.  Half the
  /// data's length selects the short-sample preset (frames are halved).
  std::size_t seq_len = 0;
  bool halve_after_split = false;
  int hidden = 128;
  nn::InitOptions init;
  nn::TrainConfig train;
  ExperimentSeeds seeds = ExperimentSeeds::from_master(0);

  /// Throws kInvalidArgument for inconsistent settings (e.g. an augmentation
  /// phase with policy "none", or a policy with phase "none").
  void validate() const;
  Policy resolved_policy() const;
};

struct SnrMetrics {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::vector<std::vector<std::int64_t>> confusion;  // [true][predicted]

  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct Metrics {
  std::vector<std::string> class_names;
  std::map<int, SnrMetrics> per_snr;
  std::size_t total = 0;
  std::size_t correct = 0;

  double overall_accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
  void record(int snr_db, int truth, int predicted);

  friend bool operator==(const Metrics& a, const Metrics& b);
};

/// Stratified 50/50 split: every (label, snr) stratum contributes exactly
/// half its records to each side.  Both sides keep dataset order.
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, std::uint64_t seed);

/// Stratified random subset.  The total kept is round-half-even(fraction *
/// size); each stratum keeps floor(fraction * stratum size) plus at most one
/// extra, extras going to the largest fractional parts (ties in seeded
/// random order).  Keeps dataset order.
Dataset subsample(const Dataset& train, double fraction, std::uint64_t seed);

struct Prediction {
  int label = 0;
  std::vector<double> fused;  // summed probabilities divided by N
};

/// Sums the N columns of `probs` (K x N) and takes the argmax; ties go to
/// the lowest class index.
Prediction fuse_predictions(const Eigen::MatrixXf& probs);

/// Test-time augmentation for one frame: N variants, probabilities summed.
Prediction tta_predict(const Classifier& model, const SignalFrame& frame, const Policy& policy, RandomEngine& rng);

/// Per-SNR accuracy and confusion over the whole test set.  With a TTA
/// policy, variant n of record i draws noise from (eval_seed, i, n); stored
/// test data is never modified.
Metrics evaluate(const Classifier& model, const Dataset& test, const Policy* tta = nullptr,
                 std::uint64_t eval_seed = 0);

struct ExperimentResult {
  nn::Model model;
  Metrics metrics;
  std::vector<nn::EpochRecord> history;
  Dataset test;
  std::size_t train_frames = 0;  // after subsampling and augmentation
};

/// split -> subsample -> train-time augmentation -> training -> evaluation
/// (with test-time fusion when the phase asks for it).
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& data, int threads = 1,
                                const std::function<void(const nn::EpochRecord&)>& on_epoch = {});

}  // namespace iqaug
