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

#include "iqaug/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "iqaug/error.hpp"
#include "iqaug/nn/params.hpp"
#include "iqaug/rng.hpp"

namespace iqaug {

namespace {

using Strata = std::map<std::pair<int, int>, std::vector<std::size_t>>;

Strata group_strata(const Dataset& ds) {
  Strata strata;
  for (std::size_t n = 0; n < ds.size(); ++n) strata[{ds.frames[n].label, ds.frames[n].snr_db}].push_back(n);
  return strata;
}

std::uint64_t stratum_key(const std::pair<int, int>& key) {
  return (static_cast<std::uint64_t>(key.first) << 16) | static_cast<std::uint64_t>(key.second + 128);
}

Dataset gather(const Dataset& ds, std::vector<std::size_t> indices, const std::string& note) {
  std::sort(indices.begin(), indices.end());
  Dataset out = ds.empty_like();
  out.frames.reserve(indices.size());
  for (std::size_t k : indices) out.frames.push_back(ds.frames[k]);
  out.provenance += (out.provenance.empty() ? "" : "; ") + note;
  return out;
}

std::string fraction_text(double f) {
  std::ostringstream os;
  os << f;
  return os.str();
}

}  // namespace

AugPhase parse_aug_phase(std::string_view name) {
  if (name == "none") return AugPhase::kNone;
  if (name == "train") return AugPhase::kTrain;
  if (name == "test") return AugPhase::kTest;
  if (name == "train-test" || name == "train_test") return AugPhase::kTrainTest;
  fail(ErrorKind::kInvalidArgument, "unknown augmentation phase '" + std::string(name) + "'");
}

std::string_view aug_phase_name(AugPhase phase) {
  switch (phase) {
    case AugPhase::kNone: return "none";
    case AugPhase::kTrain: return "train";
    case AugPhase::kTest: return "test";
    case AugPhase::kTrainTest: return "train-test";
  }
  return "?";
}

ExperimentSeeds ExperimentSeeds::from_master(std::uint64_t master) {
  return {derive_seed(master, {1}), derive_seed(master, {2}), derive_seed(master, {3}),
          derive_seed(master, {4}), derive_seed(master, {5}), derive_seed(master, {6})};
}

void ExperimentConfig::validate() const {
  if (policy == "none" && phase != AugPhase::kNone) {
    fail(ErrorKind::kInvalidArgument, "augmentation phase '" + std::string(aug_phase_name(phase)) + "' needs a policy");
  }
  if (policy != "none" && phase == AugPhase::kNone) {
    fail(ErrorKind::kInvalidArgument, "policy '" + policy + "' given with augmentation phase 'none'");
  }
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) fail(ErrorKind::kInvalidArgument, "train fraction must be in (0, 1]");
  if (hidden < 1) fail(ErrorKind::kInvalidArgument, "hidden size must be positive");
  train.validate();
  resolved_policy();
}

Policy ExperimentConfig::resolved_policy() const { return policy_from_name(policy, noise_sigmas); }

void Metrics::record(int snr_db, int truth, int predicted) {
  const std::size_t k = class_names.size();
  SnrMetrics& m = per_snr[snr_db];
  if (m.confusion.empty()) m.confusion.assign(k, std::vector<std::int64_t>(k, 0));
  ++m.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
  ++m.total;
  ++total;
  if (truth == predicted) {
    ++m.correct;
    ++correct;
  }
}

bool operator==(const Metrics& a, const Metrics& b) {
  if (a.class_names != b.class_names || a.total != b.total || a.correct != b.correct) return false;
  if (a.per_snr.size() != b.per_snr.size()) return false;
  for (const auto& [snr, m] : a.per_snr) {
    const auto it = b.per_snr.find(snr);
    if (it == b.per_snr.end() || it->second.total != m.total || it->second.correct != m.correct ||
        it->second.confusion != m.confusion) {
      return false;
    }
  }
  return true;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, std::uint64_t seed) {
  if (ds.empty()) fail(ErrorKind::kInvalidInput, "split_dataset: empty dataset");
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (auto& [key, members] : group_strata(ds)) {
    if (members.size() % 2 != 0) {
      fail(ErrorKind::kInvalidInput, "split_dataset: stratum (label " + std::to_string(key.first) + ", snr " +
                                         std::to_string(key.second) + ") has an odd count " +
                                         std::to_string(members.size()));
    }
    RandomEngine rng = make_engine(seed, {stratum_key(key)});
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t half = members.size() / 2;
    train_idx.insert(train_idx.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(half));
    test_idx.insert(test_idx.end(), members.begin() + static_cast<std::ptrdiff_t>(half), members.end());
  }
  const std::string note = "split seed=" + std::to_string(seed);
  return {gather(ds, std::move(train_idx), note + " side=train"), gather(ds, std::move(test_idx), note + " side=test")};
}

Dataset subsample(const Dataset& train, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) fail(ErrorKind::kInvalidArgument, "subsample: fraction must be in (0, 1]");
  if (train.empty()) fail(ErrorKind::kInvalidInput, "subsample: empty dataset");
  Strata strata = group_strata(train);

  struct Quota {
    std::pair<int, int> key;
    std::size_t count;
    double remainder;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (const auto& [key, members] : strata) {
    const double exact = fraction * static_cast<double>(members.size());
    const auto base = static_cast<std::size_t>(std::floor(exact));
    quotas.push_back({key, base, exact - static_cast<double>(base)});
    assigned += base;
  }
  // nearbyint rounds half to even under the default rounding mode
  const auto target = static_cast<std::size_t>(std::nearbyint(fraction * static_cast<double>(train.size())));
  RandomEngine tie_rng = make_engine(seed, {0x7469});
  std::shuffle(quotas.begin(), quotas.end(), tie_rng);
  std::stable_sort(quotas.begin(), quotas.end(), [](const Quota& a, const Quota& b) { return a.remainder > b.remainder; });
  for (std::size_t k = 0; assigned < target && k < quotas.size(); ++k, ++assigned) ++quotas[k].count;

  std::vector<std::size_t> keep;
  for (const Quota& q : quotas) {
    if (q.count == 0) {
      fail(ErrorKind::kDegenerateInput, "subsample: fraction leaves stratum (label " + std::to_string(q.key.first) +
                                            ", snr " + std::to_string(q.key.second) + ") empty");
    }
    std::vector<std::size_t>& members = strata[q.key];
    RandomEngine rng = make_engine(seed, {stratum_key(q.key)});
    std::shuffle(members.begin(), members.end(), rng);
    keep.insert(keep.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(q.count));
  }
  return gather(train, std::move(keep), "subsample fraction=" + fraction_text(fraction) + " seed=" + std::to_string(seed));
}

Prediction fuse_predictions(const Eigen::MatrixXf& probs) {
  if (probs.cols() < 1 || probs.rows() < 1) fail(ErrorKind::kInvalidInput, "fuse_predictions: no predictions");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(probs.rows());
  for (Eigen::Index n = 0; n < probs.cols(); ++n) sum += probs.col(n).cast<double>();
  Prediction out;
  out.label = nn::argmax(sum);
  out.fused.resize(static_cast<std::size_t>(sum.size()));
  for (Eigen::Index k = 0; k < sum.size(); ++k) out.fused[static_cast<std::size_t>(k)] = sum(k) / static_cast<double>(probs.cols());
  return out;
}

Prediction tta_predict(const Classifier& model, const SignalFrame& frame, const Policy& policy, RandomEngine& rng) {
  if (policy.transforms.empty()) fail(ErrorKind::kInvalidArgument, "tta_predict: policy has no transforms");
  Eigen::MatrixXf probs(static_cast<Eigen::Index>(model.class_names().size()),
                        static_cast<Eigen::Index>(policy.scale_factor()));
  for (std::size_t n = 0; n < policy.scale_factor(); ++n) {
    const SignalFrame variant[] = {apply_transform(frame, policy.transforms[n], &rng)};
    probs.col(static_cast<Eigen::Index>(n)) = model.predict_proba(variant);
  }
  return fuse_predictions(probs);
}

Metrics evaluate(const Classifier& model, const Dataset& test, const Policy* tta, std::uint64_t eval_seed) {
  if (model.class_names() != test.class_names) {
    fail(ErrorKind::kInvalidInput, "evaluate: model and dataset class tables differ");
  }
  Metrics metrics;
  metrics.class_names = test.class_names;
  const std::size_t k = test.class_count();
  std::vector<SignalFrame> frames;
  frames.reserve(test.size());

  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(test.size()));
  if (tta == nullptr) {
    for (const LabeledFrame& rec : test.frames) frames.push_back(rec.frame);
    scores = model.predict_proba(frames).cast<double>();
  } else {
    for (std::size_t n = 0; n < tta->scale_factor(); ++n) {
      frames.clear();
      const Transform& t = tta->transforms[n];
      for (std::size_t i = 0; i < test.size(); ++i) {
        RandomEngine rng = make_engine(eval_seed, {i, n});
        frames.push_back(apply_transform(test.frames[i].frame, t, &rng));
      }
      scores += model.predict_proba(frames).cast<double>();
    }
  }
  for (std::size_t i = 0; i < test.size(); ++i) {
    const LabeledFrame& rec = test.frames[i];
    metrics.record(rec.snr_db, rec.label, nn::argmax(scores.col(static_cast<Eigen::Index>(i))));
  }
  return metrics;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& data, int threads,
                                const std::function<void(const nn::EpochRecord&)>& on_epoch) {
  cfg.validate();
  data.validate();
  if (data.empty()) fail(ErrorKind::kInvalidInput, "run_experiment: empty dataset");

  bool halve = false;
  if (cfg.seq_len != 0 && cfg.seq_len != data.seq_len) {
    if (cfg.seq_len * 2 != data.seq_len) {
      fail(ErrorKind::kInvalidArgument, "run_experiment: seq_len must equal the data length or half of it");
    }
    halve = true;
  }

  Dataset train;
  Dataset test;
  if (halve && !cfg.halve_after_split) {
    std::tie(train, test) = split_dataset(halve_dataset(data), cfg.seeds.split);
  } else {
    std::tie(train, test) = split_dataset(data, cfg.seeds.split);
    if (halve) {
      train = halve_dataset(train);
      test = halve_dataset(test);
    }
  }
  if (cfg.train_fraction < 1.0) train = subsample(train, cfg.train_fraction, cfg.seeds.subsample);

  const Policy policy = cfg.resolved_policy();
  if (augments_training(cfg.phase)) train = augment_dataset(train, policy, cfg.seeds.augment, threads);

  ExperimentResult result;
  result.train_frames = train.size();
  const nn::Shape shape{2, cfg.hidden, static_cast<int>(data.class_count())};
  result.model.params = nn::init_params<float>(shape, cfg.seeds.init, cfg.init);
  result.model.class_names = data.class_names;
  result.model.seq_len = train.seq_len;

  nn::TrainConfig tc = cfg.train;
  tc.seed = cfg.seeds.train;
  result.history = nn::train_network(result.model.params, train, tc, threads, on_epoch);

  std::ostringstream prov;
  prov << "phase=" << aug_phase_name(cfg.phase) << " policy=" << policy.name << " fraction=" << cfg.train_fraction
       << " seq_len=" << train.seq_len << " hidden=" << cfg.hidden << " forget_bias=" << cfg.init.forget_bias << " input_gain=" << cfg.init.input_gain << " epochs=" << tc.epochs
       << " batch=" << tc.batch_size << " lr=" << tc.initial_lr << " dropout=" << tc.dropout
       << " train_frames=" << train.size() << " data=[" << data.provenance << "]";
  result.model.provenance = prov.str();

  const LstmClassifier classifier(result.model, threads);
  result.metrics = evaluate(classifier, test, augments_testing(cfg.phase) ? &policy : nullptr, cfg.seeds.eval);
  result.test = std::move(test);
  return result;
}

}  // namespace iqaug
