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

// iqaug: generate, train and evaluate from the command line.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "iqaug/augment.hpp"
#include "iqaug/error.hpp"
#include "iqaug/experiments.hpp"
#include "iqaug/modem.hpp"
#include "iqaug/nn/model.hpp"
#include "iqaug/report.hpp"
#include "iqaug/rsig.hpp"

#ifndef IQAUG_VERSION
#define IQAUG_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace iqaug;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::kIo, "sha256 failed");
  }
  std::string hex;
  char two[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(two, sizeof two, "%02x", digest[k]);
    hex += two;
  }
  return hex;
}

std::string file_digest(const fs::path& p) { return sha256_hex(read_file_bytes(p)); }

/// "all" or a comma list of class names.
std::vector<ModClass> parse_classes(const std::string& text) {
  if (text == "all") return {kAllModClasses.begin(), kAllModClasses.end()};
  std::vector<ModClass> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto c = parse_mod_class(item);
    if (!c) fail(ErrorKind::kInvalidArgument, "unknown modulation class '" + item + "'");
    out.push_back(*c);
  }
  if (out.empty()) fail(ErrorKind::kInvalidArgument, "empty class list");
  return out;
}

/// lo:hi:step, inclusive.
std::vector<int> parse_snr_range(const std::string& text) {
  int lo = 0;
  int hi = 0;
  int step = 0;
  char c1 = 0;
  char c2 = 0;
  std::stringstream ss(text);
  if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !ss.eof()) {
    fail(ErrorKind::kInvalidArgument, "SNR range must look like lo:hi:step, got '" + text + "'");
  }
  if (step <= 0 || hi < lo) fail(ErrorKind::kInvalidArgument, "SNR range needs lo <= hi and step > 0");
  std::vector<int> out;
  for (int s = lo; s <= hi; s += step) out.push_back(s);
  return out;
}

struct Run {
  json manifest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  Run(const std::string& command, int argc, char** argv, const CLI::App& app) {
    json args = json::array();
    for (int k = 0; k < argc; ++k) args.push_back(argv[k]);
    manifest["tool"] = "iqaug";
    manifest["version"] = IQAUG_VERSION;
    manifest["command"] = command;
    manifest["argv"] = args;
    manifest["config"] = app.config_to_str(true, false);
    manifest["started_utc"] = utc_now();
  }

  void input(const std::string& role, const fs::path& p) {
    manifest["inputs"][role] = {{"path", p.string()}, {"sha256", file_digest(p)}};
  }
  void output(const std::string& role, const fs::path& p) {
    manifest["outputs"][role] = {{"path", p.string()}, {"sha256", file_digest(p)}};
  }

  void finish(const fs::path& path) {
    manifest["finished_utc"] = utc_now();
    manifest["elapsed_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text_file(path, manifest.dump(2) + "\n");
  }
};

void ensure_parent(const fs::path& p) {
  if (!p.has_parent_path()) return;
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  if (ec) fail(ErrorKind::kIo, "cannot create directory " + p.parent_path().string() + ": " + ec.message());
}

fs::path manifest_path_for(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

struct GenFlags {
  std::string classes = "all";
  std::string snr = "-20:18:2";
  std::size_t per_class = 1000;
  std::size_t len = 128;
  std::uint64_t seed = 0;
  bool multipath = false;
  bool fixed_phase = false;
  double cfo_max = 1e-3;
  double sro_max_ppm = 50.0;
  std::string out;
};

struct TrainFlags {
  std::string data;
  std::string out;
  std::string aug = "none";
  std::string phase;
  std::vector<double> noise_sigmas;
  double fraction = 1.0;
  int epochs = 80;
  int batch = 128;
  double lr = 0.001;
  double dropout = 0.5;
  int patience = 3;
  int hidden = 128;
  double forget_bias = 1.0;
  double input_gain = 1.0;
  std::size_t len = 0;
  bool halve_after_split = false;
  std::uint64_t seed = 0;
  std::string report_dir;
  std::string save_test;
};

struct EvalFlags {
  std::string model;
  std::string data;
  std::string tta = "none";
  std::vector<double> noise_sigmas;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenFlags& f, int threads, Run& run) {
  GenConfig cfg;
  cfg.classes = parse_classes(f.classes);
  cfg.snr_grid = parse_snr_range(f.snr);
  cfg.frames_per_class_per_snr = f.per_class;
  cfg.seq_len = f.len;
  cfg.seed = f.seed;
  cfg.impairments.multipath = f.multipath;
  cfg.impairments.random_phase = !f.fixed_phase;
  cfg.impairments.cfo_max = f.cfo_max;
  cfg.impairments.sro_max_ppm = f.sro_max_ppm;

  const Dataset ds = generate_dataset(cfg, threads);
  ensure_parent(f.out);
  write_rsig(f.out, ds);
  run.manifest["seeds"] = {{"generator", f.seed}};
  run.manifest["generator"] = cfg.describe();
  run.output("dataset", f.out);
  run.finish(manifest_path_for(f.out));
  std::cout << "wrote " << ds.size() << " frames (" << ds.class_count() << " classes x " << cfg.snr_grid.size()
            << " SNRs x " << f.per_class << ", length " << f.len << ") to " << f.out << "\n";
  return 0;
}

int cmd_train(const TrainFlags& f, int threads, Run& run) {
  ExperimentConfig cfg;
  cfg.policy = f.aug;
  const std::string phase = f.phase.empty() ? (f.aug == "none" ? "none" : "train") : f.phase;
  cfg.phase = parse_aug_phase(phase);
  cfg.noise_sigmas = f.noise_sigmas;
  cfg.train_fraction = f.fraction;
  cfg.seq_len = f.len;
  cfg.halve_after_split = f.halve_after_split;
  cfg.hidden = f.hidden;
  cfg.init.forget_bias = f.forget_bias;
  cfg.init.input_gain = f.input_gain;
  cfg.train.epochs = f.epochs;
  cfg.train.batch_size = f.batch;
  cfg.train.initial_lr = f.lr;
  cfg.train.dropout = f.dropout;
  cfg.train.plateau_patience = f.patience;
  cfg.seeds = ExperimentSeeds::from_master(f.seed);
  cfg.validate();

  run.input("data", f.data);
  const Dataset data = read_rsig(f.data);
  const ExperimentResult result = run_experiment(cfg, data, threads, [](const nn::EpochRecord& e) {
    std::cout << "epoch " << e.epoch << " loss " << e.train_loss << " acc " << e.train_acc << " lr " << e.lr << "\n";
  });

  const fs::path out(f.out);
  ensure_parent(out);
  nn::write_rmdl(out, result.model);
  const fs::path reports = f.report_dir.empty() ? (out.has_parent_path() ? out.parent_path() : fs::path(".")) : fs::path(f.report_dir);
  write_metric_reports(reports, result.metrics);
  write_text_file(reports / "history.csv", history_csv(result.history));
  if (!f.save_test.empty()) {
    ensure_parent(f.save_test);
    write_rsig(f.save_test, result.test);
    run.output("test_set", f.save_test);
  }

  run.manifest["seeds"] = {{"master", f.seed},          {"split", cfg.seeds.split},
                           {"subsample", cfg.seeds.subsample}, {"augment", cfg.seeds.augment},
                           {"init", cfg.seeds.init},      {"train", cfg.seeds.train},
                           {"eval", cfg.seeds.eval}};
  run.manifest["train_frames"] = result.train_frames;
  run.manifest["test_frames"] = result.test.size();
  run.manifest["test_accuracy"] = result.metrics.overall_accuracy();
  run.output("model", out);
  run.output("history", reports / "history.csv");
  run.output("accuracy", reports / "accuracy_vs_snr.csv");
  run.finish(manifest_path_for(out));
  std::cout << "test accuracy " << result.metrics.overall_accuracy() << " on " << result.test.size() << " frames\n";
  return 0;
}

int cmd_eval(const EvalFlags& f, int threads, Run& run) {
  const Policy policy = policy_from_name(f.tta, f.noise_sigmas);
  run.input("model", f.model);
  run.input("data", f.data);
  const nn::Model model = nn::read_rmdl(f.model);
  const Dataset data = read_rsig(f.data);
  const LstmClassifier clf(model, threads);
  const Metrics metrics = evaluate(clf, data, f.tta == "none" ? nullptr : &policy, f.seed);

  const fs::path out(f.out);
  write_metric_reports(out, metrics);
  run.manifest["seeds"] = {{"eval", f.seed}};
  run.manifest["accuracy"] = metrics.overall_accuracy();
  run.output("accuracy", out / "accuracy_vs_snr.csv");
  run.finish(out / "manifest.json");
  std::cout << "accuracy " << metrics.overall_accuracy() << " on " << metrics.total << " frames\n";
  return 0;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return kExitUsage;
    case ErrorKind::kInvalidInput:
    case ErrorKind::kDegenerateInput:
    case ErrorKind::kFormat:
    case ErrorKind::kIo:
      return kExitData;
  }
  return kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"I/Q modulation data generation, augmentation and LSTM classification"};
  app.set_version_flag("--version", IQAUG_VERSION);
  app.set_config("--config", "", "TOML/INI file of flag values; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads (results do not depend on this)")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();

  GenFlags g;
  CLI::App* gen = app.add_subcommand("gen", "Synthesize a labeled RSIG dataset");
  gen->add_option("--classes", g.classes, "'all' or a comma list, e.g. bpsk,qpsk")->capture_default_str();
  gen->add_option("--snr", g.snr, "SNR grid lo:hi:step in dB")->capture_default_str();
  gen->add_option("--per-class", g.per_class, "Frames per class per SNR")->capture_default_str();
  gen->add_option("--len", g.len, "Samples per frame")->capture_default_str();
  gen->add_option("--seed", g.seed)->capture_default_str();
  gen->add_flag("--multipath", g.multipath, "Enable the random multipath channel");
  gen->add_flag("--fixed-phase", g.fixed_phase, "Disable the random carrier phase");
  gen->add_option("--cfo-max", g.cfo_max, "Max carrier offset, cycles/sample")->capture_default_str();
  gen->add_option("--sro-max-ppm", g.sro_max_ppm, "Max sample-rate offset, ppm")->capture_default_str();
  gen->add_option("--out", g.out, "Output RSIG file")->required();

  TrainFlags t;
  CLI::App* train = app.add_subcommand("train", "Split, augment, train and evaluate; writes an RMDL model");
  train->add_option("--data", t.data, "Input RSIG dataset")->required();
  train->add_option("--out", t.out, "Output RMDL model")->required();
  train->add_option("--aug", t.aug, "Augmentation policy")
      ->check(CLI::IsMember({"none", "rotation", "flip", "noise", "joint"}))
      ->capture_default_str();
  train->add_option("--phase", t.phase, "Where augmentation applies (default: train when --aug is set)")
      ->check(CLI::IsMember({"none", "train", "test", "train-test"}));
  train->add_option("--noise-sigmas", t.noise_sigmas, "Noise levels for the noise policy")->delimiter(',');
  train->add_option("--fraction", t.fraction, "Fraction of the training split kept")->capture_default_str();
  train->add_option("--epochs", t.epochs)->capture_default_str();
  train->add_option("--batch", t.batch)->capture_default_str();
  train->add_option("--lr", t.lr)->capture_default_str();
  train->add_option("--dropout", t.dropout)->capture_default_str();
  train->add_option("--patience", t.patience, "Epochs without improvement before halving the rate")
      ->capture_default_str();
  train->add_option("--hidden", t.hidden, "LSTM cells per layer")->capture_default_str();
  train->add_option("--forget-bias", t.forget_bias, "Initial forget-gate bias")->capture_default_str();
  train->add_option("--input-gain", t.input_gain, "Initial scale of the first layer's input weights")
      ->capture_default_str();
  train->add_option("--len", t.len, "Frame length fed to the network; half the data length halves frames")
      ->capture_default_str();
  train->add_flag("--halve-after-split", t.halve_after_split, "Split whole frames before halving them");
  train->add_option("--seed", t.seed, "Master seed")->capture_default_str();
  train->add_option("--report-dir", t.report_dir, "Where history and test reports go (default: model directory)");
  train->add_option("--save-test", t.save_test, "Also write the held-out test split as RSIG");

  EvalFlags e;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a model on a dataset, optionally with test-time fusion");
  eval->add_option("--model", e.model, "RMDL model")->required();
  eval->add_option("--data", e.data, "RSIG dataset")->required();
  eval->add_option("--tta", e.tta, "Fusion policy")
      ->check(CLI::IsMember({"none", "rotation", "flip", "noise", "joint"}))
      ->capture_default_str();
  eval->add_option("--noise-sigmas", e.noise_sigmas, "Noise levels for the noise policy")->delimiter(',');
  eval->add_option("--seed", e.seed, "Seed for noise variants")->capture_default_str();
  eval->add_option("--out", e.out, "Report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      Run run("gen", argc, argv, app);
      return cmd_gen(g, threads, run);
    }
    if (train->parsed()) {
      if (!t.phase.empty() && t.phase != "none" && t.aug == "none") {
        std::cerr << "error: --phase " << t.phase << " needs an augmentation policy (--aug)\n";
        return kExitUsage;
      }
      Run run("train", argc, argv, app);
      return cmd_train(t, threads, run);
    }
    if (eval->parsed()) {
      Run run("eval", argc, argv, app);
      return cmd_eval(e, threads, run);
    }
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(err.kind());
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
