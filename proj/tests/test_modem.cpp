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

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <map>
#include <set>

#include "iqaug/error.hpp"
#include "iqaug/modem.hpp"
#include "iqaug/rsig.hpp"
#include "modem_oracle.hpp"

using namespace iqaug;

TEST_CASE("class names parse case-insensitively") {
  CHECK(parse_mod_class("bpsk") == ModClass::kBpsk);
  CHECK(parse_mod_class("8PSK") == ModClass::k8psk);
  CHECK(parse_mod_class("am-dsb") == ModClass::kAmDsb);
  CHECK(parse_mod_class("amssb") == ModClass::kAmSsb);
  CHECK(parse_mod_class("WB-FM") == ModClass::kWbfm);
  CHECK_FALSE(parse_mod_class("ofdm").has_value());
  for (ModClass c : kAllModClasses) CHECK(parse_mod_class(mod_class_name(c)) == c);
}

TEST_CASE("constellations") {
  using cd = std::complex<double>;
  CHECK(constellation(ModClass::kBpsk) == std::vector<cd>{cd(1, 0), cd(-1, 0)});

  const auto qpsk = constellation(ModClass::kQpsk);
  REQUIRE(qpsk.size() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(qpsk[k]) == doctest::Approx(1.0));
    CHECK(std::arg(qpsk[k] * std::polar(1.0, -(std::numbers::pi / 4 + k * std::numbers::pi / 2))) ==
          doctest::Approx(0.0).scale(1.0));
  }

  // mean of {9, 1, 1, 9} / c^2 = 1  =>  c = sqrt(5)
  const auto pam4 = constellation(ModClass::kPam4);
  const double c = std::sqrt(5.0);
  REQUIRE(pam4.size() == 4);
  CHECK(pam4[0].real() == doctest::Approx(-3 / c));
  CHECK(pam4[1].real() == doctest::Approx(-1 / c));
  CHECK(pam4[2].real() == doctest::Approx(1 / c));
  CHECK(pam4[3].real() == doctest::Approx(3 / c));

  CHECK(constellation(ModClass::kQam16).size() == 16);
  CHECK(constellation(ModClass::kQam64).size() == 64);
  CHECK(constellation(ModClass::k8psk).size() == 8);
  CHECK(constellation(ModClass::kWbfm).empty());
  for (ModClass m : kAllModClasses) {
    const auto pts = constellation(m);
    if (pts.empty()) continue;
    double power = 0.0;
    for (const cd& p : pts) power += std::norm(p);
    CHECK(power / pts.size() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rrc taps are symmetric, unit energy and nearly Nyquist when matched") {
  const auto h = rrc_taps(kRrcRolloff, kSamplesPerSymbol, kRrcSpanSymbols);
  REQUIRE(h.size() == kRrcSpanSymbols * kSamplesPerSymbol + 1);
  double energy = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    CHECK(h[k] == doctest::Approx(h[h.size() - 1 - k]));
    energy += h[k] * h[k];
  }
  CHECK(energy == doctest::Approx(1.0));
  // Raised-cosine (RRC * RRC) is zero at nonzero symbol lags, up to truncation.
  for (int lag = 1; lag < kRrcSpanSymbols; ++lag) {
    double acc = 0.0;
    for (std::size_t k = 0; k + lag * kSamplesPerSymbol < h.size(); ++k) acc += h[k] * h[k + lag * kSamplesPerSymbol];
    CHECK(std::abs(acc) < 0.02);
  }
}

TEST_CASE("clean frames have unit power") {
  for (ModClass c : kAllModClasses) {
    for (std::size_t len : {2u, 64u, 128u, 333u}) {
      RandomEngine rng(derive_seed(1, {static_cast<std::uint64_t>(c), len}));
      const SignalFrame f = modulate(c, len, rng);
      CHECK(f.size() == len);
      CHECK(mean_power(f) == doctest::Approx(1.0).epsilon(1e-3));
    }
  }
  RandomEngine rng(0);
  CHECK_THROWS_AS(modulate(ModClass::kBpsk, 1, rng), Error);
}

TEST_CASE("BPSK symbols are antipodal on the real axis") {
  RandomEngine rng(3);
  const ModulatedFrame mf = modulate_detailed(ModClass::kBpsk, 128, rng);
  REQUIRE(mf.marks.size() == 128 / kSamplesPerSymbol);
  std::set<double> distinct;
  for (const SymbolMark& m : mf.marks) {
    CHECK(m.symbol.imag() == 0.0);
    distinct.insert(m.symbol.real());
  }
  CHECK(distinct.size() == 2);
  CHECK(*distinct.begin() == doctest::Approx(-*distinct.rbegin()));
  for (const IQSample& s : mf.frame) CHECK(s.q == 0.0f);
}

TEST_CASE("identity channel") {
  RandomEngine rng(4);
  const SignalFrame f = modulate(ModClass::kQam16, 128, rng);
  ChannelConfig ch;
  ch.add_noise = false;
  CHECK(impair(f, ch, rng) == f);
  ch.cfo_fraction = 0.5;
  CHECK_THROWS_AS(impair(f, ch, rng), Error);
}

TEST_CASE("0 dB puts variance 0.5 on each component") {
  const SignalFrame ones(std::vector<IQSample>(50000, {1.0f, 0.0f}));
  ChannelConfig ch;
  ch.snr_db = 0;
  RandomEngine rng(5);
  const SignalFrame noisy = impair(ones, ch, rng);
  double var_i = 0.0;
  double var_q = 0.0;
  for (const IQSample& s : noisy) {
    var_i += (s.i - 1.0) * (s.i - 1.0);
    var_q += double(s.q) * s.q;
  }
  CHECK(var_i / noisy.size() == doctest::Approx(0.5).epsilon(0.03));
  CHECK(var_q / noisy.size() == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("measured SNR tracks the target within 0.5 dB") {
  for (int snr : {-20, -10, 0, 10, 18}) {
    const double measured = test::measured_snr_db(ModClass::kQpsk, snr, 100, 128, 77);
    CHECK(std::abs(measured - snr) <= 0.5);
  }
}

TEST_CASE("hard-decision BPSK oracle recovers symbols at high SNR") {
  for (int snr : {10, 14, 18}) CHECK(test::bpsk_symbol_recovery(snr, 200, 128, 31) > 0.95);
}

TEST_CASE("multipath option keeps power and changes the waveform") {
  ImpairmentRanges ranges;
  ranges.multipath = true;
  RandomEngine rng(6);
  const ChannelConfig ch = draw_channel(10, ranges, rng);
  REQUIRE(ch.multipath_taps.size() == 3);
  double energy = 0.0;
  for (auto tap : ch.multipath_taps) energy += std::norm(tap);
  CHECK(energy == doctest::Approx(1.0));
}

TEST_CASE("generate_dataset counts, order and labels") {
  GenConfig cfg;
  cfg.classes = {ModClass::kQam16, ModClass::kBpsk, ModClass::kWbfm, ModClass::kGfsk};
  cfg.snr_grid = {4};
  cfg.frames_per_class_per_snr = 50;
  cfg.seq_len = 32;
  cfg.seed = 9;
  const Dataset ds = generate_dataset(cfg);
  CHECK(ds.size() == 200);
  CHECK(ds.class_names == std::vector<std::string>{"BPSK", "GFSK", "QAM16", "WBFM"});
  for (std::size_t n = 0; n < ds.size(); ++n) {
    CHECK(ds.frames[n].label == n / 50);
    CHECK(ds.frames[n].snr_db == 4);
  }
  CHECK(ds.provenance.find("seed=9") != std::string::npos);
  CHECK(ds.provenance.find("rrc_rolloff=0.35") != std::string::npos);
}

TEST_CASE("generate_dataset per-stratum counts on a multi-SNR grid") {
  GenConfig cfg;
  cfg.snr_grid = {-20, 0, 18};
  cfg.frames_per_class_per_snr = 3;
  cfg.seq_len = 16;
  const Dataset ds = generate_dataset(cfg);
  CHECK(ds.size() == cfg.total_frames());
  CHECK(ds.size() == 11 * 3 * 3);
  std::map<std::pair<int, int>, int> counts;
  for (const LabeledFrame& rec : ds.frames) ++counts[{rec.label, rec.snr_db}];
  CHECK(counts.size() == 33);
  for (const auto& [key, n] : counts) CHECK(n == 3);
}

TEST_CASE("generation is deterministic and thread-count independent") {
  GenConfig cfg;
  cfg.snr_grid = {-4, 6};
  cfg.frames_per_class_per_snr = 4;
  cfg.seed = 123;
  const auto a = encode_rsig(generate_dataset(cfg, 1));
  const auto b = encode_rsig(generate_dataset(cfg, 3));
  CHECK(a == b);
  cfg.seed = 124;
  CHECK(encode_rsig(generate_dataset(cfg, 1)) != a);
}

TEST_CASE("generate_dataset rejects bad configs") {
  GenConfig cfg;
  cfg.classes.clear();
  CHECK_THROWS_AS(generate_dataset(cfg), Error);
  cfg = GenConfig{};
  cfg.snr_grid.clear();
  CHECK_THROWS_AS(generate_dataset(cfg), Error);
  cfg = GenConfig{};
  cfg.classes = {ModClass::kBpsk, ModClass::kBpsk};
  CHECK_THROWS_AS(generate_dataset(cfg), Error);
  cfg = GenConfig{};
  cfg.snr_grid = {0, 0};
  CHECK_THROWS_AS(generate_dataset(cfg), Error);
}
