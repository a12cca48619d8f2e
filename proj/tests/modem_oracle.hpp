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

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "iqaug/modem.hpp"

namespace iqaug::test {

/// 10 log10 of total clean power over total noise power across `frames`
/// independent frames, each with its own drawn channel.
inline double measured_snr_db(ModClass c, int snr_db, int frames, std::size_t len, std::uint64_t seed) {
  double signal = 0.0;
  double noise = 0.0;
  for (int n = 0; n < frames; ++n) {
    RandomEngine rng(derive_seed(seed, {static_cast<std::uint64_t>(n)}));
    ChannelConfig ch = draw_channel(snr_db, ImpairmentRanges{}, rng);
    const SignalFrame clean = modulate(c, len, rng);
    ch.add_noise = false;
    const SignalFrame faded = impair(clean, ch, rng);
    ch.add_noise = true;
    const SignalFrame noisy = impair(clean, ch, rng);
    for (std::size_t t = 0; t < len; ++t) {
      const double di = double(noisy[t].i) - faded[t].i;
      const double dq = double(noisy[t].q) - faded[t].q;
      signal += double(faded[t].i) * faded[t].i + double(faded[t].q) * faded[t].q;
      noise += di * di + dq * dq;
    }
  }
  return 10.0 * std::log10(signal / noise);
}

/// Fraction of BPSK symbols recovered by derotating with the known channel
/// phase and frequency offset, matched filtering, and slicing at the symbol
/// instants.
inline double bpsk_symbol_recovery(int snr_db, int frames, std::size_t len, std::uint64_t seed) {
  const std::vector<double> h = rrc_taps(kRrcRolloff, kSamplesPerSymbol, kRrcSpanSymbols);
  const int half = static_cast<int>(h.size() / 2);
  std::size_t hits = 0;
  std::size_t total = 0;
  for (int n = 0; n < frames; ++n) {
    RandomEngine rng(derive_seed(seed, {static_cast<std::uint64_t>(n)}));
    const ChannelConfig ch = draw_channel(snr_db, ImpairmentRanges{}, rng);
    const ModulatedFrame mf = modulate_detailed(ModClass::kBpsk, len, rng);
    const SignalFrame rx = impair(mf.frame, ch, rng);
    std::vector<std::complex<double>> base(len);
    for (std::size_t t = 0; t < len; ++t) {
      const double theta = ch.phase_offset + 2.0 * std::numbers::pi * ch.cfo_fraction * static_cast<double>(t);
      base[t] = std::complex<double>(rx[t].i, rx[t].q) * std::polar(1.0, -theta);
    }
    for (const SymbolMark& m : mf.marks) {
      std::complex<double> acc;
      for (int k = -half; k <= half; ++k) {
        const long t = static_cast<long>(m.sample) + k;
        if (t >= 0 && t < static_cast<long>(len)) acc += base[t] * h[k + half];
      }
      hits += (acc.real() > 0.0) == (m.symbol.real() > 0.0);
      ++total;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace iqaug::test
