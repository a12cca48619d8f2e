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
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iqaug/rng.hpp"
#include "iqaug/signal.hpp"

namespace iqaug {

/// Modulation categories in canonical label order.
enum class ModClass : std::uint8_t {
  kBpsk,
  kQpsk,
  k8psk,
  kCpfsk,
  kGfsk,
  kPam4,
  kQam16,
  kQam64,
  kAmDsb,
  kAmSsb,
  kWbfm,
};

inline constexpr std::array<ModClass, 11> kAllModClasses = {
    ModClass::kBpsk,  ModClass::kQpsk,  ModClass::k8psk,  ModClass::kCpfsk, ModClass::kGfsk, ModClass::kPam4,
    ModClass::kQam16, ModClass::kQam64, ModClass::kAmDsb, ModClass::kAmSsb, ModClass::kWbfm,
};

std::string_view mod_class_name(ModClass c);

/// Case-insensitive; accepts the canonical names and their dash-less forms
/// ("am-dsb", "amdsb", "wb-fm").
std::optional<ModClass> parse_mod_class(std::string_view name);

bool is_linear_digital(ModClass c);

/// Unit-average-power symbol alphabet of a linear digital class; empty for
/// CPFSK, GFSK and the analog classes.
std::vector<std::complex<double>> constellation(ModClass c);

// Synthesis parameters.  Recorded verbatim in generator provenance.
inline constexpr int kSamplesPerSymbol = 8;
inline constexpr double kRrcRolloff = 0.35;
inline constexpr int kRrcSpanSymbols = 8;
inline constexpr double kCpfskIndex = 0.5;
inline constexpr double kGfskBt = 0.3;
inline constexpr double kGfskIndex = 0.5;
inline constexpr int kGfskSpanSymbols = 4;
inline constexpr double kAmDepth = 0.5;
/// Peak WBFM frequency deviation in cycles per sample.
inline constexpr double kWbfmDeviation = 0.08;

/// Root-raised-cosine taps at `sps` samples per symbol spanning `span`
/// symbols (span * sps + 1 taps), scaled to unit energy.
std::vector<double> rrc_taps(double rolloff, int sps, int span);

/// Transmitted symbol whose pulse peaks at `sample` within the frame.
struct SymbolMark {
  std::size_t sample = 0;
  std::complex<double> symbol;
};

struct ModulatedFrame {
  SignalFrame frame;
  /// Filled for linear digital classes only.
  std::vector<SymbolMark> marks;
};

/// Clean baseband frame of unit average power.  Linear digital classes are
/// RRC pulse shaped with a random symbol timing offset.
SignalFrame modulate(ModClass c, std::size_t seq_len, RandomEngine& rng);
ModulatedFrame modulate_detailed(ModClass c, std::size_t seq_len, RandomEngine& rng);

struct ChannelConfig {
  int snr_db = 0;
  double phase_offset = 0.0;
  /// Carrier frequency offset in cycles per sample; |cfo| < 0.5.
  double cfo_fraction = 0.0;
  double sro_ppm = 0.0;
  std::vector<std::complex<double>> multipath_taps;
  bool add_noise = true;
};

/// Multipath FIR (zero history), constant phase rotation, CFO, sample-rate
/// offset (linear interpolation), then AWGN whose per-complex-sample variance
/// is the measured pre-noise power times 10^(-snr/10), split equally between
/// I and Q.  Only the noise stage draws from `rng`.
SignalFrame impair(const SignalFrame& frame, const ChannelConfig& ch, RandomEngine& rng);

struct ImpairmentRanges {
  bool random_phase = true;
  double cfo_max = 1e-3;
  double sro_max_ppm = 50.0;
  bool multipath = false;
  int multipath_taps = 3;
};

/// Draws one channel realization for the given SNR.
ChannelConfig draw_channel(int snr_db, const ImpairmentRanges& ranges, RandomEngine& rng);

std::vector<int> default_snr_grid();

struct GenConfig {
  std::vector<ModClass> classes{kAllModClasses.begin(), kAllModClasses.end()};
  std::vector<int> snr_grid = default_snr_grid();
  std::size_t frames_per_class_per_snr = 1000;
  std::size_t seq_len = 128;
  std::uint64_t seed = 0;
  ImpairmentRanges impairments;

  std::size_t total_frames() const { return classes.size() * snr_grid.size() * frames_per_class_per_snr; }
  std::string describe() const;
};

/// Frames ordered class-major, then SNR, then index.  Frame (c, snr, n) is
/// synthesized from the substream (seed, c, snr, n) so the output does not
/// depend on `threads`.  Labels follow canonical class order.
Dataset generate_dataset(const GenConfig& cfg, int threads = 1);

}  // namespace iqaug
