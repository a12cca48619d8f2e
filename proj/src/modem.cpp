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

#include "iqaug/modem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "iqaug/error.hpp"
#include "iqaug/parallel.hpp"

namespace iqaug {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string strip_dashes(std::string s) {
  std::erase(s, '-');
  std::erase(s, '_');
  return s;
}

std::vector<cd> normalized(std::vector<cd> points) {
  double power = 0.0;
  for (const cd& p : points) power += std::norm(p);
  const double scale = 1.0 / std::sqrt(power / static_cast<double>(points.size()));
  for (cd& p : points) p *= scale;
  return points;
}

std::vector<cd> square_qam(int side) {
  std::vector<cd> pts;
  for (int a = 0; a < side; ++a) {
    for (int b = 0; b < side; ++b) pts.emplace_back(2 * a - side + 1, 2 * b - side + 1);
  }
  return normalized(std::move(pts));
}

SignalFrame to_unit_power_frame(const std::vector<cd>& x) {
  double power = 0.0;
  for (const cd& v : x) power += std::norm(v);
  power /= static_cast<double>(x.size());
  const double scale = power > 0.0 ? 1.0 / std::sqrt(power) : 1.0;
  SignalFrame out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    out[t] = {static_cast<float>(x[t].real() * scale), static_cast<float>(x[t].imag() * scale)};
  }
  return out;
}

ModulatedFrame linear_digital(ModClass c, std::size_t n, RandomEngine& rng) {
  const std::vector<cd> alphabet = constellation(c);
  const std::vector<double> taps = rrc_taps(kRrcRolloff, kSamplesPerSymbol, kRrcSpanSymbols);
  const std::size_t sps = kSamplesPerSymbol;
  const std::size_t delay = (taps.size() - 1) / 2;
  // Start in the steady-state region: past the first full filter length and
  // at a random sub-symbol timing offset.
  const std::size_t n_symbols = (n + 2 * taps.size()) / sps + 2;
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::vector<cd> symbols(n_symbols);
  for (cd& s : symbols) s = alphabet[pick(rng)];
  std::uniform_int_distribution<std::size_t> timing(0, sps - 1);
  const std::size_t start = taps.size() - 1 + timing(rng);

  std::vector<cd> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t k = start + t;  // index into the full convolution
    cd acc = 0.0;
    // upsampled input is nonzero only at multiples of sps
    const std::size_t first_sym = k >= taps.size() - 1 ? (k - (taps.size() - 1) + sps - 1) / sps : 0;
    for (std::size_t s = first_sym; s * sps <= k && s < n_symbols; ++s) acc += symbols[s] * taps[k - s * sps];
    out[t] = acc;
  }

  ModulatedFrame mf;
  for (std::size_t s = 0; s < n_symbols; ++s) {
    const std::size_t peak = s * sps + delay;
    if (peak >= start && peak < start + n) mf.marks.push_back({peak - start, symbols[s]});
  }
  double power = 0.0;
  for (const cd& v : out) power += std::norm(v);
  const double scale = 1.0 / std::sqrt(power / static_cast<double>(n));
  for (SymbolMark& m : mf.marks) m.symbol *= scale;
  mf.frame = to_unit_power_frame(out);
  return mf;
}

// Binary continuous-phase FSK; `gaussian` selects Gaussian frequency shaping.
std::vector<cd> fsk(std::size_t n, bool gaussian, RandomEngine& rng) {
  const std::size_t sps = kSamplesPerSymbol;
  std::vector<double> pulse{1.0};
  if (gaussian) {
    const double sigma = std::sqrt(std::log(2.0)) / (2.0 * kPi * kGfskBt);  // symbol units
    const int half = kGfskSpanSymbols * kSamplesPerSymbol / 2;
    pulse.clear();
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
      const double t = static_cast<double>(k) / kSamplesPerSymbol;
      pulse.push_back(std::exp(-t * t / (2.0 * sigma * sigma)));
      sum += pulse.back();
    }
    for (double& p : pulse) p /= sum;
  }
  const double index = gaussian ? kGfskIndex : kCpfskIndex;
  const std::size_t lead = pulse.size();
  const std::size_t total = n + 2 * lead;
  std::bernoulli_distribution bit(0.5);
  std::vector<double> nrz(total);
  for (std::size_t s = 0; s * sps < total; ++s) {
    const double a = bit(rng) ? 1.0 : -1.0;
    for (std::size_t k = s * sps; k < std::min(total, (s + 1) * sps); ++k) nrz[k] = a;
  }
  std::vector<cd> out(n);
  double phase = 0.0;
  for (std::size_t k = 0; k < lead + n; ++k) {
    double freq = 0.0;
    for (std::size_t j = 0; j < pulse.size() && j <= k; ++j) freq += pulse[j] * nrz[k - j];
    // peak deviation h/2 cycles per symbol
    phase += kPi * index * freq / static_cast<double>(sps);
    if (k >= lead) out[k - lead] = std::polar(1.0, phase);
  }
  return out;
}

struct AnalogSource {
  std::vector<double> m;        // message
  std::vector<double> hilbert;  // its Hilbert transform
};

// Band-limited message: three random-phase tones plus Gaussian noise that is
// ideally low-pass filtered on a 512-sample period (a random-coefficient sum
// of the in-band DFT bins), so the Hilbert transform is exact.  Peak |m| = 1.
AnalogSource analog_source(std::size_t n, RandomEngine& rng) {
  AnalogSource src{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::uniform_real_distribution<double> tone_freq(0.004, 0.03);
  std::uniform_real_distribution<double> tone_amp(0.5, 1.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  auto add_tone = [&](double f, double amp, double phi) {
    for (std::size_t t = 0; t < n; ++t) {
      const double arg = 2.0 * kPi * f * static_cast<double>(t) + phi;
      src.m[t] += amp * std::cos(arg);
      src.hilbert[t] += amp * std::sin(arg);
    }
  };
  for (int k = 0; k < 3; ++k) add_tone(tone_freq(rng), tone_amp(rng), angle(rng));

  constexpr double kPeriod = 512.0;
  constexpr int kBins = 15;  // bins 1..15 of 512: below 0.03 cycles/sample
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double noise_amp = 0.3 / std::sqrt(static_cast<double>(kBins));
  for (int b = 1; b <= kBins; ++b) {
    const double a = gauss(rng);
    const double c = gauss(rng);
    add_tone(b / kPeriod, noise_amp * std::hypot(a, c), std::atan2(c, a));
  }

  double peak = 0.0;
  for (double v : src.m) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (std::size_t t = 0; t < n; ++t) {
      src.m[t] /= peak;
      src.hilbert[t] /= peak;
    }
  }
  return src;
}

std::vector<cd> analog(ModClass c, std::size_t n, RandomEngine& rng) {
  const AnalogSource src = analog_source(n, rng);
  std::vector<cd> out(n);
  switch (c) {
    case ModClass::kAmDsb:
      for (std::size_t t = 0; t < n; ++t) out[t] = 1.0 + kAmDepth * src.m[t];
      break;
    case ModClass::kAmSsb:
      for (std::size_t t = 0; t < n; ++t) out[t] = cd(src.m[t], src.hilbert[t]);
      break;
    default: {
      double phase = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        phase += 2.0 * kPi * kWbfmDeviation * src.m[t];
        out[t] = std::polar(1.0, phase);
      }
    }
  }
  return out;
}

}  // namespace

std::string_view mod_class_name(ModClass c) {
  switch (c) {
    case ModClass::kBpsk: return "BPSK";
    case ModClass::kQpsk: return "QPSK";
    case ModClass::k8psk: return "8PSK";
    case ModClass::kCpfsk: return "CPFSK";
    case ModClass::kGfsk: return "GFSK";
    case ModClass::kPam4: return "PAM4";
    case ModClass::kQam16: return "QAM16";
    case ModClass::kQam64: return "QAM64";
    case ModClass::kAmDsb: return "AM-DSB";
    case ModClass::kAmSsb: return "AM-SSB";
    case ModClass::kWbfm: return "WBFM";
  }
  return "?";
}

std::optional<ModClass> parse_mod_class(std::string_view name) {
  const std::string key = strip_dashes(lower(name));
  for (ModClass c : kAllModClasses) {
    if (strip_dashes(lower(mod_class_name(c))) == key) return c;
  }
  return std::nullopt;
}

bool is_linear_digital(ModClass c) {
  switch (c) {
    case ModClass::kBpsk:
    case ModClass::kQpsk:
    case ModClass::k8psk:
    case ModClass::kPam4:
    case ModClass::kQam16:
    case ModClass::kQam64:
      return true;
    default:
      return false;
  }
}

std::vector<std::complex<double>> constellation(ModClass c) {
  switch (c) {
    case ModClass::kBpsk:
      return {cd(1.0, 0.0), cd(-1.0, 0.0)};
    case ModClass::kQpsk: {
      std::vector<cd> pts;
      for (int k = 0; k < 4; ++k) pts.push_back(std::polar(1.0, kPi / 4 + k * kPi / 2));
      return pts;
    }
    case ModClass::k8psk: {
      std::vector<cd> pts;
      for (int k = 0; k < 8; ++k) pts.push_back(std::polar(1.0, k * kPi / 4));
      return pts;
    }
    case ModClass::kPam4:
      return normalized({cd(-3, 0), cd(-1, 0), cd(1, 0), cd(3, 0)});
    case ModClass::kQam16:
      return square_qam(4);
    case ModClass::kQam64:
      return square_qam(8);
    default:
      return {};
  }
}

std::vector<double> rrc_taps(double rolloff, int sps, int span) {
  const int n = span * sps + 1;
  const int mid = n / 2;
  const double b = rolloff;
  std::vector<double> h(n);
  for (int k = 0; k < n; ++k) {
    const double t = static_cast<double>(k - mid) / sps;
    if (k == mid) {
      h[k] = 1.0 - b + 4.0 * b / kPi;
    } else if (b > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-12) {
      h[k] = b / std::sqrt(2.0) *
             ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * b)) + (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * b)));
    } else {
      const double x = 4.0 * b * t;
      h[k] = (std::sin(kPi * t * (1.0 - b)) + 4.0 * b * t * std::cos(kPi * t * (1.0 + b))) /
             (kPi * t * (1.0 - x * x));
    }
  }
  double energy = 0.0;
  for (double v : h) energy += v * v;
  for (double& v : h) v /= std::sqrt(energy);
  return h;
}

ModulatedFrame modulate_detailed(ModClass c, std::size_t seq_len, RandomEngine& rng) {
  if (seq_len < 2) fail(ErrorKind::kInvalidArgument, "modulate: seq_len must be at least 2");
  if (is_linear_digital(c)) return linear_digital(c, seq_len, rng);
  ModulatedFrame mf;
  if (c == ModClass::kCpfsk || c == ModClass::kGfsk) {
    mf.frame = to_unit_power_frame(fsk(seq_len, c == ModClass::kGfsk, rng));
  } else {
    mf.frame = to_unit_power_frame(analog(c, seq_len, rng));
  }
  return mf;
}

SignalFrame modulate(ModClass c, std::size_t seq_len, RandomEngine& rng) {
  return modulate_detailed(c, seq_len, rng).frame;
}

SignalFrame impair(const SignalFrame& frame, const ChannelConfig& ch, RandomEngine& rng) {
  if (!(std::abs(ch.cfo_fraction) < 0.5)) fail(ErrorKind::kInvalidArgument, "impair: |cfo| must be below 0.5");
  const std::size_t n = frame.size();
  std::vector<cd> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = cd(frame[t].i, frame[t].q);

  if (!ch.multipath_taps.empty()) {
    std::vector<cd> y(n);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t k = 0; k < ch.multipath_taps.size() && k <= t; ++k) y[t] += ch.multipath_taps[k] * x[t - k];
    }
    x = std::move(y);
  }
  if (ch.phase_offset != 0.0 || ch.cfo_fraction != 0.0) {
    for (std::size_t t = 0; t < n; ++t) {
      x[t] *= std::polar(1.0, ch.phase_offset + 2.0 * kPi * ch.cfo_fraction * static_cast<double>(t));
    }
  }
  if (ch.sro_ppm != 0.0 && n > 1) {
    const double ratio = 1.0 + ch.sro_ppm * 1e-6;
    std::vector<cd> y(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double pos = std::min(static_cast<double>(t) * ratio, static_cast<double>(n - 1));
      const auto k = std::min(static_cast<std::size_t>(pos), n - 2);
      const double frac = pos - static_cast<double>(k);
      y[t] = x[k] * (1.0 - frac) + x[k + 1] * frac;
    }
    x = std::move(y);
  }
  if (ch.add_noise) {
    double power = 0.0;
    for (const cd& v : x) power += std::norm(v);
    power /= static_cast<double>(n);
    const double component_sigma = std::sqrt(power * std::pow(10.0, -ch.snr_db / 10.0) / 2.0);
    std::normal_distribution<double> gauss(0.0, component_sigma);
    for (cd& v : x) {
      const double ni = gauss(rng);
      const double nq = gauss(rng);
      v += cd(ni, nq);
    }
  }
  SignalFrame out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = {static_cast<float>(x[t].real()), static_cast<float>(x[t].imag())};
  return out;
}

ChannelConfig draw_channel(int snr_db, const ImpairmentRanges& ranges, RandomEngine& rng) {
  ChannelConfig ch;
  ch.snr_db = snr_db;
  if (ranges.random_phase) {
    // (-pi, pi]
    ch.phase_offset = kPi - std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng);
  }
  if (ranges.cfo_max > 0.0) ch.cfo_fraction = std::uniform_real_distribution<double>(-ranges.cfo_max, ranges.cfo_max)(rng);
  if (ranges.sro_max_ppm > 0.0) {
    ch.sro_ppm = std::uniform_real_distribution<double>(-ranges.sro_max_ppm, ranges.sro_max_ppm)(rng);
  }
  if (ranges.multipath && ranges.multipath_taps > 0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double energy = 0.0;
    ch.multipath_taps.push_back(1.0);
    energy += 1.0;
    for (int k = 1; k < ranges.multipath_taps; ++k) {
      const double spread = std::pow(0.3, k) / std::sqrt(2.0);
      ch.multipath_taps.emplace_back(spread * gauss(rng), spread * gauss(rng));
      energy += std::norm(ch.multipath_taps.back());
    }
    for (cd& tap : ch.multipath_taps) tap /= std::sqrt(energy);
  }
  return ch;
}

std::vector<int> default_snr_grid() {
  std::vector<int> grid;
  for (int s = -20; s <= 18; s += 2) grid.push_back(s);
  return grid;
}

std::string GenConfig::describe() const {
  std::ostringstream os;
  os << "generator classes=";
  for (std::size_t k = 0; k < classes.size(); ++k) os << (k ? "," : "") << mod_class_name(classes[k]);
  os << " snr=";
  for (std::size_t k = 0; k < snr_grid.size(); ++k) os << (k ? "," : "") << snr_grid[k];
  os << " per_class_per_snr=" << frames_per_class_per_snr << " seq_len=" << seq_len << " seed=" << seed
     << " sps=" << kSamplesPerSymbol << " rrc_rolloff=" << kRrcRolloff << " rrc_span=" << kRrcSpanSymbols
     << " cpfsk_h=" << kCpfskIndex << " gfsk_bt=" << kGfskBt << " gfsk_h=" << kGfskIndex << " am_depth=" << kAmDepth
     << " wbfm_dev=" << kWbfmDeviation << " random_phase=" << (impairments.random_phase ? 1 : 0)
     << " cfo_max=" << impairments.cfo_max << " sro_max_ppm=" << impairments.sro_max_ppm
     << " multipath=" << (impairments.multipath ? impairments.multipath_taps : 0);
  return os.str();
}

Dataset generate_dataset(const GenConfig& cfg, int threads) {
  if (cfg.classes.empty()) fail(ErrorKind::kInvalidArgument, "generate_dataset: class list is empty");
  if (cfg.snr_grid.empty()) fail(ErrorKind::kInvalidArgument, "generate_dataset: SNR grid is empty");
  if (cfg.frames_per_class_per_snr == 0) fail(ErrorKind::kInvalidArgument, "generate_dataset: zero frames per class");
  if (cfg.seq_len < 2 || cfg.seq_len > 65535) fail(ErrorKind::kInvalidArgument, "generate_dataset: seq_len out of range");
  for (int snr : cfg.snr_grid) {
    if (snr < -128 || snr > 127) fail(ErrorKind::kInvalidArgument, "generate_dataset: SNR outside the i8 range");
  }
  if (!(std::abs(cfg.impairments.cfo_max) < 0.5)) fail(ErrorKind::kInvalidArgument, "generate_dataset: cfo_max must be below 0.5");

  std::vector<ModClass> classes = cfg.classes;
  std::sort(classes.begin(), classes.end());
  if (std::adjacent_find(classes.begin(), classes.end()) != classes.end()) {
    fail(ErrorKind::kInvalidArgument, "generate_dataset: duplicate class");
  }
  std::vector<int> snrs = cfg.snr_grid;
  std::sort(snrs.begin(), snrs.end());
  if (std::adjacent_find(snrs.begin(), snrs.end()) != snrs.end()) {
    fail(ErrorKind::kInvalidArgument, "generate_dataset: duplicate SNR");
  }

  Dataset ds;
  for (ModClass c : classes) ds.class_names.emplace_back(mod_class_name(c));
  ds.seq_len = cfg.seq_len;
  GenConfig canonical = cfg;
  canonical.classes = classes;
  ds.provenance = canonical.describe();

  const std::size_t per = cfg.frames_per_class_per_snr;
  const std::size_t per_class = per * cfg.snr_grid.size();
  ds.frames.resize(classes.size() * per_class);
  parallel_for(ds.frames.size(), threads, [&](std::size_t idx) {
    const std::size_t label = idx / per_class;
    const std::size_t snr_slot = (idx % per_class) / per;
    const std::size_t n = idx % per;
    const ModClass c = classes[label];
    const int snr = cfg.snr_grid[snr_slot];
    RandomEngine rng = make_engine(cfg.seed, {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(snr + 128), n});
    const ChannelConfig ch = draw_channel(snr, cfg.impairments, rng);
    SignalFrame clean = modulate(c, cfg.seq_len, rng);
    ds.frames[idx] = {impair(clean, ch, rng), static_cast<std::uint8_t>(label), static_cast<std::int8_t>(snr)};
  });
  return ds;
}

}  // namespace iqaug
