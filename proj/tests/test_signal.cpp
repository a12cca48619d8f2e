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
#include <limits>
#include <numbers>

#include "iqaug/augment.hpp"
#include "iqaug/error.hpp"
#include "iqaug/rsig.hpp"
#include "iqaug/signal.hpp"
#include "test_util.hpp"

using namespace iqaug;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an iqaug::Error");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("to_features closed form") {
  // atan2(4, 3) to 20 digits: 0.92729521800161223243
  constexpr double kAtan43 = 0.92729521800161223243;
  const FeatureFrame f = to_features(SignalFrame({{3.0f, 4.0f}, {1.0f, 0.0f}, {0.0f, 0.0f}}));
  REQUIRE(f.size() == 3);
  CHECK(f.amplitude[0] == 5.0f);
  CHECK(f.phase[0] == doctest::Approx(kAtan43 / std::numbers::pi).epsilon(1e-6));
  CHECK(f.amplitude[1] == 1.0f);
  CHECK(f.phase[1] == 0.0f);
  CHECK(f.amplitude[2] == 0.0f);
  CHECK(f.phase[2] == 0.0f);
}

TEST_CASE("phase range is (-pi, pi]") {
  CHECK(iq_phase(-1.0, 0.0) == std::numbers::pi);
  CHECK(iq_phase(-1.0, -0.0) == std::numbers::pi);
  CHECK(iq_phase(0.0, -1.0) == doctest::Approx(-std::numbers::pi / 2));
  CHECK(iq_phase(-0.0, -0.0) == 0.0);
}

TEST_CASE("to_features rejects non-finite and empty input") {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  CHECK(kind_of([&] { to_features(SignalFrame({{1.0f, nan}})); }) == ErrorKind::kInvalidInput);
  CHECK(kind_of([&] { to_features(SignalFrame({{std::numeric_limits<float>::infinity(), 0.0f}})); }) ==
        ErrorKind::kInvalidInput);
  CHECK(kind_of([] { to_features(SignalFrame()); }) == ErrorKind::kInvalidInput);
}

TEST_CASE("to_features preserves length and amplitude under quarter turns") {
  RandomEngine rng(11);
  for (std::size_t len : {1u, 2u, 7u, 64u, 128u}) {
    const SignalFrame frame = test::random_frame(len, rng);
    const FeatureFrame base = to_features(frame);
    CHECK(base.size() == len);
    for (int k = 0; k < 4; ++k) {
      const FeatureFrame rotated = to_features(apply_transform(frame, RotateQuarter{k}));
      CHECK(rotated.amplitude == base.amplitude);
    }
    for (float a : base.amplitude) CHECK(a >= 0.0f);
  }
}

TEST_CASE("halve_frame splits exactly") {
  RandomEngine rng(3);
  const SignalFrame frame = test::random_frame(128, rng);
  const auto [first, second] = halve_frame(frame);
  REQUIRE(first.size() == 64);
  REQUIRE(second.size() == 64);
  std::vector<IQSample> joined(first.begin(), first.end());
  joined.insert(joined.end(), second.begin(), second.end());
  CHECK(SignalFrame(joined) == frame);

  const auto [a, b] = halve_frame(SignalFrame({{1.0f, 2.0f}, {3.0f, 4.0f}}));
  CHECK(a == SignalFrame({{1.0f, 2.0f}}));
  CHECK(b == SignalFrame({{3.0f, 4.0f}}));

  CHECK(kind_of([&] { halve_frame(test::random_frame(5, rng)); }) == ErrorKind::kInvalidInput);
}

TEST_CASE("halve_dataset doubles the record count") {
  Dataset ds = test::tiny_dataset(3, {0, 10}, 4, 128, 9);
  const Dataset halves = halve_dataset(ds);
  CHECK(halves.size() == 2 * ds.size());
  CHECK(halves.seq_len == 64);
  CHECK(halves.frames[3].label == ds.frames[1].label);
  CHECK(halves.frames[3].snr_db == ds.frames[1].snr_db);
  CHECK(halves.frames[3].frame == halve_frame(ds.frames[1].frame).second);
}

TEST_CASE("normalize_frame") {
  SUBCASE("constant frame") {
    const SignalFrame out = normalize_frame(SignalFrame(std::vector<IQSample>(16, {2.0f, 0.0f})));
    for (const IQSample& s : out) {
      CHECK(s.i == 1.0f);
      CHECK(s.q == 0.0f);
    }
  }
  SUBCASE("unit RMS, idempotent, scale-equivariant") {
    RandomEngine rng(21);
    for (int trial = 0; trial < 20; ++trial) {
      const SignalFrame frame = test::random_frame(128, rng);
      const SignalFrame once = normalize_frame(frame);
      CHECK(std::sqrt(mean_power(once)) == doctest::Approx(1.0).epsilon(1e-6));
      const SignalFrame twice = normalize_frame(once);
      const double c = std::uniform_real_distribution<double>(0.01, 100.0)(rng);
      SignalFrame scaled(frame.size());
      for (std::size_t t = 0; t < frame.size(); ++t) {
        scaled[t] = {static_cast<float>(frame[t].i * c), static_cast<float>(frame[t].q * c)};
      }
      const SignalFrame from_scaled = normalize_frame(scaled);
      for (std::size_t t = 0; t < frame.size(); ++t) {
        CHECK(twice[t].i == doctest::Approx(once[t].i).epsilon(1e-6).scale(1.0));
        CHECK(twice[t].q == doctest::Approx(once[t].q).epsilon(1e-6).scale(1.0));
        CHECK(from_scaled[t].i == doctest::Approx(once[t].i).epsilon(1e-6).scale(1.0));
        CHECK(from_scaled[t].q == doctest::Approx(once[t].q).epsilon(1e-6).scale(1.0));
      }
    }
  }
  SUBCASE("zero energy") {
    CHECK(kind_of([] { normalize_frame(SignalFrame(8)); }) == ErrorKind::kDegenerateInput);
  }
}

TEST_CASE("dataset validation") {
  Dataset ds = test::tiny_dataset(2, {0}, 2, 8, 1);
  CHECK_NOTHROW(ds.validate());
  ds.frames[1].label = 2;
  CHECK(kind_of([&] { ds.validate(); }) == ErrorKind::kInvalidInput);
  ds.frames[1].label = 1;
  ds.frames[0].frame = SignalFrame(7);
  CHECK(kind_of([&] { ds.validate(); }) == ErrorKind::kInvalidInput);
}

TEST_CASE("RSIG layout") {
  Dataset ds;
  ds.class_names = {"A", "BC"};
  ds.seq_len = 2;
  ds.frames.push_back({SignalFrame({{1.0f, -2.0f}, {0.5f, 0.0f}}), 1, -20});
  const std::vector<std::uint8_t> bytes = encode_rsig(ds);
  const std::vector<std::uint8_t> expected = {
      'R', 'S', 'I', 'G', 1, 0, 0, 0,  // magic, version
      1, 0, 0, 0,                      // frame count
      2, 0,                            // seq_len
      2, 0,                            // class count, reserved
      1, 'A', 2, 'B', 'C',             // class names
      1, 0xEC,                         // label 1, snr -20
      0x00, 0x00, 0x80, 0x3F,          // 1.0f
      0x00, 0x00, 0x00, 0xC0,          // -2.0f
      0x00, 0x00, 0x00, 0x3F,          // 0.5f
      0x00, 0x00, 0x00, 0x00,          // 0.0f
  };
  CHECK(bytes == expected);
  const Dataset back = decode_rsig(bytes);
  CHECK(back.frames == ds.frames);
  CHECK(back.class_names == ds.class_names);
  CHECK(back.seq_len == ds.seq_len);
}

TEST_CASE("RSIG round trip and byte-identical re-encoding") {
  const Dataset ds = test::tiny_dataset(3, {-20, 0, 18}, 3, 16, 5);
  const auto bytes = encode_rsig(ds);
  const Dataset back = decode_rsig(bytes);
  CHECK(back.frames == ds.frames);
  CHECK(encode_rsig(back) == bytes);
}

TEST_CASE("RSIG rejects malformed input") {
  const Dataset ds = test::tiny_dataset(2, {0}, 1, 4, 5);
  auto bytes = encode_rsig(ds);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(kind_of([&] { decode_rsig(bad_magic); }) == ErrorKind::kFormat);
  auto bad_version = bytes;
  bad_version[4] = 2;
  CHECK(kind_of([&] { decode_rsig(bad_version); }) == ErrorKind::kFormat);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK(kind_of([&] { decode_rsig(truncated); }) == ErrorKind::kFormat);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK(kind_of([&] { decode_rsig(trailing); }) == ErrorKind::kFormat);
}
