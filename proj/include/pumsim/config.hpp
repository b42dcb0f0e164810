/*
 * Copyright 2026 The pumsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pumsim {

struct DramGeometry {
  std::uint32_t banks_per_device = 8;
  std::uint32_t subarrays_per_bank = 8;
  std::uint32_t rows_per_subarray = 512;
  std::uint32_t columns_per_row = 32768;
  std::uint32_t chips_per_rank = 8;
  std::uint32_t cacheline_bits = 512;

  std::uint32_t element_bits() const { return cacheline_bits / chips_per_rank; }
  std::uint32_t row_bytes() const { return columns_per_row / 8; }

  friend bool operator==(const DramGeometry&, const DramGeometry&) = default;
};

/// Rows reserved at the top of every subarray for in-DRAM compute.
///
/// Order from the region base: TRA-capable rows T0.., dual-contact rows D0..,
/// control rows C0 (zeros) and C1 (ones), then spill rows S0...
struct ComputeLayout {
  std::uint32_t tra_rows = 4;
  std::uint32_t dcc_rows = 2;
  std::uint32_t spill_rows = 8;

  static constexpr std::uint32_t control_rows = 2;

  std::uint32_t region_rows() const { return tra_rows + dcc_rows + control_rows + spill_rows; }

  friend bool operator==(const ComputeLayout&, const ComputeLayout&) = default;
};

/// Nanoseconds.
struct TimingParams {
  double tRCD = 13.75;
  double tRAS = 35.0;
  double tRP = 13.75;
  double tCCD = 5.0;
  double bus_beat_time = 0.625;

  friend bool operator==(const TimingParams&, const TimingParams&) = default;
};

/// Picojoules.
struct EnergyParams {
  double e_act = 16000.0;
  double e_pre = 8000.0;
  double e_internal_beat = 500.0;
  double e_bus_bit = 40.0;
  double e_cpu_op = 700.0;

  friend bool operator==(const EnergyParams&, const EnergyParams&) = default;
};

struct BaselineModel {
  std::uint32_t channel_bits_per_beat = 64;
  double fixed_latency = 330.0;  // ns per bulk operation

  friend bool operator==(const BaselineModel&, const BaselineModel&) = default;
};

struct ClassFractions {
  double strong = 0.90;
  double det = 0.05;
  double trng = 0.05;

  friend bool operator==(const ClassFractions&, const ClassFractions&) = default;
};

struct SecurityParams {
  ClassFractions fractions;
  std::uint32_t puf_reads = 32;

  friend bool operator==(const SecurityParams&, const SecurityParams&) = default;
};

struct Config {
  std::uint64_t seed = 1;
  bool quac_row_decoder = true;
  DramGeometry geometry;
  ComputeLayout compute;
  TimingParams timing;
  EnergyParams energy;
  BaselineModel baseline;
  SecurityParams security;

  /// Throws ConfigError / InvalidGeometry on any violated invariant.
  void validate() const;

  /// Canonical INI text; parse_config(to_ini()) reproduces *this.
  std::string to_ini() const;
  /// FNV-1a over to_ini(), as 16 hex digits.
  std::string digest() const;

  friend bool operator==(const Config&, const Config&) = default;
};

void validate(const DramGeometry& g, const ComputeLayout& layout);

/// Keys absent from the text keep their defaults. Unknown sections or keys are errors.
Config parse_config(std::string_view ini_text);
Config load_config(const std::string& path);

}  // namespace pumsim
