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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pumsim/config.hpp"
#include "pumsim/dram.hpp"
#include "pumsim/perf.hpp"

namespace pumsim {

struct BenchOptions {
  std::uint32_t width = 16;   // vector-* element bits
  std::uint32_t banks = 1;    // rows are spread round-robin over this many banks
  std::uint32_t stride = 2;   // strided-gather, elements between gathered values
  /// Flips one expected bit before checking; the run must then fail.
  bool corrupt_oracle = false;
};

/// Outcome of one benchmark run.
///
/// `size` is bytes for bulk-*, lanes for vector-*, elements for strided-gather
/// and output bits for trng-*.
struct Report {
  std::string benchmark;
  std::uint64_t size = 0;
  std::string size_unit;
  BenchOptions options;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::uint32_t active_banks = 1;

  Cost pum;
  std::vector<std::pair<std::string, std::uint64_t>> pum_commands;  // mnemonic -> count, measured slice only
  std::uint64_t pum_dram_commands = 0;

  std::optional<Cost> baseline;
  std::uint64_t baseline_commands = 0;  // cacheline reads for strided-gather, else 0

  bool correct = false;
  std::vector<std::pair<std::string, double>> extra;

  /// Every command the device executed, setup included.
  CommandTrace trace;
  std::size_t measured_begin = 0, measured_end = 0;
  /// DramDevice::state_digest() after the run.
  std::uint64_t state_digest = 0;

  std::optional<double> latency_ratio() const;
  std::optional<double> energy_ratio() const;

  /// One JSON object on a single line.
  std::string to_json() const;
  std::string to_table() const;
};

const std::vector<std::string>& benchmark_names();

/// "4096", "4K", "4KiB", "1M", "2MiB"; K/M/G are powers of 1024.
std::uint64_t parse_size(std::string_view text);

/// Runs the named workload on a fresh device built from `config`.
/// Throws UnknownBenchmark, CorrectnessMismatch, OutOfRange when the workload does
/// not fit the device.
Report run_benchmark(std::string_view name, std::uint64_t size, const Config& config, const BenchOptions& options = {});

}  // namespace pumsim
