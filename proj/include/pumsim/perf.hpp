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
#include <string_view>

#include "pumsim/config.hpp"
#include "pumsim/dram.hpp"

namespace pumsim {

/// Column-command beats for `cols`: one per cacheline burst, rounded up.
std::uint64_t column_beats(ColumnRange cols, const DramGeometry& geometry);

/// Serial latency of `trace` divided by `active_banks`.
///
/// ACT tRAS, PRE tRP, AAP 2 tRAS + tRP, AP tRAS + tRP, RD/WR/RDX/XFER tCCD per
/// beat, CHIP_RD/CHIP_WR tCCD.
double latency_of(const CommandTrace& trace, const TimingParams& timing, const DramGeometry& geometry,
                  std::uint32_t active_banks = 1);

/// RD/WR/RDX and chip accesses move their bits over the channel; XFER stays on
/// the internal bus.
double energy_of(const CommandTrace& trace, const EnergyParams& energy, const DramGeometry& geometry);

enum class BaselineOp : std::uint8_t { Copy, Bitwise, Not, Init };

std::string_view to_string(BaselineOp op) noexcept;
/// Times `bytes` cross the channel: COPY 2, BITWISE 3, NOT 2, INIT 1.
std::uint32_t channel_crossings(BaselineOp op) noexcept;

struct Cost {
  double ns = 0.0;
  double pj = 0.0;
};

/// Processor-centric cost: fixed latency plus channel beats, channel energy
/// plus one e_cpu_op per 64-bit word. bytes must be > 0.
Cost baseline_cost(BaselineOp op, std::uint64_t bytes, const BaselineModel& baseline, const TimingParams& timing,
                   const EnergyParams& energy);

}  // namespace pumsim
