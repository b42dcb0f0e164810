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

#include "pumsim/perf.hpp"

#include <variant>

#include "pumsim/error.hpp"

namespace pumsim {

namespace {

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

}  // namespace

std::uint64_t column_beats(ColumnRange cols, const DramGeometry& geometry) {
  const std::uint64_t w = cols.end > cols.begin ? cols.end - cols.begin : 0;
  return (w + geometry.cacheline_bits - 1) / geometry.cacheline_bits;
}

double latency_of(const CommandTrace& trace, const TimingParams& t, const DramGeometry& g,
                  std::uint32_t active_banks) {
  double sum = 0.0;
  for (const Command& c : trace.entries()) {
    sum += std::visit(overloaded{
                          [&](const cmd::Act&) { return t.tRAS; },
                          [&](const cmd::Pre&) { return t.tRP; },
                          [&](const cmd::Aap&) { return 2 * t.tRAS + t.tRP; },
                          [&](const cmd::Ap&) { return t.tRAS + t.tRP; },
                          [&](const cmd::Rd& x) { return column_beats(x.cols, g) * t.tCCD; },
                          [&](const cmd::Wr& x) { return column_beats(x.cols, g) * t.tCCD; },
                          [&](const cmd::Xfer& x) { return column_beats(x.cols, g) * t.tCCD; },
                          [&](const cmd::Rdx& x) { return column_beats(x.cols, g) * t.tCCD; },
                          [&](const cmd::ChipRd&) { return t.tCCD; },
                          [&](const cmd::ChipWr&) { return t.tCCD; },
                      },
                      c);
  }
  return sum / (active_banks == 0 ? 1 : active_banks);
}

double energy_of(const CommandTrace& trace, const EnergyParams& e, const DramGeometry& g) {
  auto io = [&](ColumnRange cols) {
    return column_beats(cols, g) * e.e_internal_beat + double(cols.end - cols.begin) * e.e_bus_bit;
  };
  const double chip = e.e_internal_beat + double(g.cacheline_bits) * e.e_bus_bit;
  double sum = 0.0;
  for (const Command& c : trace.entries()) {
    sum += std::visit(overloaded{
                          [&](const cmd::Act&) { return e.e_act; },
                          [&](const cmd::Pre&) { return e.e_pre; },
                          [&](const cmd::Aap&) { return 2 * e.e_act + e.e_pre; },
                          [&](const cmd::Ap&) { return e.e_act + e.e_pre; },
                          [&](const cmd::Rd& x) { return io(x.cols); },
                          [&](const cmd::Wr& x) { return io(x.cols); },
                          [&](const cmd::Rdx& x) { return io(x.cols); },
                          [&](const cmd::Xfer& x) { return column_beats(x.cols, g) * e.e_internal_beat; },
                          [&](const cmd::ChipRd&) { return chip; },
                          [&](const cmd::ChipWr&) { return chip; },
                      },
                      c);
  }
  return sum;
}

std::string_view to_string(BaselineOp op) noexcept {
  switch (op) {
    case BaselineOp::Copy: return "COPY";
    case BaselineOp::Bitwise: return "BITWISE";
    case BaselineOp::Not: return "NOT";
    case BaselineOp::Init: return "INIT";
  }
  return "?";
}

std::uint32_t channel_crossings(BaselineOp op) noexcept {
  switch (op) {
    case BaselineOp::Copy: return 2;
    case BaselineOp::Bitwise: return 3;
    case BaselineOp::Not: return 2;
    case BaselineOp::Init: return 1;
  }
  return 0;
}

Cost baseline_cost(BaselineOp op, std::uint64_t bytes, const BaselineModel& b, const TimingParams& t,
                   const EnergyParams& e) {
  if (bytes == 0) fail(ErrorCode::InvalidArgument, "baseline cost of zero bytes");
  if (b.channel_bits_per_beat == 0) fail(ErrorCode::ConfigError, "channel_bits_per_beat must be > 0");
  const double bits = double(bytes) * 8.0 * channel_crossings(op);
  const std::uint64_t beats = (std::uint64_t(bits) + b.channel_bits_per_beat - 1) / b.channel_bits_per_beat;
  const std::uint64_t words = (bytes + 7) / 8;
  return {b.fixed_latency + double(beats) * t.bus_beat_time, bits * e.e_bus_bit + double(words) * e.e_cpu_op};
}

}  // namespace pumsim
