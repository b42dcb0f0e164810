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

#include "pumsim/gsdram.hpp"

#include <bit>
#include <map>

#include "pumsim/error.hpp"

namespace pumsim::gsdram {

std::uint32_t log2_chips(std::uint32_t chips) {
  if (chips == 0 || !std::has_single_bit(chips))
    fail(ErrorCode::InvalidGeometry, "chip count " + std::to_string(chips) + " is not a power of two");
  return static_cast<std::uint32_t>(std::countr_zero(chips));
}

std::uint32_t shuffle_map(std::uint32_t value_index, std::uint64_t cacheline, std::uint32_t chips) {
  log2_chips(chips);
  if (value_index >= chips) fail(ErrorCode::OutOfRange, "value index outside the cacheline");
  return value_index ^ static_cast<std::uint32_t>(cacheline & (chips - 1));
}

void check_pattern(PatternId pattern, std::uint32_t chips) {
  if (pattern.p > log2_chips(chips))
    fail(ErrorCode::UnsupportedPattern, "pattern " + std::to_string(pattern.p) + " needs stride <= chips");
}

bool is_legal_base(PatternId pattern, std::uint64_t base, std::uint32_t chips) {
  check_pattern(pattern, chips);
  const std::uint64_t stride = pattern.stride();
  return base % (std::uint64_t{chips} * stride) < stride;
}

namespace {

// Index k of the strided element stored on `chip`, or chips when none is.
std::uint32_t find_lane(std::uint32_t chip, PatternId pattern, std::uint64_t base, std::uint32_t chips) {
  if (!is_legal_base(pattern, base, chips))
    fail(ErrorCode::MisalignedBase, "base " + std::to_string(base) + " is not aligned for pattern " +
                                        std::to_string(pattern.p));
  if (chip >= chips) fail(ErrorCode::OutOfRange, "chip " + std::to_string(chip));
  for (std::uint32_t k = 0; k < chips; ++k) {
    const std::uint64_t e = base + std::uint64_t{k} * pattern.stride();
    if (shuffle_map(static_cast<std::uint32_t>(e % chips), e / chips, chips) == chip) return k;
  }
  fail(ErrorCode::Internal, "aligned strided set does not cover every chip");
}

}  // namespace

std::uint64_t ctl_column(std::uint32_t chip, PatternId pattern, std::uint64_t base, std::uint32_t chips) {
  const std::uint32_t k = find_lane(chip, pattern, base, chips);
  return (base + std::uint64_t{k} * pattern.stride()) / chips;
}

std::uint32_t ctl_lane(std::uint32_t chip, PatternId pattern, std::uint64_t base, std::uint32_t chips) {
  return find_lane(chip, pattern, base, chips);
}

namespace {

std::uint32_t checked_element_bits(const DramGeometry& g) {
  log2_chips(g.chips_per_rank);
  if (g.columns_per_row % g.cacheline_bits != 0)
    fail(ErrorCode::InvalidGeometry, "rows must hold whole cachelines");
  if (g.element_bits() > 64) fail(ErrorCode::InvalidGeometry, "elements wider than 64 bits");
  return g.element_bits();
}

void check_span(const DramDevice& d, std::uint32_t first_row, std::uint64_t elements, std::uint64_t per_row) {
  const std::uint64_t rows = (elements + per_row - 1) / per_row;
  if (elements == 0) fail(ErrorCode::InvalidArgument, "empty array");
  if (first_row + rows > d.data_rows()) fail(ErrorCode::OutOfRange, "array does not fit in the data rows");
}

std::uint64_t mask_of(std::uint32_t bits) { return bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1; }

BitRow element_bits_of(std::uint64_t v, std::uint32_t bits) {
  BitRow r(bits);
  for (std::uint32_t b = 0; b < bits; ++b) r.set(b, (v >> b) & 1u);
  return r;
}

std::uint64_t value_of(const BitRow& r, std::size_t offset, std::uint32_t bits) {
  std::uint64_t v = 0;
  for (std::uint32_t b = 0; b < bits; ++b) v |= std::uint64_t{r.get(offset + b)} << b;
  return v;
}

}  // namespace

GsRank::GsRank(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, std::uint32_t first_row,
               std::uint64_t elements)
    : device_(&device), bank_(bank), subarray_(subarray), first_row_(first_row), elements_(elements) {
  const auto& g = device.geometry();
  element_bits_ = checked_element_bits(g);
  chips_ = g.chips_per_rank;
  elements_per_row_ = std::uint64_t{g.columns_per_row / g.cacheline_bits} * chips_;
  check_span(device, first_row, elements, elements_per_row_);
}

void GsRank::store(std::span<const std::uint64_t> values) {
  if (values.size() != elements_) fail(ErrorCode::InvalidArgument, "value count does not match the array");
  const auto& g = device_->geometry();
  const std::uint64_t mask = mask_of(element_bits_);
  for (std::uint64_t start = 0; start < elements_; start += elements_per_row_) {
    const std::uint64_t n = std::min(elements_per_row_, elements_ - start);
    const std::uint64_t lines = (n + chips_ - 1) / chips_;
    const std::uint32_t row = first_row_ + static_cast<std::uint32_t>(start / elements_per_row_);
    const std::uint64_t global_line0 = std::uint64_t{row} * (g.columns_per_row / g.cacheline_bits);
    BitRow bits(lines * g.cacheline_bits);
    for (std::uint64_t j = 0; j < n; ++j) {
      const std::uint64_t slot = j / chips_;
      const auto chip = shuffle_map(static_cast<std::uint32_t>(j % chips_), global_line0 + slot, chips_);
      if (values[start + j] & ~mask) fail(ErrorCode::InvalidArgument, "value wider than an element");
      bits.assign(slot * g.cacheline_bits + std::uint64_t{chip} * element_bits_,
                  element_bits_of(values[start + j], element_bits_));
    }
    device_->activate({bank_, subarray_, row});
    device_->write_buffer(bank_, {0, static_cast<std::uint32_t>(bits.size())}, bits);
    device_->precharge(bank_);
  }
}

std::uint32_t GsRank::row_of(PatternId pattern, std::uint64_t base) const {
  check_pattern(pattern, chips_);
  if (base + (chips_ - 1) * pattern.stride() >= elements_)
    fail(ErrorCode::OutOfRange, "strided set runs past the end of the array");
  const std::uint64_t global = std::uint64_t{first_row_} * elements_per_row_ + base;
  const std::uint64_t row = global / elements_per_row_;
  const std::uint64_t per_row = elements_per_row_ / chips_;
  for (std::uint32_t x = 0; x < chips_; ++x)
    if (ctl_column(x, pattern, global, chips_) / per_row != row)
      fail(ErrorCode::RowSpan, "strided set crosses the per-chip row boundary");
  return static_cast<std::uint32_t>(row);
}

std::vector<std::uint64_t> GsRank::gather(PatternId pattern, std::uint64_t base) {
  const std::uint32_t row = row_of(pattern, base);
  const std::uint64_t global = std::uint64_t{first_row_} * elements_per_row_ + base;
  const auto in_row = static_cast<std::uint32_t>(global - std::uint64_t{row} * elements_per_row_);
  device_->activate({bank_, subarray_, row});
  const BitRow chip_order = device_->chip_read(bank_, pattern.p, in_row);
  device_->precharge(bank_);
  std::vector<std::uint64_t> out(chips_);
  for (std::uint32_t x = 0; x < chips_; ++x)
    out[ctl_lane(x, pattern, global, chips_)] = value_of(chip_order, std::size_t{x} * element_bits_, element_bits_);
  return out;
}

void GsRank::scatter(PatternId pattern, std::uint64_t base, std::span<const std::uint64_t> values) {
  if (values.size() != chips_) fail(ErrorCode::InvalidArgument, "scatter takes one value per chip");
  const std::uint32_t row = row_of(pattern, base);
  const std::uint64_t global = std::uint64_t{first_row_} * elements_per_row_ + base;
  const auto in_row = static_cast<std::uint32_t>(global - std::uint64_t{row} * elements_per_row_);
  const std::uint64_t mask = mask_of(element_bits_);
  BitRow chip_order(std::size_t{chips_} * element_bits_);
  for (std::uint32_t x = 0; x < chips_; ++x) {
    const std::uint64_t v = values[ctl_lane(x, pattern, global, chips_)];
    if (v & ~mask) fail(ErrorCode::InvalidArgument, "value wider than an element");
    chip_order.assign(std::size_t{x} * element_bits_, element_bits_of(v, element_bits_));
  }
  device_->activate({bank_, subarray_, row});
  device_->chip_write(bank_, pattern.p, in_row, chip_order);
  device_->precharge(bank_);
}

LinearLayout::LinearLayout(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, std::uint32_t first_row,
                           std::uint64_t elements)
    : device_(&device), bank_(bank), subarray_(subarray), first_row_(first_row), elements_(elements) {
  const auto& g = device.geometry();
  element_bits_ = checked_element_bits(g);
  chips_ = g.chips_per_rank;
  elements_per_row_ = std::uint64_t{g.columns_per_row / g.cacheline_bits} * chips_;
  check_span(device, first_row, elements, elements_per_row_);
}

void LinearLayout::store(std::span<const std::uint64_t> values) {
  if (values.size() != elements_) fail(ErrorCode::InvalidArgument, "value count does not match the array");
  const std::uint64_t mask = mask_of(element_bits_);
  for (std::uint64_t start = 0; start < elements_; start += elements_per_row_) {
    const std::uint64_t n = std::min(elements_per_row_, elements_ - start);
    BitRow bits(n * element_bits_);
    for (std::uint64_t j = 0; j < n; ++j) {
      if (values[start + j] & ~mask) fail(ErrorCode::InvalidArgument, "value wider than an element");
      bits.assign(j * element_bits_, element_bits_of(values[start + j], element_bits_));
    }
    const std::uint32_t row = first_row_ + static_cast<std::uint32_t>(start / elements_per_row_);
    device_->activate({bank_, subarray_, row});
    device_->write_buffer(bank_, {0, static_cast<std::uint32_t>(bits.size())}, bits);
    device_->precharge(bank_);
  }
}

std::vector<std::uint64_t> LinearLayout::strided_read(PatternId pattern, std::uint64_t base) {
  check_pattern(pattern, chips_);
  if (base + (chips_ - 1) * pattern.stride() >= elements_)
    fail(ErrorCode::OutOfRange, "strided set runs past the end of the array");
  const std::uint32_t cl_bits = device_->geometry().cacheline_bits;
  // row -> (cacheline slot -> fetched bits)
  std::map<std::uint32_t, std::map<std::uint64_t, BitRow>> lines;
  for (std::uint32_t k = 0; k < chips_; ++k) {
    const std::uint64_t e = base + std::uint64_t{k} * pattern.stride();
    lines[static_cast<std::uint32_t>(e / elements_per_row_)][(e % elements_per_row_) / chips_];
  }
  for (auto& [row, slots] : lines) {
    device_->activate({bank_, subarray_, first_row_ + row});
    for (auto& [slot, bits] : slots) {
      const auto b = static_cast<std::uint32_t>(slot * cl_bits);
      bits = device_->read_buffer(bank_, {b, b + cl_bits});
    }
    device_->precharge(bank_);
  }
  std::vector<std::uint64_t> out(chips_);
  for (std::uint32_t k = 0; k < chips_; ++k) {
    const std::uint64_t e = base + std::uint64_t{k} * pattern.stride();
    const BitRow& bits = lines[static_cast<std::uint32_t>(e / elements_per_row_)][(e % elements_per_row_) / chips_];
    out[k] = value_of(bits, (e % chips_) * element_bits_, element_bits_);
  }
  return out;
}

}  // namespace pumsim::gsdram
