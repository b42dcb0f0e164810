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
#include <span>
#include <vector>

#include "pumsim/dram.hpp"

namespace pumsim::gsdram {

/// Strided access pattern: stride 2^p elements, 0 <= p <= log2(chips).
struct PatternId {
  std::uint32_t p = 0;

  std::uint64_t stride() const { return std::uint64_t{1} << p; }
  friend bool operator==(const PatternId&, const PatternId&) = default;
};

std::uint32_t log2_chips(std::uint32_t chips);

/// Chip that stores value `value_index` of cacheline `cacheline`:
/// value_index XOR (cacheline mod chips). Bijective in value_index.
std::uint32_t shuffle_map(std::uint32_t value_index, std::uint64_t cacheline, std::uint32_t chips);

/// Throws UnsupportedPattern if p > log2(chips).
void check_pattern(PatternId pattern, std::uint32_t chips);

/// A base is legal when base mod (chips * 2^p) < 2^p; then the chips elements
/// base + k * 2^p land on pairwise distinct chips.
bool is_legal_base(PatternId pattern, std::uint64_t base, std::uint32_t chips);

/// Column translation: the cacheline whose slot on `chip` holds the element of
/// {base + k * 2^p} that the shuffle placed there. `base` is a global element index.
std::uint64_t ctl_column(std::uint32_t chip, PatternId pattern, std::uint64_t base, std::uint32_t chips);

/// Position k (in the strided set) of the element that `chip` returns.
std::uint32_t ctl_lane(std::uint32_t chip, PatternId pattern, std::uint64_t base, std::uint32_t chips);

/// A linear array of fixed-width elements laid out with the chip shuffle over
/// consecutive rows of one subarray, starting at `first_row`.
class GsRank {
 public:
  GsRank(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, std::uint32_t first_row,
         std::uint64_t elements);

  std::uint32_t chips() const noexcept { return chips_; }
  std::uint32_t element_bits() const noexcept { return element_bits_; }
  std::uint64_t elements() const noexcept { return elements_; }
  std::uint64_t elements_per_row() const noexcept { return elements_per_row_; }

  /// Writes the whole array with ordinary (pattern 0) cacheline writes.
  void store(std::span<const std::uint64_t> values);
  /// {A[base + k * 2^p] : k = 0..chips-1} in k order, using one CHIP_RD.
  std::vector<std::uint64_t> gather(PatternId pattern, std::uint64_t base);
  /// Inverse of gather, using one CHIP_WR.
  void scatter(PatternId pattern, std::uint64_t base, std::span<const std::uint64_t> values);

 private:
  std::uint32_t row_of(PatternId pattern, std::uint64_t base) const;

  DramDevice* device_;
  std::uint32_t bank_, subarray_, first_row_;
  std::uint64_t elements_;
  std::uint32_t chips_, element_bits_;
  std::uint64_t elements_per_row_;
};

/// Processor-centric comparator: the same array without shuffling; a strided
/// read fetches every distinct cacheline the pattern touches with one RD each.
class LinearLayout {
 public:
  LinearLayout(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, std::uint32_t first_row,
               std::uint64_t elements);

  void store(std::span<const std::uint64_t> values);
  std::vector<std::uint64_t> strided_read(PatternId pattern, std::uint64_t base);

 private:
  DramDevice* device_;
  std::uint32_t bank_, subarray_, first_row_;
  std::uint64_t elements_;
  std::uint32_t chips_, element_bits_;
  std::uint64_t elements_per_row_;
};

}  // namespace pumsim::gsdram
