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

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "pumsim/config.hpp"
#include "pumsim/dram.hpp"

namespace pumsim {

/// Per-cell behaviour under violated timing, a pure function of (seed, coordinates).
class CellReliabilityProfile final : public CellClassifier {
 public:
  /// Throws BadFractions unless every fraction is in [0,1] and they sum to 1.
  CellReliabilityProfile(std::uint64_t seed, const DramGeometry& geometry, const ClassFractions& fractions);

  CellClass classify(const RowAddress& addr, std::uint32_t column) const override;

  std::uint64_t seed() const noexcept { return seed_; }
  const DramGeometry& geometry() const noexcept { return geometry_; }
  const ClassFractions& fractions() const noexcept { return fractions_; }

 private:
  std::uint64_t seed_;
  DramGeometry geometry_;
  ClassFractions fractions_;
};

std::shared_ptr<const CellReliabilityProfile> profile_device(std::uint64_t seed, const DramGeometry& geometry,
                                                             const ClassFractions& fractions);

/// Reduced-timing read of the open row `addr`. Attaches `profile` to the device.
/// Throws RowClosed, RowMismatch.
BitRow read_reduced(DramDevice& device, const std::shared_ptr<const CellReliabilityProfile>& profile,
                    const RowAddress& addr, ColumnRange cols, ReducedTiming timing);

struct PufRegion {
  std::uint32_t bank = 0;
  std::uint32_t subarray = 0;
  std::uint32_t first_row = 0;
  std::uint32_t rows = 2;
};

struct PufResponse {
  PufRegion region;
  BitRow bitmap;  // row-major over the region; 1 = failed in every read

  std::string to_hex() const { return bitmap.to_hex(); }
};

/// Pattern written to row `row` before a PUF evaluation: a checkerboard, 1 where row + column is even.
BitRow puf_pattern(std::uint32_t row, std::uint32_t columns);

/// Writes the pattern, performs `reads` reduced-latency reads per row and keeps
/// the cells that failed in all of them. Throws EmptyRegion, OutOfRange.
PufResponse puf_evaluate(DramDevice& device, const std::shared_ptr<const CellReliabilityProfile>& profile,
                         const PufRegion& region, std::uint32_t reads);

/// Fraction of differing bits; throws InvalidArgument on size mismatch.
double normalized_hamming(const BitRow& a, const BitRow& b);

struct DrangeSource {
  std::uint32_t bank = 0;
  std::uint32_t subarray = 0;
};

/// n_bits from reduced-tRCD reads of the first data row holding TRNG cells,
/// taking those cells in column order. Throws NoTrngCells.
BitRow drange_generate(DramDevice& device, const std::shared_ptr<const CellReliabilityProfile>& profile,
                       std::uint64_t n_bits, DrangeSource source = {});

/// Post-processing applied to every raw QUAC block.
using Whitener = std::function<BitRow(const BitRow&)>;

/// XOR of the block's first and second halves.
BitRow xor_fold(const BitRow& block);
#ifdef PUMSIM_HAVE_OPENSSL
/// SHA-256 over the block bytes, 256 bits per block.
BitRow sha256_whiten(const BitRow& block);
#endif

struct QuacOptions {
  std::uint32_t bank = 0;
  std::uint32_t subarray = 0;
  std::uint32_t first_row = 0;
  /// Initial value of R0..R3; the default is the charge conflict R0=R2=1, R1=R3=0.
  std::array<bool, 4> charged{true, false, true, false};
};

struct QuacOutput {
  BitRow raw;       // iterations * columns_per_row bits
  BitRow whitened;  // concatenation of whitener(block)
};

/// Per iteration: initialise R0..R3 from the control rows, activate all four,
/// read the row buffer, precharge. Needs the quadruple-activation row decoder.
QuacOutput quac_generate(DramDevice& device, std::uint64_t iterations, const QuacOptions& options = {},
                         const Whitener& whitener = xor_fold);

// Statistics over bit streams.
double ones_fraction(const BitRow& bits);
/// Pearson correlation of x[i] and x[i+lag].
double serial_correlation(const BitRow& bits, std::size_t lag = 1);
/// Pearson correlation of a[i] and b[i] over the common prefix.
double cross_correlation(const BitRow& a, const BitRow& b);

}  // namespace pumsim
