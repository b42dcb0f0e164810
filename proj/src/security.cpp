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

#include "pumsim/security.hpp"

#include <cmath>
#include <string>

#include "pumsim/error.hpp"

#ifdef PUMSIM_HAVE_OPENSSL
#include <openssl/evp.h>
#endif

namespace pumsim {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

void attach(DramDevice& device, const std::shared_ptr<const CellReliabilityProfile>& profile) {
  if (!profile) fail(ErrorCode::InvalidArgument, "no cell reliability profile");
  if (device.classifier() != profile.get()) device.attach_classifier(profile);
}

// Appends bits to a preallocated stream.
class BitSink {
 public:
  explicit BitSink(std::size_t bits) : row_(bits) {}
  void put(const BitRow& bits, std::size_t count) {
    row_.assign(pos_, count == bits.size() ? bits : bits.slice(0, count));
    pos_ += count;
  }
  std::size_t remaining() const { return row_.size() - pos_; }
  BitRow take() { return std::move(row_); }

 private:
  BitRow row_;
  std::size_t pos_ = 0;
};

}  // namespace

CellReliabilityProfile::CellReliabilityProfile(std::uint64_t seed, const DramGeometry& geometry,
                                               const ClassFractions& f)
    : seed_(seed), geometry_(geometry), fractions_(f) {
  for (double x : {f.strong, f.det, f.trng})
    if (!(x >= 0.0 && x <= 1.0)) fail(ErrorCode::BadFractions, "class fractions must lie in [0, 1]");
  if (std::abs(f.strong + f.det + f.trng - 1.0) > 1e-9) fail(ErrorCode::BadFractions, "class fractions must sum to 1");
}

CellClass CellReliabilityProfile::classify(const RowAddress& addr, std::uint32_t column) const {
  std::uint64_t h = mix64(seed_);
  h = mix64(h ^ addr.bank);
  h = mix64(h ^ (std::uint64_t{addr.subarray} << 32 | addr.row));
  h = mix64(h ^ column);
  const double u = std::ldexp(static_cast<double>(h >> 11), -53);  // uniform in [0, 1)
  if (u < fractions_.strong || (fractions_.det == 0.0 && fractions_.trng == 0.0)) return CellClass::Strong;
  if (u < fractions_.strong + fractions_.det || fractions_.trng == 0.0)
    return (mix64(h) & 1u) ? CellClass::StuckOne : CellClass::StuckZero;
  return CellClass::Random;
}

std::shared_ptr<const CellReliabilityProfile> profile_device(std::uint64_t seed, const DramGeometry& geometry,
                                                             const ClassFractions& fractions) {
  return std::make_shared<const CellReliabilityProfile>(seed, geometry, fractions);
}

BitRow read_reduced(DramDevice& device, const std::shared_ptr<const CellReliabilityProfile>& profile,
                    const RowAddress& addr, ColumnRange cols, ReducedTiming timing) {
  attach(device, profile);
  if (!device.is_open(addr.bank)) fail(ErrorCode::RowClosed, "bank " + std::to_string(addr.bank) + " has no open row");
  if (!device.is_open_row(addr)) fail(ErrorCode::RowMismatch, "row " + std::to_string(addr.row) + " is not the open row");
  return device.read_reduced(addr.bank, cols, timing);
}

BitRow puf_pattern(std::uint32_t row, std::uint32_t columns) {
  BitRow p(columns);
  const std::uint64_t word = (row & 1u) ? 0xaaaaaaaaaaaaaaaaull : 0x5555555555555555ull;
  for (auto& w : p.words()) w = word;
  p.clear_tail();
  return p;
}

PufResponse puf_evaluate(DramDevice& device, const std::shared_ptr<const CellReliabilityProfile>& profile,
                         const PufRegion& region, std::uint32_t reads) {
  if (region.rows == 0) fail(ErrorCode::EmptyRegion, "PUF region has no rows");
  if (reads == 0) fail(ErrorCode::InvalidArgument, "PUF needs at least one reduced read");
  if (region.first_row + region.rows > device.data_rows())
    fail(ErrorCode::OutOfRange, "PUF region runs past the data rows");
  attach(device, profile);
  const std::uint32_t cols = device.geometry().columns_per_row;
  PufResponse out{region, BitRow(std::size_t{region.rows} * cols)};
  for (std::uint32_t i = 0; i < region.rows; ++i) {
    const RowAddress addr{region.bank, region.subarray, region.first_row + i};
    const BitRow pattern = puf_pattern(addr.row, cols);
    device.store_row(addr, pattern);
    BitRow failed(cols, true);
    for (std::uint32_t r = 0; r < reads; ++r) {
      device.activate(addr);
      failed &= device.read_reduced(addr.bank, device.full_row(), ReducedTiming::ReadLatency) ^ pattern;
      device.precharge(addr.bank);
    }
    out.bitmap.assign(std::size_t{i} * cols, failed);
  }
  return out;
}

double normalized_hamming(const BitRow& a, const BitRow& b) {
  if (a.size() != b.size() || a.empty()) fail(ErrorCode::InvalidArgument, "responses differ in size");
  return static_cast<double>((a ^ b).popcount()) / static_cast<double>(a.size());
}

BitRow drange_generate(DramDevice& device, const std::shared_ptr<const CellReliabilityProfile>& profile,
                       std::uint64_t n_bits, DrangeSource source) {
  attach(device, profile);
  if (n_bits == 0) return BitRow{};
  const std::uint32_t cols = device.geometry().columns_per_row;
  std::uint32_t row = 0;
  std::vector<std::uint32_t> cells;
  for (; row < device.data_rows() && cells.empty(); ++row)
    for (std::uint32_t c = 0; c < cols; ++c)
      if (profile->classify({source.bank, source.subarray, row}, c) == CellClass::Random) cells.push_back(c);
  if (cells.empty()) fail(ErrorCode::NoTrngCells, "the profile has no TRNG cells in this subarray");
  --row;
  const RowAddress addr{source.bank, source.subarray, row};
  const ColumnRange span{cells.front(), cells.back() + 1};
  BitSink sink(n_bits);
  BitRow chunk(cells.size());
  while (sink.remaining()) {
    device.activate(addr);
    const BitRow bits = device.read_reduced(addr.bank, span, ReducedTiming::Trcd);
    device.precharge(addr.bank);
    for (std::size_t i = 0; i < cells.size(); ++i) chunk.set(i, bits.get(cells[i] - span.begin));
    sink.put(chunk, std::min<std::size_t>(cells.size(), sink.remaining()));
  }
  return sink.take();
}

BitRow xor_fold(const BitRow& block) {
  const std::size_t half = block.size() / 2;
  return block.slice(0, half) ^ block.slice(half, 2 * half);
}

#ifdef PUMSIM_HAVE_OPENSSL
BitRow sha256_whiten(const BitRow& block) {
  const auto bytes = block.to_bytes();
  std::uint8_t digest[32];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1 || len != 32)
    fail(ErrorCode::Internal, "SHA-256 failed");
  return BitRow::from_bytes(digest, 256);
}
#endif

QuacOutput quac_generate(DramDevice& device, std::uint64_t iterations, const QuacOptions& o,
                         const Whitener& whitener) {
  if (o.first_row + 4 > device.data_rows()) fail(ErrorCode::OutOfRange, "QUAC needs four consecutive data rows");
  const std::uint32_t cols = device.geometry().columns_per_row;
  const RowGroup quad{{o.first_row, false}, {o.first_row + 1, false}, {o.first_row + 2, false}, {o.first_row + 3, false}};
  QuacOutput out{BitRow(iterations * cols), BitRow{}};
  std::vector<BitRow> blocks;
  std::size_t white_bits = 0;
  for (std::uint64_t it = 0; it < iterations; ++it) {
    for (std::uint32_t k = 0; k < 4; ++k)
      device.aap(o.bank, o.subarray, RowGroup::single(o.charged[k] ? device.c1_row() : device.c0_row()),
                 RowGroup::single(o.first_row + k));
    device.multi_activate(o.bank, o.subarray, quad);
    const BitRow block = device.read_buffer(o.bank, device.full_row());
    device.precharge(o.bank);
    out.raw.assign(it * cols, block);
    if (whitener) {
      blocks.push_back(whitener(block));
      white_bits += blocks.back().size();
    }
  }
  out.whitened = BitRow(white_bits);
  std::size_t pos = 0;
  for (const auto& b : blocks) {
    out.whitened.assign(pos, b);
    pos += b.size();
  }
  return out;
}

double ones_fraction(const BitRow& bits) {
  if (bits.empty()) return 0.0;
  return static_cast<double>(bits.popcount()) / static_cast<double>(bits.size());
}

namespace {

double pearson(const BitRow& x, std::size_t xoff, const BitRow& y, std::size_t yoff, std::size_t n) {
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x.get(xoff + i), b = y.get(yoff + i);
    sx += a;
    sy += b;
    sxy += a * b;
  }
  const double dn = static_cast<double>(n);
  const double mx = sx / dn, my = sy / dn;
  const double cov = sxy / dn - mx * my;
  // Bits: E[x^2] = E[x].
  const double vx = mx - mx * mx, vy = my - my * my;
  if (vx <= 0 || vy <= 0) return 0.0;
  return cov / std::sqrt(vx * vy);
}

}  // namespace

double serial_correlation(const BitRow& bits, std::size_t lag) {
  if (bits.size() <= lag) return 0.0;
  return pearson(bits, 0, bits, lag, bits.size() - lag);
}

double cross_correlation(const BitRow& a, const BitRow& b) {
  return pearson(a, 0, b, 0, std::min(a.size(), b.size()));
}

}  // namespace pumsim
