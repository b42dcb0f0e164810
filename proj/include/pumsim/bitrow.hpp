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

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pumsim {

/// Fixed-width bit vector backed by 64-bit words. Bits past size() are kept zero.
///
/// Hex form: two digits per byte, byte k holds bits [8k, 8k+8) with bit 8k as its
/// least-significant bit, bytes in increasing order.
class BitRow {
 public:
  BitRow() = default;
  explicit BitRow(std::size_t bits, bool value = false);

  static BitRow random(std::size_t bits, std::mt19937_64& rng);
  static BitRow from_hex(std::string_view hex, std::size_t bits);
  static BitRow from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits);

  std::size_t size() const noexcept { return bits_; }
  bool empty() const noexcept { return bits_ == 0; }

  bool get(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v) noexcept {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v) words_[i >> 6] |= m; else words_[i >> 6] &= ~m;
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  void fill(bool v) noexcept;
  bool all_equal(bool v) const noexcept;
  std::size_t popcount() const noexcept;

  /// Bits [begin, end) as a new row.
  BitRow slice(std::size_t begin, std::size_t end) const;
  /// Overwrites bits [offset, offset + src.size()).
  void assign(std::size_t offset, const BitRow& src);

  BitRow operator~() const;
  BitRow& operator&=(const BitRow& o);
  BitRow& operator|=(const BitRow& o);
  BitRow& operator^=(const BitRow& o);
  friend BitRow operator&(BitRow a, const BitRow& b) { return a &= b; }
  friend BitRow operator|(BitRow a, const BitRow& b) { return a |= b; }
  friend BitRow operator^(BitRow a, const BitRow& b) { return a ^= b; }
  friend bool operator==(const BitRow& a, const BitRow& b) noexcept {
    return a.bits_ == b.bits_ && a.words_ == b.words_;
  }

  std::string to_hex() const;
  std::vector<std::uint8_t> to_bytes() const;

  void clear_tail() noexcept;

 private:
  std::size_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace pumsim
