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

#include "pumsim/bitrow.hpp"

#include <bit>

#include "pumsim/error.hpp"

namespace pumsim {

namespace {

std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void require_same_size(const BitRow& a, const BitRow& b) {
  if (a.size() != b.size())
    fail(ErrorCode::InvalidArgument, "bit row width mismatch: " + std::to_string(a.size()) +
                                         " vs " + std::to_string(b.size()));
}

}  // namespace

BitRow::BitRow(std::size_t bits, bool value) : bits_(bits), words_(word_count(bits), 0) {
  if (value) fill(true);
}

BitRow BitRow::random(std::size_t bits, std::mt19937_64& rng) {
  BitRow r(bits);
  for (auto& w : r.words_) w = rng();
  r.clear_tail();
  return r;
}

BitRow BitRow::from_hex(std::string_view hex, std::size_t bits) {
  if (hex.size() != 2 * ((bits + 7) / 8))
    fail(ErrorCode::ParseError, "hex payload has " + std::to_string(hex.size()) +
                                    " digits, expected " + std::to_string(2 * ((bits + 7) / 8)));
  std::vector<std::uint8_t> bytes(hex.size() / 2);
  for (std::size_t k = 0; k < bytes.size(); ++k) {
    const int hi = hex_value(hex[2 * k]);
    const int lo = hex_value(hex[2 * k + 1]);
    if (hi < 0 || lo < 0) fail(ErrorCode::ParseError, "bad hex digit");
    bytes[k] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return from_bytes(bytes, bits);
}

BitRow BitRow::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits) {
  if (bytes.size() * 8 < bits) fail(ErrorCode::InvalidArgument, "not enough bytes for bit row");
  BitRow r(bits);
  for (std::size_t k = 0; k < (bits + 7) / 8; ++k)
    r.words_[k / 8] |= std::uint64_t{bytes[k]} << (8 * (k % 8));
  r.clear_tail();
  return r;
}

void BitRow::fill(bool v) noexcept {
  for (auto& w : words_) w = v ? ~std::uint64_t{0} : 0;
  clear_tail();
}

bool BitRow::all_equal(bool v) const noexcept {
  return popcount() == (v ? bits_ : 0);
}

std::size_t BitRow::popcount() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

BitRow BitRow::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > bits_) fail(ErrorCode::OutOfRange, "slice out of range");
  BitRow r(end - begin);
  if ((begin & 63) == 0) {
    for (std::size_t w = 0; w < r.words_.size(); ++w) r.words_[w] = words_[(begin >> 6) + w];
  } else {
    const unsigned sh = begin & 63;
    for (std::size_t w = 0; w < r.words_.size(); ++w) {
      const std::size_t src = (begin >> 6) + w;
      std::uint64_t v = words_[src] >> sh;
      if (src + 1 < words_.size()) v |= words_[src + 1] << (64 - sh);
      r.words_[w] = v;
    }
  }
  r.clear_tail();
  return r;
}

void BitRow::assign(std::size_t offset, const BitRow& src) {
  if (offset + src.size() > bits_) fail(ErrorCode::OutOfRange, "assign out of range");
  if ((offset & 63) == 0) {
    const std::size_t full = src.size() / 64;
    for (std::size_t w = 0; w < full; ++w) words_[(offset >> 6) + w] = src.words_[w];
    for (std::size_t i = full * 64; i < src.size(); ++i) set(offset + i, src.get(i));
    return;
  }
  for (std::size_t i = 0; i < src.size(); ++i) set(offset + i, src.get(i));
}

BitRow BitRow::operator~() const {
  BitRow r = *this;
  for (auto& w : r.words_) w = ~w;
  r.clear_tail();
  return r;
}

BitRow& BitRow::operator&=(const BitRow& o) {
  require_same_size(*this, o);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
  return *this;
}

BitRow& BitRow::operator|=(const BitRow& o) {
  require_same_size(*this, o);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
  return *this;
}

BitRow& BitRow::operator^=(const BitRow& o) {
  require_same_size(*this, o);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
  return *this;
}

std::string BitRow::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  const auto bytes = to_bytes();
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

std::vector<std::uint8_t> BitRow::to_bytes() const {
  std::vector<std::uint8_t> out((bits_ + 7) / 8);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = static_cast<std::uint8_t>(words_[k / 8] >> (8 * (k % 8)));
  return out;
}

void BitRow::clear_tail() noexcept {
  if (bits_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (bits_ % 64)) - 1;
}

}  // namespace pumsim
