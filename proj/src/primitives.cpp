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

#include "pumsim/primitives.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "pumsim/error.hpp"

namespace pumsim {

std::string_view to_string(BitwiseOpKind k) noexcept {
  switch (k) {
    case BitwiseOpKind::Not: return "not";
    case BitwiseOpKind::And: return "and";
    case BitwiseOpKind::Or: return "or";
    case BitwiseOpKind::Nand: return "nand";
    case BitwiseOpKind::Nor: return "nor";
    case BitwiseOpKind::Xor: return "xor";
    case BitwiseOpKind::Xnor: return "xnor";
  }
  return "?";
}

BitwiseOpKind parse_bitwise_op(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto k : {BitwiseOpKind::Not, BitwiseOpKind::And, BitwiseOpKind::Or, BitwiseOpKind::Nand, BitwiseOpKind::Nor,
                 BitwiseOpKind::Xor, BitwiseOpKind::Xnor})
    if (to_string(k) == lower) return k;
  fail(ErrorCode::InvalidArgument, "unknown bitwise op '" + std::string(name) + "'");
}

bool is_binary(BitwiseOpKind k) noexcept { return k != BitwiseOpKind::Not; }

std::uint64_t apply_bitwise(BitwiseOpKind k, std::uint64_t a, std::uint64_t b) noexcept {
  switch (k) {
    case BitwiseOpKind::Not: return ~a;
    case BitwiseOpKind::And: return a & b;
    case BitwiseOpKind::Or: return a | b;
    case BitwiseOpKind::Nand: return ~(a & b);
    case BitwiseOpKind::Nor: return ~(a | b);
    case BitwiseOpKind::Xor: return a ^ b;
    case BitwiseOpKind::Xnor: return ~(a ^ b);
  }
  return 0;
}

namespace {

RowGroup one(std::uint32_t row) { return RowGroup::single(row); }
RowGroup neg(std::uint32_t row) { return RowGroup{RowRef{row, true}}; }

}  // namespace

void rowclone_fpm(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, std::uint32_t src_row,
                  std::uint32_t dst_row) {
  device.aap(bank, subarray, one(src_row), one(dst_row));
}

void rowclone_fpm(DramDevice& device, const RowAddress& src, const RowAddress& dst) {
  if (src.bank != dst.bank || src.subarray != dst.subarray)
    fail(ErrorCode::CrossSubarray, "fast parallel mode copies only inside one subarray");
  rowclone_fpm(device, src.bank, src.subarray, src.row, dst.row);
}

std::uint64_t psm_transfers(const DramGeometry& g, std::uint64_t bytes) noexcept {
  return (bytes * 8 + g.cacheline_bits - 1) / g.cacheline_bits;
}

void rowclone_psm(DramDevice& device, const RowAddress& src, const RowAddress& dst, std::uint64_t bytes) {
  const auto& g = device.geometry();
  if (src.bank == dst.bank) fail(ErrorCode::SameBank, "pipelined serial mode needs two banks; use fast parallel mode");
  if (bytes * 8 > g.columns_per_row) fail(ErrorCode::OutOfRange, "copy longer than a row");
  if (dst.row < g.rows_per_subarray && device.is_control_row(dst.row))
    fail(ErrorCode::ProtectedRow, "control rows are immutable");
  if (bytes == 0) return;
  device.activate(src);
  device.activate(dst);
  const std::uint64_t bits = bytes * 8;
  for (std::uint64_t b = 0; b < bits; b += g.cacheline_bits) {
    const auto end = static_cast<std::uint32_t>(std::min<std::uint64_t>(b + g.cacheline_bits, bits));
    device.transfer(src.bank, dst.bank, {static_cast<std::uint32_t>(b), end});
  }
  device.precharge(src.bank);
  device.precharge(dst.bank);
}

void row_init(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, std::uint32_t dst_row, bool value) {
  device.aap(bank, subarray, one(value ? device.c1_row() : device.c0_row()), one(dst_row));
}

void ambit_not(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, std::uint32_t src_row,
               std::uint32_t dst_row) {
  const std::uint32_t d0 = device.dcc_row(0);
  device.aap(bank, subarray, one(src_row), neg(d0));
  device.aap(bank, subarray, one(d0), one(dst_row));
}

OpSequence bulk_bitwise(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, BitwiseOpKind op,
                        std::uint32_t a, std::optional<std::uint32_t> b, std::uint32_t dst) {
  if (is_binary(op) && !b)
    fail(ErrorCode::MissingOperand, std::string(to_string(op)) + " needs two source rows");
  const auto& g = device.geometry();
  for (std::uint32_t r : {a, b.value_or(a), dst})
    if (r >= device.data_rows() || r >= g.rows_per_subarray)
      fail(ErrorCode::OutOfRange, "bulk operands must be data rows");

  OpSequence seq;
  seq.sources.push_back(a);
  if (is_binary(op)) seq.sources.push_back(*b);
  seq.destination = dst;
  const std::size_t mark = device.trace().size();

  const std::uint32_t t0 = device.tra_row(0), t1 = device.tra_row(1), t2 = device.tra_row(2), t3 = device.tra_row(3);
  const std::uint32_t d0 = device.dcc_row(0);
  const std::uint32_t c0 = device.c0_row(), c1 = device.c1_row();

  // TRA over {x,y,z} after copying the operands in; the result sits in all three rows.
  auto tra = [&](std::uint32_t x, std::uint32_t y, std::uint32_t z, std::uint32_t control) {
    device.aap(bank, subarray, one(a), one(x));
    device.aap(bank, subarray, one(*b), one(y));
    device.aap(bank, subarray, one(control), one(z));
    device.ap(bank, subarray, RowGroup{{x, false}, {y, false}, {z, false}});
  };
  auto copy_out = [&](std::uint32_t from, bool invert) {
    if (invert) {
      device.aap(bank, subarray, one(from), neg(d0));
      device.aap(bank, subarray, one(d0), one(dst));
    } else {
      device.aap(bank, subarray, one(from), one(dst));
    }
  };

  switch (op) {
    case BitwiseOpKind::Not:
      ambit_not(device, bank, subarray, a, dst);
      seq.scratch = {d0};
      break;
    case BitwiseOpKind::And:
    case BitwiseOpKind::Nand:
      tra(t0, t1, t2, c0);
      copy_out(t0, op == BitwiseOpKind::Nand);
      seq.scratch = {t0, t1, t2};
      break;
    case BitwiseOpKind::Or:
    case BitwiseOpKind::Nor:
      tra(t0, t1, t2, c1);
      copy_out(t0, op == BitwiseOpKind::Nor);
      seq.scratch = {t0, t1, t2};
      break;
    case BitwiseOpKind::Xor:
    case BitwiseOpKind::Xnor:
      // (A | B) & ~(A & B)
      tra(t0, t1, t2, c1);
      tra(t1, t2, t3, c0);
      device.aap(bank, subarray, one(t1), neg(d0));
      device.aap(bank, subarray, one(c0), one(t2));
      device.ap(bank, subarray, RowGroup{{t0, false}, {d0, false}, {t2, false}});
      copy_out(t0, op == BitwiseOpKind::Xnor);
      seq.scratch = {t0, t1, t2, t3};
      break;
  }
  if (op == BitwiseOpKind::Nand || op == BitwiseOpKind::Nor || op == BitwiseOpKind::Xor ||
      op == BitwiseOpKind::Xnor)
    if (std::find(seq.scratch.begin(), seq.scratch.end(), d0) == seq.scratch.end()) seq.scratch.push_back(d0);
  seq.commands = device.trace().slice(mark);
  return seq;
}

}  // namespace pumsim
