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

#include <algorithm>
#include <random>
#include <string>

#include "doctest.h"
#include "oracle.hpp"
#include "pumsim/error.hpp"
#include "pumsim/primitives.hpp"

using namespace pumsim;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

DramDevice device(std::uint32_t cols = 1024, std::uint64_t seed = 1) {
  DramGeometry g;
  g.banks_per_device = 2;
  g.subarrays_per_bank = 2;
  g.rows_per_subarray = 64;
  g.columns_per_row = cols;
  return DramDevice(g, ComputeLayout{}, seed);
}

const char* const kOps[] = {"not", "and", "or", "nand", "nor", "xor", "xnor"};

oracle::Bits run_op(DramDevice& dev, const std::string& op, const oracle::Bits& a, const oracle::Bits& b) {
  dev.store_row({0, 0, 1}, oracle::to_row(a));
  dev.store_row({0, 0, 2}, oracle::to_row(b));
  const BitwiseOpKind k = parse_bitwise_op(op);
  bulk_bitwise(dev, 0, 0, k, 1, is_binary(k) ? std::optional<std::uint32_t>(2) : std::nullopt, 3);
  return oracle::bits_of(dev.peek({0, 0, 3}));
}

}  // namespace

TEST_CASE("rowclone fpm copies a row with one AAP") {
  auto dev = device(8192);
  dev.aap(0, 0, RowGroup::single(dev.c1_row()), RowGroup::single(4));  // dst starts as ones
  rowclone_fpm(dev, 0, 0, 1, 4);  // src never written: all zero
  CHECK(dev.peek({0, 0, 4}).all_equal(false));

  std::mt19937 rng(1);
  const auto p = oracle::random_bits(8192, rng);
  dev.store_row({0, 0, 2}, oracle::to_row(p));
  const auto n = dev.trace().size();
  rowclone_fpm(dev, 0, 0, 2, 5);
  CHECK(oracle::bits_of(dev.peek({0, 0, 5})) == p);
  CHECK(dev.trace().size() == n + 1);
  CHECK(dev.trace().slice(n).dram_command_count() == 3);
  // idempotent
  rowclone_fpm(dev, 0, 0, 2, 5);
  CHECK(oracle::bits_of(dev.peek({0, 0, 5})) == p);
  CHECK(oracle::bits_of(dev.peek({0, 0, 2})) == p);
}

TEST_CASE("rowclone fpm command count does not depend on the row width") {
  for (std::uint32_t cols : {1024u, 8192u, 65536u}) {
    auto dev = device(cols);
    const auto n = dev.trace().size();
    rowclone_fpm(dev, 0, 1, 3, 7);
    CHECK(dev.trace().slice(n).dram_command_count() == 3);
  }
}

TEST_CASE("rowclone fpm needs one subarray") {
  auto dev = device();
  CHECK(code_of([&] { rowclone_fpm(dev, {0, 0, 1}, {0, 1, 1}); }) == ErrorCode::CrossSubarray);
  CHECK(code_of([&] { rowclone_fpm(dev, {0, 0, 1}, {1, 0, 1}); }) == ErrorCode::CrossSubarray);
  CHECK(code_of([&] { rowclone_fpm(dev, 0, 0, 1, dev.c0_row()); }) == ErrorCode::ProtectedRow);
}

TEST_CASE("rowclone psm") {
  auto dev = device(65536);  // 8 KiB rows
  std::mt19937 rng(2);
  const auto p = oracle::random_bits(65536, rng);
  dev.store_row({0, 0, 1}, oracle::to_row(p));

  auto n = dev.trace().size();
  rowclone_psm(dev, {0, 0, 1}, {1, 1, 2}, 64);
  CHECK(dev.trace().slice(n).count(CommandKind::Xfer) == 1);
  CHECK(dev.peek({1, 1, 2}).slice(0, 512) == oracle::to_row(p).slice(0, 512));

  n = dev.trace().size();
  rowclone_psm(dev, {0, 0, 1}, {1, 0, 3}, 8192);
  CHECK(oracle::bits_of(dev.peek({1, 0, 3})) == p);
  CHECK(dev.trace().slice(n).count(CommandKind::Xfer) == 8192 / 64);
  CHECK(psm_transfers(dev.geometry(), 8192) == 128);
  CHECK(psm_transfers(dev.geometry(), 65) == 2);

  n = dev.trace().size();
  rowclone_psm(dev, {0, 0, 1}, {1, 0, 4}, 0);
  CHECK(dev.trace().size() == n);
  CHECK(code_of([&] { rowclone_psm(dev, {0, 0, 1}, {0, 1, 4}, 64); }) == ErrorCode::SameBank);
  CHECK(code_of([&] { rowclone_psm(dev, {0, 0, 1}, {1, 1, 4}, 8193); }) == ErrorCode::OutOfRange);
}

TEST_CASE("row init") {
  auto dev = device();
  auto n = dev.trace().size();
  row_init(dev, 0, 0, 6, true);
  CHECK(dev.peek({0, 0, 6}).all_equal(true));
  CHECK(dev.trace().slice(n).size() == 1);
  CHECK(dev.trace().slice(n).count(CommandKind::Aap) == 1);
  row_init(dev, 0, 0, 6, false);
  CHECK(dev.peek({0, 0, 6}).all_equal(false));
}

TEST_CASE("ambit not") {
  auto dev = device();
  ambit_not(dev, 0, 0, 1, 2);
  CHECK(dev.peek({0, 0, 2}).all_equal(true));
  std::mt19937 rng(3);
  const auto p = oracle::random_bits(1024, rng);
  dev.store_row({0, 0, 3}, oracle::to_row(p));
  ambit_not(dev, 0, 0, 3, 4);
  CHECK(oracle::bits_of(dev.peek({0, 0, 4})) == oracle::bitwise("not", p, {}));
  ambit_not(dev, 0, 0, 4, 5);
  CHECK(oracle::bits_of(dev.peek({0, 0, 5})) == p);
}

TEST_CASE("small AND / OR examples") {
  auto dev = device(64);
  oracle::Bits a(64, 0), b(64, 0);
  a[0] = 1, a[2] = 1;  // 1010 in columns 0..3
  b[0] = 1, b[1] = 1;  // 1100
  auto orr = run_op(dev, "or", a, b), andd = run_op(dev, "and", a, b);
  CHECK(oracle::Bits(orr.begin(), orr.begin() + 4) == oracle::Bits{1, 1, 1, 0});
  CHECK(oracle::Bits(andd.begin(), andd.begin() + 4) == oracle::Bits{1, 0, 0, 0});
}

TEST_CASE("all seven bulk ops against the per-bit oracle, sources intact") {
  auto dev = device(2048, 5);
  std::mt19937 rng(5);
  for (const char* op : kOps) {
    for (int i = 0; i < 20; ++i) {
      const auto a = oracle::random_bits(2048, rng), b = oracle::random_bits(2048, rng);
      CHECK(run_op(dev, op, a, b) == oracle::bitwise(op, a, b));
      CHECK(oracle::bits_of(dev.peek({0, 0, 1})) == a);
      CHECK(oracle::bits_of(dev.peek({0, 0, 2})) == b);
    }
  }
}

TEST_CASE("AND and OR cost 4 AAP plus 1 AP in any width") {
  for (std::uint32_t cols : {1024u, 65536u}) {
    for (auto k : {BitwiseOpKind::And, BitwiseOpKind::Or}) {
      auto dev = device(cols);
      const OpSequence s = bulk_bitwise(dev, 0, 0, k, 1, 2, 3);
      CHECK(s.commands.count(CommandKind::Aap) == 4);
      CHECK(s.commands.count(CommandKind::Ap) == 1);
      CHECK(s.commands.size() == 5);
      CHECK(s.destination == 3);
      CHECK(s.sources == std::vector<std::uint32_t>{1, 2});
    }
  }
}

TEST_CASE("De Morgan through independent sequences") {
  auto dev = device(1024, 7);
  std::mt19937 rng(7);
  const auto a = oracle::random_bits(1024, rng), b = oracle::random_bits(1024, rng);
  dev.store_row({0, 0, 1}, oracle::to_row(a));
  dev.store_row({0, 0, 2}, oracle::to_row(b));
  bulk_bitwise(dev, 0, 0, BitwiseOpKind::Nand, 1, 2, 3);
  bulk_bitwise(dev, 0, 0, BitwiseOpKind::And, 1, 2, 4);
  ambit_not(dev, 0, 0, 4, 5);
  CHECK(dev.peek({0, 0, 3}) == dev.peek({0, 0, 5}));
  bulk_bitwise(dev, 0, 0, BitwiseOpKind::Nor, 1, 2, 6);
  bulk_bitwise(dev, 0, 0, BitwiseOpKind::Or, 1, 2, 7);
  ambit_not(dev, 0, 0, 7, 8);
  CHECK(dev.peek({0, 0, 6}) == dev.peek({0, 0, 8}));
}

TEST_CASE("bulk op argument errors") {
  auto dev = device();
  CHECK(code_of([&] { bulk_bitwise(dev, 0, 0, BitwiseOpKind::And, 1, std::nullopt, 3); }) ==
        ErrorCode::MissingOperand);
  // operands and destination must be data rows
  CHECK(code_of([&] { bulk_bitwise(dev, 0, 0, BitwiseOpKind::And, 1, 2, dev.c1_row()); }) ==
        ErrorCode::OutOfRange);
  CHECK(code_of([&] { bulk_bitwise(dev, 0, 0, BitwiseOpKind::And, dev.tra_row(0), 2, 3); }) ==
        ErrorCode::OutOfRange);
  CHECK(code_of([] { parse_bitwise_op("nope"); }) == ErrorCode::InvalidArgument);
  CHECK(parse_bitwise_op("XoR") == BitwiseOpKind::Xor);
}
