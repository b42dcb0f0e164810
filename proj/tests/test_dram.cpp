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

#include "doctest.h"
#include "oracle.hpp"
#include "pumsim/dram.hpp"
#include "pumsim/error.hpp"

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

DramGeometry small_geometry(std::uint32_t cols = 256) {
  DramGeometry g;
  g.banks_per_device = 2;
  g.subarrays_per_bank = 2;
  g.rows_per_subarray = 64;
  g.columns_per_row = cols;
  g.cacheline_bits = std::min<std::uint32_t>(cols, 512);
  g.chips_per_rank = g.cacheline_bits >= 8 ? 8 : 1;
  return g;
}

DramDevice small_device(std::uint64_t seed = 1, std::uint32_t cols = 256) {
  return DramDevice(small_geometry(cols), ComputeLayout{}, seed);
}

RowGroup group(std::initializer_list<std::uint32_t> rows) {
  RowGroup g;
  for (auto r : rows) g.push_back({r, false});
  return g;
}

}  // namespace

TEST_CASE("activate senses and restores a stored row") {
  auto dev = small_device();
  std::mt19937 rng(1);
  const BitRow p = oracle::to_row(oracle::random_bits(256, rng));
  dev.store_row({0, 0, 5}, p);
  dev.activate({0, 0, 5});
  CHECK(dev.read_buffer(0, dev.full_row()) == p);
  CHECK(dev.peek({0, 0, 5}) == p);
}

TEST_CASE("protocol errors") {
  auto dev = small_device();
  dev.activate({0, 0, 1});
  CHECK(code_of([&] { dev.activate({0, 0, 2}); }) == ErrorCode::BankOpen);
  dev.precharge(0);
  CHECK(code_of([&] { dev.read_buffer(0, dev.full_row()); }) == ErrorCode::RowClosed);
  CHECK(code_of([&] { dev.activate({2, 0, 1}); }) == ErrorCode::OutOfRange);
  CHECK(code_of([&] { dev.activate({0, 0, 64}); }) == ErrorCode::OutOfRange);
  CHECK(code_of([&] { dev.activate({0, 2, 1}); }) == ErrorCode::OutOfRange);
  dev.activate({0, 0, 1});
  CHECK(code_of([&] { dev.read_buffer(0, {0, 257}); }) == ErrorCode::OutOfRange);
  CHECK(code_of([&] { dev.host_read({0, 0, 2}, {0, 8}); }) == ErrorCode::RowMismatch);
}

TEST_CASE("control rows read as constants") {
  auto dev = small_device();
  dev.activate({0, 0, dev.c1_row()});
  CHECK(dev.read_buffer(0, dev.full_row()).all_equal(true));
  dev.precharge(0);
  dev.activate({0, 0, dev.c0_row()});
  CHECK(dev.read_buffer(0, dev.full_row()).all_equal(false));
  dev.precharge(0);
}

TEST_CASE("precharge on a closed bank is traced and changes nothing") {
  auto dev = small_device();
  const auto before = dev.state_digest();
  const auto n = dev.trace().size();
  dev.precharge(1);
  CHECK(dev.trace().size() == n + 1);
  CHECK(dev.trace().count(CommandKind::Pre) == 1);
  CHECK(dev.state_digest() == before);
}

TEST_CASE("reopening a bank holds the new row") {
  auto dev = small_device();
  std::mt19937 rng(2);
  const BitRow r3 = oracle::to_row(oracle::random_bits(256, rng));
  const BitRow r7 = oracle::to_row(oracle::random_bits(256, rng));
  dev.store_row({0, 0, 3}, r3);
  dev.store_row({0, 0, 7}, r7);
  dev.activate({0, 0, 3});
  dev.precharge(0);
  dev.activate({0, 0, 7});
  CHECK(dev.read_buffer(0, dev.full_row()) == r7);
  CHECK(dev.is_open_row({0, 0, 7}));
}

TEST_CASE("host read your write and partial ranges") {
  auto dev = small_device();
  std::mt19937 rng(3);
  const BitRow orig = oracle::to_row(oracle::random_bits(256, rng));
  dev.store_row({1, 1, 4}, orig);
  dev.activate({1, 1, 4});
  const BitRow w = oracle::to_row(oracle::random_bits(64, rng));
  dev.host_write({1, 1, 4}, {64, 128}, w);
  CHECK(dev.host_read({1, 1, 4}, {64, 128}) == w);
  CHECK(dev.host_read({1, 1, 4}, {0, 64}) == orig.slice(0, 64));
  dev.precharge(1);
  // the write reached the cells
  CHECK(dev.peek({1, 1, 4}).slice(64, 128) == w);
}

TEST_CASE("control rows are protected") {
  auto dev = small_device();
  dev.activate({0, 0, dev.c0_row()});
  CHECK(code_of([&] { dev.host_write({0, 0, dev.c0_row()}, {0, 8}, BitRow(8, true)); }) ==
        ErrorCode::ProtectedRow);
  dev.precharge(0);
  CHECK(code_of([&] { dev.aap(0, 0, RowGroup::single(1), RowGroup::single(dev.c1_row())); }) ==
        ErrorCode::ProtectedRow);
  CHECK(code_of([&] { dev.store_row({0, 0, dev.c1_row()}, BitRow(256)); }) == ErrorCode::ProtectedRow);
}

TEST_CASE("triple activation computes the majority for every input combination") {
  auto dev = small_device(1, 8);
  const std::uint32_t t0 = dev.tra_row(0), t1 = dev.tra_row(1), t2 = dev.tra_row(2);
  // column k holds combination k: bit i of k goes to row Ti
  BitRow a(8), b(8), c(8);
  for (std::uint32_t k = 0; k < 8; ++k) {
    a.set(k, k & 1);
    b.set(k, k & 2);
    c.set(k, k & 4);
  }
  dev.store_row({0, 0, t0}, a);
  dev.store_row({0, 0, t1}, b);
  dev.store_row({0, 0, t2}, c);
  dev.multi_activate(0, 0, group({t0, t1, t2}));
  const BitRow sensed = dev.read_buffer(0, dev.full_row());
  for (std::uint32_t k = 0; k < 8; ++k) {
    const int ones = (k & 1) + ((k >> 1) & 1) + ((k >> 2) & 1);
    CHECK(sensed.get(k) == (ones >= 2));
  }
  dev.precharge(0);
  // restoration: every activated row now holds the sensed value
  CHECK(dev.peek({0, 0, t0}) == sensed);
  CHECK(dev.peek({0, 0, t1}) == sensed);
  CHECK(dev.peek({0, 0, t2}) == sensed);
}

TEST_CASE("triple activation of 1010, 1100, 0000 gives 1000") {
  auto dev = small_device(1, 4);
  const auto t = [&](int i) { return dev.tra_row(i); };
  dev.store_row({0, 0, t(0)}, oracle::to_row({1, 0, 1, 0}));
  dev.store_row({0, 0, t(1)}, oracle::to_row({1, 1, 0, 0}));
  dev.store_row({0, 0, t(2)}, oracle::to_row({0, 0, 0, 0}));
  dev.multi_activate(0, 0, group({t(0), t(1), t(2)}));
  CHECK(oracle::bits_of(dev.read_buffer(0, dev.full_row())) == oracle::Bits{1, 0, 0, 0});
  dev.precharge(0);
}

TEST_CASE("single bitline (1,1,0) senses 1 and restores 1") {
  auto dev = small_device(1, 1);
  dev.store_row({0, 0, dev.tra_row(0)}, BitRow(1, true));
  dev.store_row({0, 0, dev.tra_row(1)}, BitRow(1, true));
  dev.store_row({0, 0, dev.tra_row(2)}, BitRow(1, false));
  dev.multi_activate(0, 0, group({dev.tra_row(0), dev.tra_row(1), dev.tra_row(2)}));
  dev.precharge(0);
  for (int i = 0; i < 3; ++i) CHECK(dev.peek({0, 0, dev.tra_row(i)}).get(0));
}

TEST_CASE("quadruple activation with two charged cells is a fair coin") {
  auto dev = small_device(11, 32768);
  std::size_t ones = 0, samples = 0;
  const BitRow hi(32768, true), lo(32768, false);
  for (int trial = 0; trial < 4; ++trial) {
    dev.store_row({0, 0, dev.tra_row(0)}, hi);
    dev.store_row({0, 0, dev.tra_row(1)}, lo);
    dev.store_row({0, 0, dev.tra_row(2)}, hi);
    dev.store_row({0, 0, dev.tra_row(3)}, lo);
    dev.multi_activate(0, 0, group({dev.tra_row(0), dev.tra_row(1), dev.tra_row(2), dev.tra_row(3)}));
    const BitRow s = dev.read_buffer(0, dev.full_row());
    ones += s.popcount();
    samples += s.size();
    dev.precharge(0);
    for (int i = 0; i < 4; ++i) CHECK(dev.peek({0, 0, dev.tra_row(i)}) == s);
  }
  REQUIRE(samples >= 100000);
  CHECK(double(ones) / double(samples) == doctest::Approx(0.5).epsilon(0.04));  // 0.5 +- 0.02
}

TEST_CASE("quadruple activation with 0, 1, 3 or 4 charged cells is deterministic") {
  auto dev = small_device(5, 64);
  for (int k : {0, 1, 3, 4}) {
    for (int i = 0; i < 4; ++i) dev.store_row({0, 0, dev.tra_row(i)}, BitRow(64, i < k));
    dev.multi_activate(0, 0, group({dev.tra_row(0), dev.tra_row(1), dev.tra_row(2), dev.tra_row(3)}));
    CHECK(dev.read_buffer(0, dev.full_row()).all_equal(k > 2));
    dev.precharge(0);
  }
}

TEST_CASE("dual activation") {
  auto dev = small_device(5, 64);
  // agreeing cells sense their value; disagreeing cells tie
  dev.store_row({0, 0, dev.tra_row(0)}, BitRow(64, true));
  dev.store_row({0, 0, dev.tra_row(1)}, BitRow(64, true));
  dev.multi_activate(0, 0, group({dev.tra_row(0), dev.tra_row(1)}));
  CHECK(dev.read_buffer(0, dev.full_row()).all_equal(true));
  dev.precharge(0);
}

TEST_CASE("negated DCC wordline") {
  auto dev = small_device(1, 128);
  std::mt19937 rng(4);
  const auto p = oracle::random_bits(128, rng);
  dev.store_row({0, 0, 3}, oracle::to_row(p));
  // copy row 3 into D0 through the negated wordline, then D0 holds ~p
  dev.aap(0, 0, RowGroup::single(3), RowGroup{RowRef{dev.dcc_row(0), true}});
  CHECK(oracle::bits_of(dev.peek({0, 0, dev.dcc_row(0)})) == oracle::bitwise("not", p, {}));
  // reading through the negated wordline gives p back
  dev.aap(0, 0, RowGroup{RowRef{dev.dcc_row(0), true}}, RowGroup::single(9));
  CHECK(oracle::bits_of(dev.peek({0, 0, 9})) == p);
}

TEST_CASE("illegal row sets") {
  auto dev = small_device();
  CHECK(code_of([&] { dev.multi_activate(0, 0, group({1, 2, 3})); }) == ErrorCode::IllegalRowSet);
  CHECK(code_of([&] { dev.multi_activate(0, 0, group({dev.tra_row(0), dev.tra_row(0), dev.tra_row(1)})); }) ==
        ErrorCode::IllegalRowSet);
  CHECK(code_of([&] { dev.multi_activate(0, 0, RowGroup{RowRef{dev.tra_row(0), true}}); }) ==
        ErrorCode::IllegalRowSet);
  CHECK(code_of([&] { dev.multi_activate(0, 0, group({dev.tra_row(0), dev.c1_row(), dev.tra_row(1)})); }) ==
        ErrorCode::IllegalRowSet);
  CHECK(code_of([&] { dev.multi_activate(0, 0, RowGroup{}); }) == ErrorCode::IllegalRowSet);
  // four consecutive data rows need the quadruple-activation decoder
  dev.multi_activate(0, 0, group({10, 11, 12, 13}));
  dev.precharge(0);
  DramDevice plain(small_geometry(), ComputeLayout{}, 1, DramDevice::Options{false});
  CHECK(code_of([&] { plain.multi_activate(0, 0, group({10, 11, 12, 13})); }) == ErrorCode::IllegalRowSet);
  CHECK(dev.trace().size() == 2);  // failures leave no trace
}

TEST_CASE("AAP copies and AP with C1 gives OR") {
  auto dev = small_device(1, 256);
  std::mt19937 rng(5);
  const auto p = oracle::random_bits(256, rng), q = oracle::random_bits(256, rng);
  dev.store_row({0, 0, 2}, oracle::to_row(p));
  dev.aap(0, 0, RowGroup::single(2), RowGroup::single(9));
  CHECK(oracle::bits_of(dev.peek({0, 0, 9})) == p);

  const std::uint32_t t0 = dev.tra_row(0), t1 = dev.tra_row(1), t2 = dev.tra_row(2);
  dev.store_row({0, 0, t0}, oracle::to_row(p));
  dev.store_row({0, 0, t1}, oracle::to_row(q));
  dev.aap(0, 0, RowGroup::single(dev.c1_row()), RowGroup::single(t2));
  dev.ap(0, 0, group({t0, t1, t2}));
  CHECK(oracle::bits_of(dev.peek({0, 0, t0})) == oracle::bitwise("or", p, q));
  CHECK(oracle::bits_of(dev.peek({0, 0, t1})) == oracle::bitwise("or", p, q));
  CHECK(dev.peek({0, 0, dev.c1_row()}).all_equal(true));
}

TEST_CASE("AAP into a row group equals sequential single-row copies") {
  auto dev = small_device(1, 256), ref = small_device(1, 256);
  std::mt19937 rng(6);
  const BitRow p = oracle::to_row(oracle::random_bits(256, rng));
  for (auto* d : {&dev, &ref}) d->store_row({0, 0, 2}, p);
  const std::uint32_t t0 = dev.tra_row(0), t1 = dev.tra_row(1), t2 = dev.tra_row(2);
  dev.aap(0, 0, RowGroup::single(2), group({t0, t1, t2}));
  for (auto t : {t0, t1, t2}) ref.aap(0, 0, RowGroup::single(2), RowGroup::single(t));
  for (auto t : {t0, t1, t2}) CHECK(dev.peek({0, 0, t}) == ref.peek({0, 0, t}));
  CHECK(dev.state_digest() == ref.state_digest());
  CHECK(dev.trace().count(CommandKind::Aap) == 1);
}

TEST_CASE("PSM transfer between banks") {
  auto dev = small_device(1, 1024);
  std::mt19937 rng(7);
  const BitRow p = oracle::to_row(oracle::random_bits(1024, rng));
  dev.store_row({0, 0, 1}, p);
  dev.activate({0, 0, 1});
  dev.activate({1, 0, 2});
  dev.transfer(0, 1, {0, 512});
  dev.precharge(0);
  dev.precharge(1);
  CHECK(dev.peek({1, 0, 2}).slice(0, 512) == p.slice(0, 512));
  CHECK(dev.peek({1, 0, 2}).slice(512, 1024).all_equal(false));
  dev.activate({0, 0, 1});
  CHECK(code_of([&] { dev.transfer(0, 0, {0, 512}); }) == ErrorCode::SameBank);
}

TEST_CASE("every command appends one trace entry") {
  auto dev = small_device();
  std::size_t n = dev.trace().size();
  auto step = [&](auto&& f) {
    f();
    CHECK(dev.trace().size() == ++n);
  };
  step([&] { dev.activate({0, 0, 1}); });
  step([&] { dev.read_buffer(0, {0, 8}); });
  step([&] { dev.write_buffer(0, {0, 8}, BitRow(8, true)); });
  step([&] { dev.precharge(0); });
  step([&] { dev.aap(0, 0, RowGroup::single(1), RowGroup::single(2)); });
  step([&] { dev.ap(0, 0, group({dev.tra_row(0), dev.tra_row(1), dev.tra_row(2)})); });
  CHECK(dev.trace().dram_command_count() == 1 + 1 + 1 + 1 + 3 + 2);
}

TEST_CASE("trace text round trip") {
  auto dev = small_device(3, 128);
  std::mt19937 rng(8);
  dev.store_row({0, 0, 1}, oracle::to_row(oracle::random_bits(128, rng)));
  dev.aap(0, 0, RowGroup::single(1), RowGroup{RowRef{dev.dcc_row(1), true}});
  dev.ap(0, 1, group({dev.tra_row(0), dev.tra_row(1), dev.tra_row(2)}));
  dev.activate({0, 0, 1});
  dev.activate({1, 0, 3});
  dev.transfer(0, 1, {0, 64});
  dev.precharge(0);
  dev.precharge(1);
  const std::string text = dev.trace().to_text();
  const CommandTrace parsed = CommandTrace::parse("# comment\n\n" + text);
  CHECK(parsed.to_text() == text);
  CHECK(code_of([] { CommandTrace::parse("0 0 ACT 0\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { CommandTrace::parse("0 0 FLY 1 2\n"); }) == ErrorCode::ParseError);
}

TEST_CASE("replay reproduces the final state, ties included") {
  auto run = [](DramDevice& d) {
    std::mt19937 rng(9);
    for (int i = 0; i < 4; ++i) d.store_row({0, 0, d.tra_row(i)}, oracle::to_row(oracle::random_bits(256, rng)));
    d.multi_activate(0, 0, group({d.tra_row(0), d.tra_row(1), d.tra_row(2), d.tra_row(3)}));
    d.precharge(0);
    d.multi_activate(0, 0, group({20, 21, 22, 23}));
    d.precharge(0);
    d.aap(0, 0, RowGroup::single(d.tra_row(0)), RowGroup::single(30));
  };
  auto a = small_device(42), b = small_device(42);
  run(a);
  run(b);
  CHECK(a.state_digest() == b.state_digest());
  CHECK(a.trace().to_text() == b.trace().to_text());

  auto fresh = small_device(42);
  replay(fresh, CommandTrace::parse(a.trace().to_text()));
  CHECK(fresh.state_digest() == a.state_digest());
  for (std::uint32_t r = 0; r < 64; ++r) CHECK(fresh.peek({0, 0, r}) == a.peek({0, 0, r}));

  auto other = small_device(43);
  replay(other, a.trace());
  CHECK(other.state_digest() != a.state_digest());  // the 2-2 ties differ
}
