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

#include <cmath>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "pumsim/bench.hpp"
#include "pumsim/error.hpp"
#include "pumsim/perf.hpp"
#include "pumsim/security.hpp"

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

CommandTrace act_pre() {
  CommandTrace t;
  t.append(cmd::Act{0, 0, RowGroup::single(3)});
  t.append(cmd::Pre{0});
  return t;
}

CommandTrace one_aap() {
  CommandTrace t;
  t.append(cmd::Aap{0, 0, RowGroup::single(0), RowGroup::single(1)});
  return t;
}

CommandTrace concat(const CommandTrace& a, const CommandTrace& b) {
  CommandTrace t = a;
  for (const auto& c : b.entries()) t.append(c);
  return t;
}

// Small mixed trace touching every cost-table entry that needs no data.
CommandTrace mixed() {
  CommandTrace t = act_pre();
  t.append(cmd::Act{1, 0, RowGroup::single(0)});
  t.append(cmd::Rd{1, {0, 1024}});
  t.append(cmd::Xfer{1, 2, {0, 512}});
  t.append(cmd::Rdx{1, {0, 513}, ReducedTiming::Trcd});
  t.append(cmd::Pre{1});
  t.append(cmd::Ap{0, 0, RowGroup{{0, false}, {1, false}, {2, false}}});
  t.append(cmd::ChipRd{0, 1, 0});
  return t;
}

const Config defaults{};

}  // namespace

TEST_CASE("latency: empty, ACT+PRE and additivity") {
  const auto& tm = defaults.timing;
  const auto& g = defaults.geometry;
  CHECK(latency_of(CommandTrace{}, tm, g) == 0.0);
  CHECK(latency_of(act_pre(), tm, g) == doctest::Approx(35.0 + 13.75));
  CHECK(latency_of(one_aap(), tm, g) == doctest::Approx(2 * 35.0 + 13.75));

  const CommandTrace m = mixed();
  CHECK(latency_of(concat(m, one_aap()), tm, g) ==
        doctest::Approx(latency_of(m, tm, g) + latency_of(one_aap(), tm, g)));

  // 48.75 + 48.75 + RD(2 beats) + XFER(1) + RDX(2) + AP + CHIP_RD
  const double want = 48.75 + 35.0 + 5.0 * 2 + 5.0 + 5.0 * 2 + 13.75 + (35.0 + 13.75) + 5.0;
  CHECK(latency_of(m, tm, g) == doctest::Approx(want));
  CHECK(latency_of(m, tm, g, 4) == doctest::Approx(want / 4));
}

TEST_CASE("energy: empty, one AAP and doubling") {
  const auto& en = defaults.energy;
  const auto& g = defaults.geometry;
  CHECK(energy_of(CommandTrace{}, en, g) == 0.0);
  CHECK(energy_of(one_aap(), en, g) == doctest::Approx(2 * 16000.0 + 8000.0));
  const CommandTrace m = mixed();
  CHECK(energy_of(concat(m, m), en, g) == doctest::Approx(2 * energy_of(m, en, g)));

  CommandTrace rd;
  rd.append(cmd::Rd{0, {0, 32768}});
  CHECK(energy_of(rd, en, g) == doctest::Approx(64 * 500.0 + 32768 * 40.0));
  CommandTrace x;
  x.append(cmd::Xfer{0, 1, {0, 32768}});
  CHECK(energy_of(x, en, g) == doctest::Approx(64 * 500.0));
}

TEST_CASE("column beats round up to whole bursts") {
  const auto& g = defaults.geometry;
  CHECK(column_beats({0, 1}, g) == 1);
  CHECK(column_beats({0, 512}, g) == 1);
  CHECK(column_beats({0, 513}, g) == 2);
  CHECK(column_beats({100, 100 + 32768 - 100}, g) == 64);
}

TEST_CASE("baseline examples") {
  const auto& c = defaults;
  CHECK(channel_crossings(BaselineOp::Copy) == 2);
  CHECK(channel_crossings(BaselineOp::Bitwise) == 3);
  CHECK(channel_crossings(BaselineOp::Init) == 1);

  // 64 bytes copied: 1024 bit-crossings, 16 beats, 8 words.
  const Cost copy64 = baseline_cost(BaselineOp::Copy, 64, c.baseline, c.timing, c.energy);
  CHECK(copy64.pj == doctest::Approx(1024 * 40.0 + 8 * 700.0));
  CHECK(copy64.ns == doctest::Approx(330.0 + 16 * 0.625));

  // AND of two 4 KiB sources: 3 x 4096 bytes over the channel.
  const Cost and4k = baseline_cost(BaselineOp::Bitwise, 4096, c.baseline, c.timing, c.energy);
  CHECK(and4k.pj == doctest::Approx(3 * 4096 * 8 * 40.0 + 512 * 700.0));
  CHECK(and4k.ns == doctest::Approx(330.0 + 3 * 4096 * 8 / 64 * 0.625));

  const Cost c4 = baseline_cost(BaselineOp::Copy, 4096, c.baseline, c.timing, c.energy);
  const Cost c8 = baseline_cost(BaselineOp::Copy, 8192, c.baseline, c.timing, c.energy);
  CHECK(c8.ns == doctest::Approx(2 * c4.ns - c.baseline.fixed_latency));
  CHECK(c8.pj == doctest::Approx(2 * c4.pj));

  CHECK(code_of([&] { baseline_cost(BaselineOp::Copy, 0, c.baseline, c.timing, c.energy); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("bulk-copy 4 KiB is one AAP with frozen ratios") {
  const Report r = run_benchmark("bulk-copy", 4096, defaults);
  CHECK(r.correct);
  REQUIRE(r.pum_commands.size() == 1);
  CHECK(r.pum_commands[0].first == "AAP");
  CHECK(r.pum_commands[0].second == 1);
  CHECK(r.pum_dram_commands == 3);
  REQUIRE(r.baseline);
  CHECK(r.pum.ns == doctest::Approx(83.75));
  CHECK(r.baseline->ns == doctest::Approx(970.0));
  CHECK(r.pum.pj == doctest::Approx(40000.0));
  CHECK(r.baseline->pj == doctest::Approx(2979840.0));
  CHECK(*r.latency_ratio() == doctest::Approx(970.0 / 83.75));
  CHECK(*r.energy_ratio() == doctest::Approx(74.496));
}

TEST_CASE("bulk-and 4 KiB frozen energy") {
  const Report r = run_benchmark("bulk-and", 4096, defaults);
  CHECK(r.correct);
  CHECK(r.pum.pj == doctest::Approx(184000.0));
  CHECK(r.baseline->pj == doctest::Approx(4290560.0));
}

TEST_CASE("corrupted oracle and unknown names are rejected") {
  BenchOptions o;
  o.corrupt_oracle = true;
  for (const char* name : {"bulk-and", "bulk-copy", "vector-add", "strided-gather", "trng-quac"})
    CHECK_MESSAGE(code_of([&] { run_benchmark(name, 4096, defaults, o); }) == ErrorCode::CorrectnessMismatch, name);
  CHECK(code_of([] { run_benchmark("bulk-frobnicate", 4096, defaults); }) == ErrorCode::UnknownBenchmark);
  BenchOptions too_many;
  too_many.banks = 9;
  CHECK(code_of([&] { run_benchmark("bulk-and", 4096, defaults, too_many); }) == ErrorCode::OutOfRange);
}

TEST_CASE("vector-add w16 over 8192 lanes") {
  BenchOptions o;
  o.width = 16;
  const Report r = run_benchmark("vector-add", 8192, defaults, o);
  CHECK(r.correct);
  CHECK(r.size_unit == "lanes");
  CHECK(r.pum_dram_commands == 417);
}

TEST_CASE("ratios are recomputable from the record") {
  for (const auto& name : benchmark_names()) {
    BenchOptions o;
    o.width = 8;
    const std::uint64_t size = name.starts_with("trng") ? 4096 : name.starts_with("vector") ? 1000 : 8192;
    const auto j = nlohmann::json::parse(run_benchmark(name, size, defaults, o).to_json());
    CAPTURE(name);
    CHECK(j["correct"] == true);
    if (j["baseline"].is_null()) {
      CHECK(j["ratios"].is_null());
      continue;
    }
    const double pl = j["pum"]["latency_ns"], pe = j["pum"]["energy_pj"];
    const double bl = j["baseline"]["latency_ns"], be = j["baseline"]["energy_pj"];
    CHECK(double(j["ratios"]["latency"]) == doctest::Approx(bl / pl).epsilon(1e-12));
    CHECK(double(j["ratios"]["energy"]) == doctest::Approx(be / pe).epsilon(1e-12));
  }
}

TEST_CASE("reports and traces are deterministic") {
  for (const char* name : {"bulk-xor", "vector-mul", "strided-gather", "trng-drange", "trng-quac"}) {
    BenchOptions o;
    o.width = 8;
    const Report a = run_benchmark(name, 2048, defaults, o);
    const Report b = run_benchmark(name, 2048, defaults, o);
    CAPTURE(name);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.trace.to_text() == b.trace.to_text());
  }
}

TEST_CASE("cost is independent of data values") {
  Config other = defaults;
  other.seed = 99;
  for (const char* name : {"bulk-nand", "vector-relu"}) {
    const Report a = run_benchmark(name, 8192, defaults);
    const Report b = run_benchmark(name, 8192, other);
    CAPTURE(name);
    CHECK(a.state_digest != b.state_digest);
    CHECK(a.pum.ns == b.pum.ns);
    CHECK(a.pum.pj == b.pum.pj);
  }
}

TEST_CASE("bank-parallel throughput scales exactly") {
  const std::uint64_t bytes = 8 * 4096;
  BenchOptions one, eight;
  eight.banks = 8;
  const Report a = run_benchmark("bulk-and", bytes, defaults, one);
  const Report b = run_benchmark("bulk-and", bytes, defaults, eight);
  CHECK(a.active_banks == 1);
  CHECK(b.active_banks == 8);
  CHECK(a.pum.pj == b.pum.pj);
  CHECK(bytes / b.pum.ns == 8 * (bytes / a.pum.ns));
}

TEST_CASE("parse_size") {
  CHECK(parse_size("4096") == 4096);
  CHECK(parse_size("4K") == 4096);
  CHECK(parse_size("4KiB") == 4096);
  CHECK(parse_size("2MiB") == 2u << 20);
  CHECK(code_of([] { parse_size("four"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { parse_size("4Q"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("replaying a report trace reproduces the final state") {
  for (const char* name : {"bulk-copy", "bulk-xnor", "vector-sub", "vector-gt", "strided-gather", "trng-drange",
                           "trng-quac"}) {
    BenchOptions o;
    o.width = 8;
    const Report r = run_benchmark(name, 4096, defaults, o);
    DramDevice dev(defaults);
    dev.attach_classifier(profile_device(defaults.seed, defaults.geometry, defaults.security.fractions));
    replay(dev, CommandTrace::parse(r.trace.to_text()));
    CAPTURE(name);
    CHECK(dev.state_digest() == r.state_digest);
    CHECK(dev.trace().size() == r.trace.size());
  }
}
