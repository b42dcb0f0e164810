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

// Exercises the shared library through pumsim.h only.

#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "pumsim/pumsim.h"

namespace {

struct Config {
  pumsim_config* p = nullptr;
  explicit Config(const char* ini = nullptr) {
    REQUIRE((ini ? pumsim_config_parse(ini, &p) : pumsim_config_default(&p)) == PUMSIM_OK);
  }
  ~Config() { pumsim_config_free(p); }
};

struct Device {
  pumsim_device* p = nullptr;
  explicit Device(const Config& c) { REQUIRE(pumsim_device_create(c.p, &p) == PUMSIM_OK); }
  ~Device() { pumsim_device_destroy(p); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  pumsim_string_free(s);
  return out;
}

const char* small_ini = "[geometry]\ncolumns_per_row = 1024\nrows_per_subarray = 128\n";

}  // namespace

TEST_CASE("status names and last error") {
  CHECK(std::string(pumsim_status_name(PUMSIM_OK)) == "Ok");
  CHECK(std::string(pumsim_status_name(PUMSIM_CORRECTNESS_MISMATCH)) == "CorrectnessMismatch");
  CHECK(std::strlen(pumsim_version()) > 0);

  pumsim_config* c = nullptr;
  CHECK(pumsim_config_parse("[geometry]\ncolumns_per_row = 0\n", &c) != PUMSIM_OK);
  CHECK(c == nullptr);
  CHECK(std::strlen(pumsim_last_error()) > 0);
  CHECK(pumsim_config_parse("[nosuch]\nx = 1\n", &c) == PUMSIM_CONFIG_ERROR);
  CHECK(pumsim_config_load("/nonexistent/pumsim.ini", &c) != PUMSIM_OK);
}

TEST_CASE("null arguments are rejected") {
  CHECK(pumsim_config_default(nullptr) == PUMSIM_INVALID_ARGUMENT);
  CHECK(pumsim_device_create(nullptr, nullptr) == PUMSIM_INVALID_ARGUMENT);
  size_t n = 0;
  CHECK(pumsim_device_row_bytes(nullptr, &n) == PUMSIM_INVALID_ARGUMENT);
  CHECK(pumsim_bench_run(nullptr, "bulk-copy", 4096, nullptr, nullptr, nullptr, nullptr) == PUMSIM_INVALID_ARGUMENT);
  pumsim_config_free(nullptr);
  pumsim_device_destroy(nullptr);
  pumsim_string_free(nullptr);
}

TEST_CASE("default config digest and ini round trip") {
  Config a;
  char d1[17], d2[17];
  REQUIRE(pumsim_config_digest(a.p, d1) == PUMSIM_OK);
  CHECK(std::string(d1) == "2812926cfa28a070");

  char* ini = nullptr;
  REQUIRE(pumsim_config_to_ini(a.p, &ini) == PUMSIM_OK);
  Config b(ini);
  pumsim_string_free(ini);
  REQUIRE(pumsim_config_digest(b.p, d2) == PUMSIM_OK);
  CHECK(std::string(d1) == d2);

  REQUIRE(pumsim_config_set_seed(b.p, 7) == PUMSIM_OK);
  REQUIRE(pumsim_config_digest(b.p, d2) == PUMSIM_OK);
  CHECK(std::string(d1) != d2);
}

TEST_CASE("row write, read, clone and bitwise") {
  Config c(small_ini);
  Device d(c);
  size_t bytes = 0;
  REQUIRE(pumsim_device_row_bytes(d.p, &bytes) == PUMSIM_OK);
  REQUIRE(bytes == 128);

  std::mt19937 rng(5);
  std::vector<std::uint8_t> a(bytes), b(bytes), got(bytes);
  for (auto& x : a) x = std::uint8_t(rng());
  for (auto& x : b) x = std::uint8_t(rng());
  REQUIRE(pumsim_write_row(d.p, 0, 0, 0, a.data(), bytes) == PUMSIM_OK);
  REQUIRE(pumsim_write_row(d.p, 0, 0, 1, b.data(), bytes) == PUMSIM_OK);
  REQUIRE(pumsim_read_row(d.p, 0, 0, 0, got.data(), bytes) == PUMSIM_OK);
  CHECK(got == a);
  CHECK(pumsim_write_row(d.p, 0, 0, 0, a.data(), bytes - 1) == PUMSIM_OUT_OF_RANGE);

  size_t before = 0, after = 0;
  REQUIRE(pumsim_device_trace_length(d.p, &before) == PUMSIM_OK);
  REQUIRE(pumsim_rowclone_fpm(d.p, 0, 0, 0, 5) == PUMSIM_OK);
  REQUIRE(pumsim_device_trace_length(d.p, &after) == PUMSIM_OK);
  CHECK(after - before == 1);
  double ns = 0, pj = 0;
  REQUIRE(pumsim_device_cost(d.p, before, &ns, &pj) == PUMSIM_OK);
  CHECK(ns == doctest::Approx(83.75));
  CHECK(pj == doctest::Approx(40000.0));
  REQUIRE(pumsim_read_row(d.p, 0, 0, 5, got.data(), bytes) == PUMSIM_OK);
  CHECK(got == a);

  REQUIRE(pumsim_bitwise(d.p, 0, 0, "xor", 0, 1, 6) == PUMSIM_OK);
  REQUIRE(pumsim_read_row(d.p, 0, 0, 6, got.data(), bytes) == PUMSIM_OK);
  for (size_t i = 0; i < bytes; ++i) CHECK(got[i] == std::uint8_t(a[i] ^ b[i]));
  REQUIRE(pumsim_bitwise(d.p, 0, 0, "not", 0, -1, 7) == PUMSIM_OK);
  REQUIRE(pumsim_read_row(d.p, 0, 0, 7, got.data(), bytes) == PUMSIM_OK);
  for (size_t i = 0; i < bytes; ++i) CHECK(got[i] == std::uint8_t(~a[i]));
  CHECK(pumsim_bitwise(d.p, 0, 0, "and", 0, -1, 7) == PUMSIM_MISSING_OPERAND);
  CHECK(pumsim_bitwise(d.p, 0, 0, "implies", 0, 1, 7) == PUMSIM_INVALID_ARGUMENT);

  REQUIRE(pumsim_row_init(d.p, 0, 0, 8, 1) == PUMSIM_OK);
  REQUIRE(pumsim_read_row(d.p, 0, 0, 8, got.data(), bytes) == PUMSIM_OK);
  for (auto x : got) CHECK(x == 0xff);

  REQUIRE(pumsim_rowclone_psm(d.p, 0, 0, 0, 1, 0, 0, bytes) == PUMSIM_OK);
  REQUIRE(pumsim_read_row(d.p, 1, 0, 0, got.data(), bytes) == PUMSIM_OK);
  CHECK(got == a);
}

TEST_CASE("simd add through the C API") {
  Config c(small_ini);
  Device d(c);
  std::mt19937_64 rng(11);
  const size_t lanes = 1000;
  std::vector<uint64_t> a(lanes), b(lanes), out(lanes);
  for (auto& x : a) x = rng() & 0xff;
  for (auto& x : b) x = rng() & 0xff;
  REQUIRE(pumsim_simd_run(d.p, "add", 8, 0, 0, a.data(), b.data(), lanes, out.data()) == PUMSIM_OK);
  for (size_t i = 0; i < lanes; ++i) CHECK(out[i] == ((a[i] + b[i]) & 0xff));
  CHECK(pumsim_simd_run(d.p, "add", 8, 0, 0, a.data(), b.data(), 2000, out.data()) == PUMSIM_TOO_MANY_LANES);

  char* text = nullptr;
  REQUIRE(pumsim_compile(c.p, "add", 8, &text) == PUMSIM_OK);
  CHECK(take(text).find("AAP") != std::string::npos);
}

TEST_CASE("gather through the C API") {
  Config c;
  Device d(c);
  std::vector<uint64_t> v(4096);
  for (size_t i = 0; i < v.size(); ++i) v[i] = i;
  REQUIRE(pumsim_gs_store(d.p, 0, 0, 0, v.data(), v.size()) == PUMSIM_OK);
  uint64_t out[8];
  size_t n = 0;
  REQUIRE(pumsim_gs_gather(d.p, 0, 0, 0, v.size(), 4, 2, out, 8, &n) == PUMSIM_OK);
  REQUIRE(n == 8);
  for (size_t k = 0; k < 8; ++k) CHECK(out[k] == 2 + 4 * k);
  CHECK(pumsim_gs_gather(d.p, 0, 0, 0, v.size(), 3, 0, out, 8, &n) == PUMSIM_UNSUPPORTED_PATTERN);
  CHECK(pumsim_gs_gather(d.p, 0, 0, 0, v.size(), 4, 2, out, 4, &n) == PUMSIM_OUT_OF_RANGE);
}

TEST_CASE("puf and trng through the C API") {
  Config c(small_ini);
  char* h1 = nullptr;
  char* h2 = nullptr;
  {
    Device d(c);
    REQUIRE(pumsim_puf(d.p, 0, 0, 0, 4, 0, &h1) == PUMSIM_OK);
    REQUIRE(pumsim_puf(d.p, 0, 0, 0, 4, 0, &h2) == PUMSIM_OK);
  }
  const std::string a = take(h1), b = take(h2);
  CHECK(a.size() == 4 * 1024 / 4);
  CHECK(a == b);

  Device d(c);
  std::vector<uint8_t> bytes(32);
  REQUIRE(pumsim_trng(d.p, "quac", 256, 0, bytes.data(), bytes.size()) == PUMSIM_OK);
  REQUIRE(pumsim_trng(d.p, "drange", 256, 0, bytes.data(), bytes.size()) == PUMSIM_OK);
  CHECK(pumsim_trng(d.p, "quac", 257, 0, bytes.data(), bytes.size()) == PUMSIM_OUT_OF_RANGE);
  CHECK(pumsim_trng(d.p, "lava-lamp", 8, 0, bytes.data(), bytes.size()) == PUMSIM_INVALID_ARGUMENT);
}

TEST_CASE("bench_run json and trace replay") {
  Config c;
  pumsim_bench_options o;
  pumsim_bench_options_default(&o);
  CHECK(o.width == 16);
  CHECK(o.banks == 1);

  char* json = nullptr;
  char* table = nullptr;
  char* trace = nullptr;
  REQUIRE(pumsim_bench_run(c.p, "bulk-copy", 4096, &o, &json, &table, &trace) == PUMSIM_OK);
  const auto j = nlohmann::json::parse(take(json));
  CHECK(j["correct"] == true);
  CHECK(j["pum"]["commands"]["AAP"] == 1);
  CHECK(double(j["ratios"]["latency"]) == doctest::Approx(970.0 / 83.75));
  CHECK(take(table).find("bulk-copy") != std::string::npos);

  uint64_t digest = 0;
  REQUIRE(pumsim_trace_replay(c.p, trace, &digest) == PUMSIM_OK);
  pumsim_string_free(trace);
  CHECK(j["state_digest"] == [&] {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    return std::string(buf);
  }());

  o.corrupt_oracle = 1;
  json = nullptr;
  CHECK(pumsim_bench_run(c.p, "bulk-and", 4096, &o, &json, nullptr, nullptr) == PUMSIM_CORRECTNESS_MISMATCH);
  CHECK(json == nullptr);
  CHECK(pumsim_bench_run(c.p, "bulk-frob", 4096, nullptr, nullptr, nullptr, nullptr) == PUMSIM_UNKNOWN_BENCHMARK);
  CHECK(pumsim_trace_replay(c.p, "0 0 FLY 1 2\n", &digest) == PUMSIM_PARSE_ERROR);

  uint64_t n = 0;
  REQUIRE(pumsim_parse_size("2KiB", &n) == PUMSIM_OK);
  CHECK(n == 2048);
}
