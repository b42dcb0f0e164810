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

#include "pumsim/pumsim.h"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <span>
#include <string>

#include "pumsim/bench.hpp"
#include "pumsim/config.hpp"
#include "pumsim/dram.hpp"
#include "pumsim/error.hpp"
#include "pumsim/gsdram.hpp"
#include "pumsim/perf.hpp"
#include "pumsim/primitives.hpp"
#include "pumsim/security.hpp"
#include "pumsim/simdram.hpp"

struct pumsim_config {
  pumsim::Config cfg;
};

struct pumsim_device {
  pumsim::Config cfg;
  std::shared_ptr<const pumsim::CellReliabilityProfile> profile;
  pumsim::DramDevice dev;

  explicit pumsim_device(const pumsim::Config& c)
      : cfg(c), profile(pumsim::profile_device(c.seed, c.geometry, c.security.fractions)), dev(c) {
    dev.attach_classifier(profile);
  }
};

namespace {

thread_local std::string last_error;

pumsim_status set_error(pumsim_status s, const char* what) {
  last_error = what;
  return s;
}

template <class F>
pumsim_status guard(F&& f) noexcept {
  last_error.clear();
  try {
    f();
    return PUMSIM_OK;
  } catch (const pumsim::Error& e) {
    return set_error(static_cast<pumsim_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PUMSIM_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PUMSIM_INTERNAL, e.what());
  } catch (...) {
    return set_error(PUMSIM_INTERNAL, "unknown exception");
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) pumsim::fail(pumsim::ErrorCode::InvalidArgument, std::string(name) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void copy_bits(const pumsim::BitRow& bits, std::uint8_t* out, std::size_t len) {
  const auto bytes = bits.to_bytes();
  if (len < bytes.size())
    pumsim::fail(pumsim::ErrorCode::OutOfRange, "output buffer holds " + std::to_string(len) + " bytes, need " +
                                                    std::to_string(bytes.size()));
  std::memcpy(out, bytes.data(), bytes.size());
}

}  // namespace

extern "C" {

const char* pumsim_version(void) { return "0.1.0"; }

const char* pumsim_status_name(pumsim_status status) {
  if (status < PUMSIM_OK || status > PUMSIM_INTERNAL) return "Unknown";
  return pumsim::to_string(static_cast<pumsim::ErrorCode>(status)).data();
}

const char* pumsim_last_error(void) { return last_error.c_str(); }

void pumsim_string_free(char* s) { std::free(s); }

pumsim_status pumsim_config_default(pumsim_config** out) {
  return guard([&] {
    need(out, "out");
    *out = new pumsim_config{};
  });
}

pumsim_status pumsim_config_load(const char* path, pumsim_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new pumsim_config{pumsim::load_config(path)};
  });
}

pumsim_status pumsim_config_parse(const char* ini_text, pumsim_config** out) {
  return guard([&] {
    need(ini_text, "ini_text");
    need(out, "out");
    *out = new pumsim_config{pumsim::parse_config(ini_text)};
  });
}

void pumsim_config_free(pumsim_config* cfg) { delete cfg; }

pumsim_status pumsim_config_set_seed(pumsim_config* cfg, uint64_t seed) {
  return guard([&] {
    need(cfg, "cfg");
    cfg->cfg.seed = seed;
  });
}

pumsim_status pumsim_config_digest(const pumsim_config* cfg, char out[17]) {
  return guard([&] {
    need(cfg, "cfg");
    need(out, "out");
    const std::string d = cfg->cfg.digest();
    std::memcpy(out, d.c_str(), 17);
  });
}

pumsim_status pumsim_config_to_ini(const pumsim_config* cfg, char** out) {
  return guard([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = dup(cfg->cfg.to_ini());
  });
}

pumsim_status pumsim_device_create(const pumsim_config* cfg, pumsim_device** out) {
  return guard([&] {
    need(cfg, "cfg");
    need(out, "out");
    cfg->cfg.validate();
    *out = new pumsim_device(cfg->cfg);
  });
}

void pumsim_device_destroy(pumsim_device* dev) { delete dev; }

pumsim_status pumsim_device_row_bytes(const pumsim_device* dev, size_t* out) {
  return guard([&] {
    need(dev, "dev");
    need(out, "out");
    *out = dev->cfg.geometry.row_bytes();
  });
}

pumsim_status pumsim_device_digest(const pumsim_device* dev, uint64_t* out) {
  return guard([&] {
    need(dev, "dev");
    need(out, "out");
    *out = dev->dev.state_digest();
  });
}

pumsim_status pumsim_device_trace_length(const pumsim_device* dev, size_t* out) {
  return guard([&] {
    need(dev, "dev");
    need(out, "out");
    *out = dev->dev.trace().size();
  });
}

pumsim_status pumsim_device_trace_text(const pumsim_device* dev, char** out) {
  return guard([&] {
    need(dev, "dev");
    need(out, "out");
    *out = dup(dev->dev.trace().to_text());
  });
}

pumsim_status pumsim_device_cost(const pumsim_device* dev, size_t from, double* latency_ns, double* energy_pj) {
  return guard([&] {
    need(dev, "dev");
    if (from > dev->dev.trace().size()) pumsim::fail(pumsim::ErrorCode::OutOfRange, "trace offset past the end");
    const pumsim::CommandTrace t = dev->dev.trace().slice(from);
    if (latency_ns) *latency_ns = pumsim::latency_of(t, dev->cfg.timing, dev->cfg.geometry);
    if (energy_pj) *energy_pj = pumsim::energy_of(t, dev->cfg.energy, dev->cfg.geometry);
  });
}

pumsim_status pumsim_write_row(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t row,
                               const uint8_t* bytes, size_t len) {
  return guard([&] {
    need(dev, "dev");
    need(bytes, "bytes");
    const std::size_t cols = dev->cfg.geometry.columns_per_row;
    if (len != cols / 8) pumsim::fail(pumsim::ErrorCode::OutOfRange, "row data must be exactly one row");
    dev->dev.store_row({bank, subarray, row}, pumsim::BitRow::from_bytes({bytes, len}, cols));
  });
}

pumsim_status pumsim_read_row(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t row, uint8_t* out,
                              size_t len) {
  return guard([&] {
    need(dev, "dev");
    need(out, "out");
    copy_bits(dev->dev.load_row({bank, subarray, row}), out, len);
  });
}

pumsim_status pumsim_rowclone_fpm(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t src_row,
                                  uint32_t dst_row) {
  return guard([&] {
    need(dev, "dev");
    pumsim::rowclone_fpm(dev->dev, bank, subarray, src_row, dst_row);
  });
}

pumsim_status pumsim_rowclone_psm(pumsim_device* dev, uint32_t src_bank, uint32_t src_subarray, uint32_t src_row,
                                  uint32_t dst_bank, uint32_t dst_subarray, uint32_t dst_row, uint64_t bytes) {
  return guard([&] {
    need(dev, "dev");
    pumsim::rowclone_psm(dev->dev, {src_bank, src_subarray, src_row}, {dst_bank, dst_subarray, dst_row}, bytes);
  });
}

pumsim_status pumsim_row_init(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t row, int value) {
  return guard([&] {
    need(dev, "dev");
    pumsim::row_init(dev->dev, bank, subarray, row, value != 0);
  });
}

pumsim_status pumsim_bitwise(pumsim_device* dev, uint32_t bank, uint32_t subarray, const char* op, uint32_t a_row,
                             int64_t b_row, uint32_t dst_row) {
  return guard([&] {
    need(dev, "dev");
    need(op, "op");
    std::optional<std::uint32_t> b;
    if (b_row >= 0) b = static_cast<std::uint32_t>(b_row);
    pumsim::bulk_bitwise(dev->dev, bank, subarray, pumsim::parse_bitwise_op(op), a_row, b, dst_row);
  });
}

pumsim_status pumsim_simd_run(pumsim_device* dev, const char* op, uint32_t width, uint32_t bank, uint32_t subarray,
                              const uint64_t* a, const uint64_t* b, size_t lanes, uint64_t* out) {
  return guard([&] {
    need(dev, "dev");
    need(op, "op");
    need(a, "a");
    need(out, "out");
    const pumsim::SimdOpKind kind = pumsim::parse_simd_op(op);
    if (pumsim::is_binary(kind)) need(b, "b");
    const auto prog = pumsim::build_simd_op(kind, width, dev->cfg.compute);
    std::span<const std::uint64_t> sa(a, lanes), sb;
    if (b) sb = {b, lanes};
    const auto r = pumsim::run_simd(dev->dev, prog, bank, subarray, sa, sb);
    std::copy(r.begin(), r.end(), out);
  });
}

pumsim_status pumsim_compile(const pumsim_config* cfg, const char* op, uint32_t width, char** out) {
  return guard([&] {
    need(cfg, "cfg");
    need(op, "op");
    need(out, "out");
    *out = dup(pumsim::build_simd_op(pumsim::parse_simd_op(op), width, cfg->cfg.compute).to_text());
  });
}

pumsim_status pumsim_gs_store(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t first_row,
                              const uint64_t* values, size_t elements) {
  return guard([&] {
    need(dev, "dev");
    need(values, "values");
    pumsim::gsdram::GsRank rank(dev->dev, bank, subarray, first_row, elements);
    rank.store({values, elements});
  });
}

pumsim_status pumsim_gs_gather(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t first_row,
                               size_t elements, uint64_t stride, uint64_t base, uint64_t* out, size_t capacity,
                               size_t* count) {
  return guard([&] {
    need(dev, "dev");
    need(out, "out");
    if (stride == 0 || (stride & (stride - 1)) != 0)
      pumsim::fail(pumsim::ErrorCode::UnsupportedPattern, "stride must be a power of two");
    pumsim::gsdram::GsRank rank(dev->dev, bank, subarray, first_row, elements);
    if (capacity < rank.chips()) pumsim::fail(pumsim::ErrorCode::OutOfRange, "output buffer too small");
    const auto v = rank.gather({static_cast<std::uint32_t>(std::countr_zero(stride))}, base);
    std::copy(v.begin(), v.end(), out);
    if (count) *count = v.size();
  });
}

pumsim_status pumsim_puf(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t first_row, uint32_t rows,
                         uint32_t reads, char** hex) {
  return guard([&] {
    need(dev, "dev");
    need(hex, "hex");
    const auto resp = pumsim::puf_evaluate(dev->dev, dev->profile, {bank, subarray, first_row, rows},
                                           reads == 0 ? dev->cfg.security.puf_reads : reads);
    *hex = dup(resp.to_hex());
  });
}

pumsim_status pumsim_trng(pumsim_device* dev, const char* mode, uint64_t bits, int whiten, uint8_t* out,
                          size_t len) {
  return guard([&] {
    need(dev, "dev");
    need(mode, "mode");
    need(out, "out");
    const std::string m = mode;
    pumsim::BitRow stream;
    if (m == "drange") {
      stream = pumsim::drange_generate(dev->dev, dev->profile, bits);
    } else if (m == "quac") {
      const std::uint64_t cols = dev->cfg.geometry.columns_per_row;
      const std::uint64_t per_iter = whiten ? cols / 2 : cols;
      const auto q = pumsim::quac_generate(dev->dev, (bits + per_iter - 1) / per_iter);
      stream = (whiten ? q.whitened : q.raw).slice(0, bits);
    } else {
      pumsim::fail(pumsim::ErrorCode::InvalidArgument, "unknown trng mode: " + m);
    }
    copy_bits(stream, out, len);
  });
}

void pumsim_bench_options_default(pumsim_bench_options* opts) {
  if (opts == nullptr) return;
  const pumsim::BenchOptions d;
  opts->width = d.width;
  opts->banks = d.banks;
  opts->stride = d.stride;
  opts->corrupt_oracle = d.corrupt_oracle;
}

pumsim_status pumsim_bench_run(const pumsim_config* cfg, const char* name, uint64_t size,
                               const pumsim_bench_options* opts, char** json, char** table, char** trace) {
  return guard([&] {
    need(cfg, "cfg");
    need(name, "name");
    pumsim::BenchOptions o;
    if (opts) {
      o.width = opts->width;
      o.banks = opts->banks;
      o.stride = opts->stride;
      o.corrupt_oracle = opts->corrupt_oracle != 0;
    }
    const pumsim::Report r = pumsim::run_benchmark(name, size, cfg->cfg, o);
    // Allocate everything before handing anything out.
    std::unique_ptr<char, decltype(&std::free)> j(json ? dup(r.to_json()) : nullptr, &std::free);
    std::unique_ptr<char, decltype(&std::free)> t(table ? dup(r.to_table()) : nullptr, &std::free);
    std::unique_ptr<char, decltype(&std::free)> x(trace ? dup(r.trace.to_text()) : nullptr, &std::free);
    if (json) *json = j.release();
    if (table) *table = t.release();
    if (trace) *trace = x.release();
  });
}

pumsim_status pumsim_parse_size(const char* text, uint64_t* out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = pumsim::parse_size(text);
  });
}

pumsim_status pumsim_trace_replay(const pumsim_config* cfg, const char* trace_text, uint64_t* digest) {
  return guard([&] {
    need(cfg, "cfg");
    need(trace_text, "trace_text");
    pumsim_device d(cfg->cfg);
    pumsim::replay(d.dev, pumsim::CommandTrace::parse(trace_text));
    if (digest) *digest = d.dev.state_digest();
  });
}

}  // extern "C"
