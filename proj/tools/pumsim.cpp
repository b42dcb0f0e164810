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

// pumsim command-line driver. Talks to the simulator only through pumsim.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pumsim/pumsim.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitMismatch = 3;

struct Failure {
  pumsim_status status;
};

void check(pumsim_status s) {
  if (s != PUMSIM_OK) throw Failure{s};
}

struct CStr {
  char* p = nullptr;
  ~CStr() { pumsim_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

using ConfigPtr = std::unique_ptr<pumsim_config, decltype(&pumsim_config_free)>;
using DevicePtr = std::unique_ptr<pumsim_device, decltype(&pumsim_device_destroy)>;

ConfigPtr load(const std::string& path, const std::string& seed) {
  pumsim_config* c = nullptr;
  check(path.empty() ? pumsim_config_default(&c) : pumsim_config_load(path.c_str(), &c));
  ConfigPtr cfg(c, &pumsim_config_free);
  if (!seed.empty()) check(pumsim_config_set_seed(cfg.get(), std::stoull(seed, nullptr, 0)));
  return cfg;
}

DevicePtr device(const pumsim_config* cfg) {
  pumsim_device* d = nullptr;
  check(pumsim_device_create(cfg, &d));
  return DevicePtr(d, &pumsim_device_destroy);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text, bool append = false) {
  std::ofstream out(path, append ? std::ios::app | std::ios::binary : std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string hex(const std::vector<std::uint8_t>& bytes) {
  static const char* d = "0123456789abcdef";
  std::string s;
  for (auto b : bytes) {
    s += d[b >> 4];
    s += d[b & 15];
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Processing-using-DRAM simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", pumsim_version());

  std::string config_path, seed;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override the configured seed");

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark against the baseline model");
  std::string bench_name, size_text = "4KiB", out_path, trace_path;
  pumsim_bench_options bopts;
  pumsim_bench_options_default(&bopts);
  bool corrupt = false, json_only = false;
  bench->add_option("name", bench_name,
                    "bulk-{copy,init,not,and,or,nand,nor,xor,xnor}, vector-{add,sub,mul,relu,gt}, strided-gather, "
                    "trng-{drange,quac}")
      ->required();
  bench->add_option("--size", size_text, "bytes (bulk), lanes (vector), elements (gather) or bits (trng)");
  bench->add_option("--out", out_path, "append the JSON record to this file");
  bench->add_option("--width", bopts.width, "vector element width")->check(CLI::Range(2, 64));
  bench->add_option("--banks", bopts.banks, "banks used in parallel");
  bench->add_option("--stride", bopts.stride, "strided-gather stride");
  bench->add_option("--trace", trace_path, "write the full command trace here");
  bench->add_flag("--corrupt-oracle", corrupt, "flip one expected bit (self-test)");
  bench->add_flag("--json", json_only, "print the JSON record instead of the table");

  // trace-replay
  auto* replay = app.add_subcommand("trace-replay", "replay a trace and print the final state digest");
  std::string replay_path, expect;
  replay->add_option("file", replay_path)->required()->check(CLI::ExistingFile);
  replay->add_option("--expect", expect, "fail unless the digest equals this value");

  // puf
  auto* puf = app.add_subcommand("puf", "evaluate the latency PUF over a region");
  std::uint32_t puf_bank = 0, puf_sub = 0, puf_row = 0, puf_rows = 8, puf_reads = 0;
  puf->add_option("--bank", puf_bank, "bank holding the region");
  puf->add_option("--subarray", puf_sub, "subarray holding the region");
  puf->add_option("--row", puf_row, "first row of the region");
  puf->add_option("--rows", puf_rows, "rows in the region");
  puf->add_option("--reads", puf_reads, "reduced-latency reads per row (0 = configured)");

  // trng
  auto* trng = app.add_subcommand("trng", "generate random bits");
  std::string mode = "drange", trng_out;
  std::uint64_t bits = 1024;
  bool whiten = false;
  trng->add_option("--mode", mode)->check(CLI::IsMember({"drange", "quac"}));
  trng->add_option("--bits", bits)->check(CLI::PositiveNumber);
  trng->add_option("--out", trng_out, "write raw binary here instead of hex to stdout");
  trng->add_flag("--whiten", whiten, "post-process QUAC blocks");

  // gather
  auto* gather = app.add_subcommand("gather", "GS-DRAM strided gather over A[i] = i");
  std::uint64_t stride = 1, base = 0, elements = 4096;
  gather->add_option("--stride", stride)->required();
  gather->add_option("--base", base)->required();
  gather->add_option("--elements", elements);

  // compile
  auto* compile = app.add_subcommand("compile", "print the SIMD microprogram for an op");
  std::string op;
  std::uint32_t width = 8;
  compile->add_option("op", op, "add, sub, mul, relu, gt")->required();
  compile->add_option("--width", width)->check(CLI::Range(2, 64));

  CLI11_PARSE(app, argc, argv);

  try {
    ConfigPtr cfg = load(config_path, seed);

    if (*bench) {
      std::uint64_t size = 0;
      check(pumsim_parse_size(size_text.c_str(), &size));
      bopts.corrupt_oracle = corrupt ? 1 : 0;
      CStr json, table, trace;
      check(pumsim_bench_run(cfg.get(), bench_name.c_str(), size, &bopts, &json.p, &table.p,
                             trace_path.empty() ? nullptr : &trace.p));
      std::cout << (json_only ? json.str() + "\n" : table.str());
      if (!out_path.empty()) spit(out_path, json.str() + "\n", true);
      if (!trace_path.empty()) spit(trace_path, trace.str());
    } else if (*replay) {
      std::uint64_t digest = 0;
      check(pumsim_trace_replay(cfg.get(), slurp(replay_path).c_str(), &digest));
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
      std::cout << buf << '\n';
      if (!expect.empty() && expect != buf) {
        std::cerr << "state digest mismatch: expected " << expect << '\n';
        return kExitMismatch;
      }
    } else if (*puf) {
      DevicePtr dev = device(cfg.get());
      CStr h;
      check(pumsim_puf(dev.get(), puf_bank, puf_sub, puf_row, puf_rows, puf_reads, &h.p));
      std::cout << h.str() << '\n';
    } else if (*trng) {
      DevicePtr dev = device(cfg.get());
      std::vector<std::uint8_t> buf((bits + 7) / 8);
      check(pumsim_trng(dev.get(), mode.c_str(), bits, whiten ? 1 : 0, buf.data(), buf.size()));
      if (trng_out.empty())
        std::cout << hex(buf) << '\n';
      else
        spit(trng_out, std::string(buf.begin(), buf.end()));
    } else if (*gather) {
      DevicePtr dev = device(cfg.get());
      std::vector<std::uint64_t> values(elements);
      for (std::uint64_t i = 0; i < elements; ++i) values[i] = i;
      check(pumsim_gs_store(dev.get(), 0, 0, 0, values.data(), values.size()));
      std::size_t before = 0, after = 0, n = 0;
      check(pumsim_device_trace_length(dev.get(), &before));
      std::vector<std::uint64_t> out(64);
      check(pumsim_gs_gather(dev.get(), 0, 0, 0, elements, stride, base, out.data(), out.size(), &n));
      check(pumsim_device_trace_length(dev.get(), &after));
      bool ok = true;
      for (std::size_t k = 0; k < n; ++k) {
        std::cout << (k ? " " : "") << out[k];
        ok = ok && out[k] == base + k * stride;
      }
      std::cout << "\ncommands " << after - before << '\n';
      if (!ok) {
        std::cerr << "gather result differs from A[base + k * stride]\n";
        return kExitMismatch;
      }
    } else if (*compile) {
      CStr text;
      check(pumsim_compile(cfg.get(), op.c_str(), width, &text.p));
      std::cout << text.str();
    }
  } catch (const Failure& f) {
    std::cerr << "pumsim: " << pumsim_last_error() << '\n';
    return f.status == PUMSIM_CORRECTNESS_MISMATCH ? kExitMismatch : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "pumsim: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
