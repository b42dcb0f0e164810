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

#include "pumsim/bench.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <random>
#include <sstream>

#include "json.hpp"
#include "pumsim/error.hpp"
#include "pumsim/gsdram.hpp"
#include "pumsim/primitives.hpp"
#include "pumsim/security.hpp"
#include "pumsim/simdram.hpp"

namespace pumsim {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ull;
  return h;
}

// Places work items round-robin over banks, then over subarrays, each item
// taking `rows` consecutive data rows.
struct Placer {
  std::uint32_t banks, subarrays, data_rows, rows;

  std::uint64_t per_subarray() const { return rows == 0 ? 0 : data_rows / rows; }
  std::uint64_t capacity() const { return std::uint64_t{banks} * subarrays * per_subarray(); }

  RowAddress at(std::uint64_t item) const {
    const std::uint64_t local = item / banks;
    const std::uint64_t sub = local % subarrays;
    const std::uint64_t slot = local / subarrays;
    return {static_cast<std::uint32_t>(item % banks), static_cast<std::uint32_t>(sub),
            static_cast<std::uint32_t>(slot * rows)};
  }
};

Placer placer(const DramDevice& dev, std::uint32_t banks, std::uint32_t rows, std::uint64_t items, const char* what) {
  Placer p{banks, dev.geometry().subarrays_per_bank, dev.data_rows(), rows};
  if (p.per_subarray() == 0 || items > p.capacity())
    fail(ErrorCode::OutOfRange, std::string(what) + ": workload exceeds the device (" + std::to_string(items) +
                                    " items, capacity " + std::to_string(p.capacity()) + ")");
  return p;
}

void record(Report& r, const CommandTrace& slice, const Config& cfg) {
  for (std::size_t k = 0; k < command_kind_count; ++k) {
    auto kind = static_cast<CommandKind>(k);
    if (slice.count(kind) != 0) r.pum_commands.emplace_back(std::string(mnemonic(kind)), slice.count(kind));
  }
  r.pum_dram_commands = slice.dram_command_count();
  r.pum.ns = latency_of(slice, cfg.timing, cfg.geometry, r.active_banks);
  r.pum.pj = energy_of(slice, cfg.energy, cfg.geometry);
}

void finish(Report& r, DramDevice& dev, std::size_t begin, std::size_t end, const Config& cfg) {
  r.measured_begin = begin;
  r.measured_end = end;
  record(r, dev.trace().slice(begin, end), cfg);
  r.trace = dev.trace();
  r.state_digest = dev.state_digest();
}

void check(Report& r, bool ok) {
  r.correct = ok;
  if (!ok) fail(ErrorCode::CorrectnessMismatch, r.benchmark + ": PUM result differs from oracle");
}

std::uint32_t active(std::uint32_t banks, std::uint64_t items) {
  return static_cast<std::uint32_t>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(banks, items)));
}

BitRow flip0(BitRow b) {
  b.set(0, !b.get(0));
  return b;
}

// bulk-copy, bulk-init, bulk-<op>
void run_bulk(Report& r, std::string_view kind, const Config& cfg, std::mt19937_64& rng) {
  DramDevice dev(cfg);
  const std::uint32_t cols = cfg.geometry.columns_per_row;
  const std::uint64_t items = (r.size + cfg.geometry.row_bytes() - 1) / cfg.geometry.row_bytes();
  r.size_unit = "bytes";
  r.active_banks = active(r.options.banks, items);

  std::optional<BitwiseOpKind> op;
  if (kind != "copy" && kind != "init") op = parse_bitwise_op(kind);
  const std::uint32_t inputs = kind == "init" ? 0 : (op && is_binary(*op)) ? 2 : 1;
  const Placer p = placer(dev, r.active_banks, inputs + 1, items, "bulk");

  std::vector<BitRow> a(items), b(items);
  for (std::uint64_t i = 0; i < items; ++i) {
    const RowAddress base = p.at(i);
    if (inputs >= 1) {
      a[i] = BitRow::random(cols, rng);
      dev.store_row(base, a[i]);
    }
    if (inputs == 2) {
      b[i] = BitRow::random(cols, rng);
      dev.store_row({base.bank, base.subarray, base.row + 1}, b[i]);
    }
  }

  const std::size_t begin = dev.trace().size();
  for (std::uint64_t i = 0; i < items; ++i) {
    const RowAddress base = p.at(i);
    const std::uint32_t dst = base.row + inputs;
    if (kind == "copy")
      rowclone_fpm(dev, base.bank, base.subarray, base.row, dst);
    else if (kind == "init")
      row_init(dev, base.bank, base.subarray, dst, true);
    else
      bulk_bitwise(dev, base.bank, base.subarray, *op, base.row,
                   inputs == 2 ? std::optional<std::uint32_t>(base.row + 1) : std::nullopt, dst);
  }
  finish(r, dev, begin, dev.trace().size(), cfg);

  const BaselineOp bop = kind == "copy"   ? BaselineOp::Copy
                         : kind == "init" ? BaselineOp::Init
                         : inputs == 1    ? BaselineOp::Not
                                          : BaselineOp::Bitwise;
  r.baseline = baseline_cost(bop, r.size, cfg.baseline, cfg.timing, cfg.energy);

  bool ok = true;
  for (std::uint64_t i = 0; i < items && ok; ++i) {
    const RowAddress base = p.at(i);
    BitRow want(cols, kind == "init");
    if (kind == "copy") {
      want = a[i];
    } else if (op) {
      auto wa = a[i].words();
      auto wb = b[i].words();
      auto ww = want.words();
      for (std::size_t w = 0; w < ww.size(); ++w) ww[w] = apply_bitwise(*op, wa[w], inputs == 2 ? wb[w] : 0);
      want.clear_tail();
    }
    if (r.options.corrupt_oracle && i == 0) want = flip0(want);
    ok = dev.peek({base.bank, base.subarray, base.row + inputs}) == want;
  }
  r.extra.emplace_back("rows", double(items));
  r.extra.emplace_back("bytes_per_ns", double(items) * cfg.geometry.row_bytes() / r.pum.ns);
  check(r, ok);
}

// vector-<op>
void run_vector(Report& r, std::string_view kind, const Config& cfg, std::mt19937_64& rng) {
  DramDevice dev(cfg);
  const SimdOpKind op = parse_simd_op(kind);
  const std::uint32_t w = r.options.width;
  const Microprogram prog = build_simd_op(op, w, cfg.compute);
  const std::uint32_t cols = cfg.geometry.columns_per_row;
  const std::uint64_t lanes = r.size;
  if (lanes == 0) fail(ErrorCode::InvalidArgument, "vector benchmark needs at least one lane");
  const std::uint64_t items = (lanes + cols - 1) / cols;
  r.size_unit = "lanes";
  r.active_banks = active(r.options.banks, items);
  const Placer p = placer(dev, r.active_banks, rows_needed(prog), items, "vector");
  const Binding bind0 = default_binding(prog, 0);

  const std::uint64_t mask = w == 64 ? ~0ull : (1ull << w) - 1;
  std::vector<std::uint64_t> a(lanes), b(lanes);
  for (auto& x : a) x = rng() & mask;
  for (auto& x : b) x = rng() & mask;

  auto shifted = [&](std::uint32_t first) {
    Binding bd = bind0;
    for (auto& [_, row] : bd.base_row) row += first;
    bd.scratch_base += first;
    return bd;
  };
  auto chunk = [&](const std::vector<std::uint64_t>& v, std::uint64_t i) {
    const std::uint64_t lo = i * cols, hi = std::min<std::uint64_t>(lanes, lo + cols);
    return std::span<const std::uint64_t>(v.data() + lo, hi - lo);
  };

  for (std::uint64_t i = 0; i < items; ++i) {
    const RowAddress at = p.at(i);
    const Binding bd = shifted(at.row);
    transpose_in(dev, at.bank, at.subarray, bd.base_row.at("a"), chunk(a, i), w);
    if (is_binary(op)) transpose_in(dev, at.bank, at.subarray, bd.base_row.at("b"), chunk(b, i), w);
  }
  const std::size_t begin = dev.trace().size();
  for (std::uint64_t i = 0; i < items; ++i) {
    const RowAddress at = p.at(i);
    execute(dev, prog, at.bank, at.subarray, shifted(at.row));
  }
  const std::size_t end = dev.trace().size();

  bool ok = true;
  const std::uint32_t rw = result_width(op, w);
  for (std::uint64_t i = 0; i < items && ok; ++i) {
    const RowAddress at = p.at(i);
    const Binding bd = shifted(at.row);
    const auto lo = chunk(a, i);
    VerticalVector v{at.bank, at.subarray, bd.base_row.at("r"), rw, static_cast<std::uint32_t>(lo.size()), false};
    const auto got = transpose_out(dev, v);
    for (std::size_t k = 0; k < got.size() && ok; ++k) {
      std::uint64_t want = simd_reference(op, w, a[i * cols + k], b[i * cols + k]);
      if (r.options.corrupt_oracle && i == 0 && k == 0) want ^= 1;
      ok = got[k] == want;
    }
  }
  finish(r, dev, begin, end, cfg);

  const std::uint64_t bytes = (lanes * w + 7) / 8;
  r.baseline = baseline_cost(is_binary(op) ? BaselineOp::Bitwise : BaselineOp::Not, bytes, cfg.baseline, cfg.timing,
                             cfg.energy);
  r.extra.emplace_back("width", double(w));
  r.extra.emplace_back("microprogram_commands", double(prog.dram_command_count()));
  r.extra.emplace_back("lanes_per_ns", double(lanes) / r.pum.ns);
  check(r, ok);
}

void run_gather(Report& r, const Config& cfg, std::mt19937_64& rng) {
  const std::uint32_t chips = cfg.geometry.chips_per_rank;
  const std::uint64_t stride = r.options.stride;
  if (stride == 0 || (stride & (stride - 1)) != 0)
    fail(ErrorCode::UnsupportedPattern, "stride must be a power of two");
  const gsdram::PatternId pat{static_cast<std::uint32_t>(std::countr_zero(stride))};
  gsdram::check_pattern(pat, chips);
  r.size_unit = "elements";
  r.active_banks = 1;

  DramDevice dev(cfg), lin_dev(cfg);
  gsdram::GsRank gs(dev, 0, 0, 0, r.size);
  gsdram::LinearLayout lin(lin_dev, 0, 0, 0, r.size);
  const std::uint32_t ew = gs.element_bits();
  const std::uint64_t mask = ew == 64 ? ~0ull : (1ull << ew) - 1;
  std::vector<std::uint64_t> data(r.size);
  for (auto& x : data) x = rng() & mask;
  gs.store(data);
  lin.store(data);

  const std::size_t begin = dev.trace().size(), lin_begin = lin_dev.trace().size();
  bool ok = true;
  std::uint64_t gathers = 0;
  const std::uint64_t span = stride * (chips - 1);
  for (std::uint64_t base = 0; base + span < r.size; ++base) {
    if (!gsdram::is_legal_base(pat, base, chips)) continue;
    const auto got = gs.gather(pat, base);
    const auto ref = lin.strided_read(pat, base);
    for (std::uint32_t k = 0; k < chips; ++k) {
      std::uint64_t want = data[base + k * stride];
      if (r.options.corrupt_oracle && gathers == 0 && k == 0) want ^= 1;
      ok = ok && got[k] == want && ref[k] == data[base + k * stride];
    }
    ++gathers;
  }
  finish(r, dev, begin, dev.trace().size(), cfg);

  const CommandTrace lin_slice = lin_dev.trace().slice(lin_begin);
  r.baseline = Cost{latency_of(lin_slice, cfg.timing, cfg.geometry), energy_of(lin_slice, cfg.energy, cfg.geometry)};
  r.baseline_commands = lin_slice.count(CommandKind::Rd);
  r.extra.emplace_back("gathers", double(gathers));
  r.extra.emplace_back("stride", double(stride));
  check(r, ok && gathers > 0);
}

void run_trng(Report& r, bool quac, const Config& cfg) {
  DramDevice dev(cfg);
  r.size_unit = "bits";
  r.active_banks = 1;
  if (r.size == 0) fail(ErrorCode::InvalidArgument, "trng benchmark needs at least one bit");
  BitRow bits;
  if (quac) {
    const std::uint64_t iters = (r.size + cfg.geometry.columns_per_row - 1) / cfg.geometry.columns_per_row;
    QuacOutput out = quac_generate(dev, iters);
    bits = out.raw.slice(0, r.size);
    r.extra.emplace_back("iterations", double(iters));
  } else {
    auto profile = profile_device(cfg.seed, cfg.geometry, cfg.security.fractions);
    bits = drange_generate(dev, profile, r.size);
  }
  finish(r, dev, 0, dev.trace().size(), cfg);
  r.extra.emplace_back("ones_fraction", ones_fraction(bits));
  r.extra.emplace_back("serial_correlation", serial_correlation(bits));
  r.extra.emplace_back("bits_per_ns", double(r.size) / r.pum.ns);
  check(r, bits.size() == r.size && !r.options.corrupt_oracle);
}

std::string hex_digest(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::optional<double> Report::latency_ratio() const {
  if (!baseline || pum.ns <= 0) return std::nullopt;
  return baseline->ns / pum.ns;
}

std::optional<double> Report::energy_ratio() const {
  if (!baseline || pum.pj <= 0) return std::nullopt;
  return baseline->pj / pum.pj;
}

std::string Report::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["benchmark"] = benchmark;
  j["size"] = size;
  j["size_unit"] = size_unit;
  j["width"] = options.width;
  j["banks"] = active_banks;
  j["config_digest"] = config_digest;
  j["seed"] = seed;
  ordered_json counts = ordered_json::object();
  for (const auto& [k, v] : pum_commands) counts[k] = v;
  j["pum"] = {{"latency_ns", pum.ns}, {"energy_pj", pum.pj}, {"commands", counts}, {"dram_commands", pum_dram_commands}};
  if (baseline) {
    j["baseline"] = {{"latency_ns", baseline->ns}, {"energy_pj", baseline->pj}, {"cacheline_reads", baseline_commands}};
    j["ratios"] = {{"latency", *latency_ratio()}, {"energy", *energy_ratio()}};
  } else {
    j["baseline"] = nullptr;
    j["ratios"] = nullptr;
  }
  j["correct"] = correct;
  j["state_digest"] = hex_digest(state_digest);
  ordered_json ex = ordered_json::object();
  for (const auto& [k, v] : extra) ex[k] = v;
  j["extra"] = ex;
  return j.dump();
}

std::string Report::to_table() const {
  std::ostringstream os;
  os << "benchmark   " << benchmark << "  (" << size << ' ' << size_unit << ", " << active_banks << " bank"
     << (active_banks == 1 ? "" : "s") << ")\n";
  os << "config      " << config_digest << "  seed " << seed << '\n';
  auto row = [&](const char* label, double a, double b) {
    std::string x = fmt(a);
    x.resize(std::max<std::size_t>(x.size() + 1, 14), ' ');
    os << label << x << fmt(b) << '\n';
  };
  os << "            latency_ns    energy_pj\n";
  row("pum         ", pum.ns, pum.pj);
  if (baseline) {
    row("baseline    ", baseline->ns, baseline->pj);
    row("ratio       ", *latency_ratio(), *energy_ratio());
  }
  os << "commands   ";
  for (const auto& [k, v] : pum_commands) os << ' ' << k << '=' << v;
  os << "  (dram " << pum_dram_commands << ")\n";
  for (const auto& [k, v] : extra) os << k << ' ' << fmt(v) << '\n';
  os << "correct     " << (correct ? "yes" : "no") << '\n';
  return os.str();
}

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names{
      "bulk-copy",  "bulk-init",  "bulk-not",   "bulk-and",   "bulk-or",          "bulk-nand",   "bulk-nor",
      "bulk-xor",   "bulk-xnor",  "vector-add", "vector-sub", "vector-mul",       "vector-relu", "vector-gt",
      "strided-gather", "trng-drange", "trng-quac"};
  return names;
}

std::uint64_t parse_size(std::string_view text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr == text.data()) fail(ErrorCode::InvalidArgument, "bad size: " + std::string(text));
  std::string suffix(ptr, text.data() + text.size());
  for (auto& c : suffix) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::uint64_t mul = 1;
  if (suffix.empty() || suffix == "b")
    mul = 1;
  else if (suffix == "k" || suffix == "kib" || suffix == "kb")
    mul = 1ull << 10;
  else if (suffix == "m" || suffix == "mib" || suffix == "mb")
    mul = 1ull << 20;
  else if (suffix == "g" || suffix == "gib" || suffix == "gb")
    mul = 1ull << 30;
  else
    fail(ErrorCode::InvalidArgument, "bad size suffix: " + std::string(text));
  return v * mul;
}

Report run_benchmark(std::string_view name, std::uint64_t size, const Config& config, const BenchOptions& options) {
  const auto& names = benchmark_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    fail(ErrorCode::UnknownBenchmark, "unknown benchmark: " + std::string(name));
  config.validate();
  if (size == 0) fail(ErrorCode::InvalidArgument, "size must be > 0");
  if (options.banks == 0 || options.banks > config.geometry.banks_per_device)
    fail(ErrorCode::OutOfRange, "banks must be in 1.." + std::to_string(config.geometry.banks_per_device));

  Report r;
  r.benchmark = std::string(name);
  r.size = size;
  r.options = options;
  r.config_digest = config.digest();
  r.seed = config.seed;
  std::mt19937_64 rng(config.seed ^ fnv1a(name));

  if (name.starts_with("bulk-"))
    run_bulk(r, name.substr(5), config, rng);
  else if (name.starts_with("vector-"))
    run_vector(r, name.substr(7), config, rng);
  else if (name == "strided-gather")
    run_gather(r, config, rng);
  else
    run_trng(r, name == "trng-quac", config);
  return r;
}

}  // namespace pumsim
