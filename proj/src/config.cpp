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

#include "pumsim/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pumsim/error.hpp"

namespace pumsim {

namespace pt = boost::property_tree;

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    fail(ErrorCode::ConfigError, "bad value for " + key + ": '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(ErrorCode::ConfigError, "bad boolean for " + key + ": '" + text + "'");
}

using Setter = std::function<void(Config&, const std::string&, const std::string&)>;

template <class T, class Field>
Setter number(Field field) {
  return [field](Config& c, const std::string& key, const std::string& text) {
    field(c) = parse_value<T>(key, text);
  };
}

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"device",
       {{"seed", number<std::uint64_t>([](Config& c) -> auto& { return c.seed; })},
        {"quac_row_decoder",
         [](Config& c, const std::string& k, const std::string& t) { c.quac_row_decoder = parse_bool(k, t); }}}},
      {"geometry",
       {{"banks", number<std::uint32_t>([](Config& c) -> auto& { return c.geometry.banks_per_device; })},
        {"subarrays_per_bank", number<std::uint32_t>([](Config& c) -> auto& { return c.geometry.subarrays_per_bank; })},
        {"rows_per_subarray", number<std::uint32_t>([](Config& c) -> auto& { return c.geometry.rows_per_subarray; })},
        {"columns_per_row", number<std::uint32_t>([](Config& c) -> auto& { return c.geometry.columns_per_row; })},
        {"chips_per_rank", number<std::uint32_t>([](Config& c) -> auto& { return c.geometry.chips_per_rank; })},
        {"cacheline_bits", number<std::uint32_t>([](Config& c) -> auto& { return c.geometry.cacheline_bits; })}}},
      {"compute",
       {{"tra_rows", number<std::uint32_t>([](Config& c) -> auto& { return c.compute.tra_rows; })},
        {"dcc_rows", number<std::uint32_t>([](Config& c) -> auto& { return c.compute.dcc_rows; })},
        {"spill_rows", number<std::uint32_t>([](Config& c) -> auto& { return c.compute.spill_rows; })}}},
      {"timing",
       {{"tRCD", number<double>([](Config& c) -> auto& { return c.timing.tRCD; })},
        {"tRAS", number<double>([](Config& c) -> auto& { return c.timing.tRAS; })},
        {"tRP", number<double>([](Config& c) -> auto& { return c.timing.tRP; })},
        {"tCCD", number<double>([](Config& c) -> auto& { return c.timing.tCCD; })},
        {"bus_beat_time", number<double>([](Config& c) -> auto& { return c.timing.bus_beat_time; })}}},
      {"energy",
       {{"e_act", number<double>([](Config& c) -> auto& { return c.energy.e_act; })},
        {"e_pre", number<double>([](Config& c) -> auto& { return c.energy.e_pre; })},
        {"e_internal_beat", number<double>([](Config& c) -> auto& { return c.energy.e_internal_beat; })},
        {"e_bus_bit", number<double>([](Config& c) -> auto& { return c.energy.e_bus_bit; })},
        {"e_cpu_op", number<double>([](Config& c) -> auto& { return c.energy.e_cpu_op; })}}},
      {"baseline",
       {{"channel_bits_per_beat",
         number<std::uint32_t>([](Config& c) -> auto& { return c.baseline.channel_bits_per_beat; })},
        {"fixed_latency", number<double>([](Config& c) -> auto& { return c.baseline.fixed_latency; })}}},
      {"security",
       {{"f_strong", number<double>([](Config& c) -> auto& { return c.security.fractions.strong; })},
        {"f_det", number<double>([](Config& c) -> auto& { return c.security.fractions.det; })},
        {"f_trng", number<double>([](Config& c) -> auto& { return c.security.fractions.trng; })},
        {"puf_reads", number<std::uint32_t>([](Config& c) -> auto& { return c.security.puf_reads; })}}},
  };
  return table;
}

}  // namespace

void validate(const DramGeometry& g, const ComputeLayout& layout) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::InvalidGeometry, what);
  };
  require(g.banks_per_device >= 1, "banks must be >= 1");
  require(g.subarrays_per_bank >= 1, "subarrays_per_bank must be >= 1");
  require(g.rows_per_subarray >= 1, "rows_per_subarray must be >= 1");
  require(g.columns_per_row >= 1, "columns_per_row must be >= 1");
  require(g.chips_per_rank >= 1, "chips_per_rank must be >= 1");
  require(g.cacheline_bits >= 1, "cacheline_bits must be >= 1");
  require(g.cacheline_bits % g.chips_per_rank == 0, "cacheline_bits must divide evenly across chips");
  require(g.columns_per_row % g.element_bits() == 0,
          "columns_per_row must be a multiple of cacheline_bits / chips_per_rank");
  require(layout.tra_rows >= 4, "compute region needs at least 4 TRA rows");
  require(layout.dcc_rows >= 1, "compute region needs at least 1 dual-contact row");
  require(g.rows_per_subarray > layout.region_rows(),
          "rows_per_subarray must exceed the compute region (" + std::to_string(layout.region_rows()) + " rows)");
}

void Config::validate() const {
  pumsim::validate(geometry, compute);
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::ConfigError, what);
  };
  require(timing.tRCD > 0 && timing.tRAS > 0 && timing.tRP > 0 && timing.tCCD > 0 && timing.bus_beat_time > 0,
          "timing parameters must be > 0");
  require(timing.tRAS >= timing.tRCD, "tRAS must be >= tRCD");
  require(energy.e_act >= 0 && energy.e_pre >= 0 && energy.e_internal_beat >= 0 && energy.e_bus_bit >= 0 &&
              energy.e_cpu_op >= 0,
          "energy parameters must be >= 0");
  require(baseline.channel_bits_per_beat > 0, "channel_bits_per_beat must be > 0");
  require(baseline.fixed_latency >= 0, "fixed_latency must be >= 0");
  require(security.puf_reads >= 1, "puf_reads must be >= 1");
  const auto& f = security.fractions;
  if (!(f.strong >= 0 && f.det >= 0 && f.trng >= 0) || std::abs(f.strong + f.det + f.trng - 1.0) > 1e-9)
    fail(ErrorCode::BadFractions, "f_strong + f_det + f_trng must be 1 with each in [0, 1]");
}

std::string Config::to_ini() const {
  std::ostringstream os;
  os << "[device]\n"
     << "seed = " << seed << "\n"
     << "quac_row_decoder = " << (quac_row_decoder ? "true" : "false") << "\n\n"
     << "[geometry]\n"
     << "banks = " << geometry.banks_per_device << "\n"
     << "subarrays_per_bank = " << geometry.subarrays_per_bank << "\n"
     << "rows_per_subarray = " << geometry.rows_per_subarray << "\n"
     << "columns_per_row = " << geometry.columns_per_row << "\n"
     << "chips_per_rank = " << geometry.chips_per_rank << "\n"
     << "cacheline_bits = " << geometry.cacheline_bits << "\n\n"
     << "[compute]\n"
     << "tra_rows = " << compute.tra_rows << "\n"
     << "dcc_rows = " << compute.dcc_rows << "\n"
     << "spill_rows = " << compute.spill_rows << "\n\n"
     << "[timing]\n"
     << "tRCD = " << fmt_double(timing.tRCD) << "\n"
     << "tRAS = " << fmt_double(timing.tRAS) << "\n"
     << "tRP = " << fmt_double(timing.tRP) << "\n"
     << "tCCD = " << fmt_double(timing.tCCD) << "\n"
     << "bus_beat_time = " << fmt_double(timing.bus_beat_time) << "\n\n"
     << "[energy]\n"
     << "e_act = " << fmt_double(energy.e_act) << "\n"
     << "e_pre = " << fmt_double(energy.e_pre) << "\n"
     << "e_internal_beat = " << fmt_double(energy.e_internal_beat) << "\n"
     << "e_bus_bit = " << fmt_double(energy.e_bus_bit) << "\n"
     << "e_cpu_op = " << fmt_double(energy.e_cpu_op) << "\n\n"
     << "[baseline]\n"
     << "channel_bits_per_beat = " << baseline.channel_bits_per_beat << "\n"
     << "fixed_latency = " << fmt_double(baseline.fixed_latency) << "\n\n"
     << "[security]\n"
     << "f_strong = " << fmt_double(security.fractions.strong) << "\n"
     << "f_det = " << fmt_double(security.fractions.det) << "\n"
     << "f_trng = " << fmt_double(security.fractions.trng) << "\n"
     << "puf_reads = " << security.puf_reads << "\n";
  return os.str();
}

std::string Config::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : to_ini()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Config parse_config(std::string_view ini_text) {
  pt::ptree tree;
  std::istringstream is{std::string(ini_text)};
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::ConfigError, e.what());
  }
  Config cfg;
  const auto& table = setters();
  for (const auto& [section, keys] : tree) {
    auto sec = table.find(section);
    if (sec == table.end()) fail(ErrorCode::ConfigError, "unknown section [" + section + "]");
    if (keys.empty() && !keys.data().empty())
      fail(ErrorCode::ConfigError, "key '" + section + "' outside of a section");
    for (const auto& [key, node] : keys) {
      auto setter = sec->second.find(key);
      if (setter == sec->second.end())
        fail(ErrorCode::ConfigError, "unknown key " + section + "." + key);
      setter->second(cfg, section + "." + key, node.data());
    }
  }
  cfg.validate();
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace pumsim
