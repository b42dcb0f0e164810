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

#include "pumsim/dram.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "pumsim/error.hpp"
#include "pumsim/gsdram.hpp"

namespace pumsim {

// ---------------------------------------------------------------------------
// RowGroup

RowGroup::RowGroup(std::initializer_list<RowRef> rows) {
  for (const auto& r : rows) push_back(r);
}

void RowGroup::push_back(RowRef r) {
  if (size_ == max_rows) fail(ErrorCode::IllegalRowSet, "a row group decodes at most 4 rows");
  rows_[size_++] = r;
}

bool operator==(const RowGroup& a, const RowGroup& b) noexcept {
  return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
}

std::string_view to_string(ReducedTiming t) noexcept {
  return t == ReducedTiming::ReadLatency ? "READ_LATENCY" : "TRCD";
}

// ---------------------------------------------------------------------------
// Commands and trace

CommandKind kind_of(const Command& c) noexcept { return static_cast<CommandKind>(c.index()); }

std::uint32_t bank_of(const Command& c) noexcept {
  return std::visit([](const auto& x) { return x.bank; }, c);
}

std::string_view mnemonic(CommandKind k) noexcept {
  switch (k) {
    case CommandKind::Act: return "ACT";
    case CommandKind::Pre: return "PRE";
    case CommandKind::Aap: return "AAP";
    case CommandKind::Ap: return "AP";
    case CommandKind::Rd: return "RD";
    case CommandKind::Wr: return "WR";
    case CommandKind::Xfer: return "XFER";
    case CommandKind::Rdx: return "RDX";
    case CommandKind::ChipRd: return "CHIP_RD";
    case CommandKind::ChipWr: return "CHIP_WR";
  }
  return "?";
}

void CommandTrace::append(Command c) {
  ++counts_[c.index()];
  entries_.push_back(std::move(c));
}

std::uint64_t CommandTrace::dram_command_count() const noexcept {
  std::uint64_t n = 0;
  for (std::size_t k = 0; k < command_kind_count; ++k) {
    const auto kind = static_cast<CommandKind>(k);
    const std::uint64_t weight = kind == CommandKind::Aap ? 3 : kind == CommandKind::Ap ? 2 : 1;
    n += weight * counts_[k];
  }
  return n;
}

CommandTrace CommandTrace::slice(std::size_t from, std::size_t to) const {
  if (from > to || to > entries_.size()) fail(ErrorCode::OutOfRange, "trace slice out of range");
  CommandTrace t;
  for (std::size_t i = from; i < to; ++i) t.append(entries_[i]);
  return t;
}

namespace {

std::string format_group(const RowGroup& g) {
  std::string s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) s += ',';
    if (g[i].negated) s += '~';
    s += std::to_string(g[i].row);
  }
  return s;
}

}  // namespace

std::string format_command(const Command& c) {
  std::ostringstream os;
  os << bank_of(c) << ' ' << mnemonic(kind_of(c));
  std::visit(
      [&os](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, cmd::Act> || std::is_same_v<T, cmd::Ap>) {
          os << ' ' << x.subarray << ' ' << format_group(x.rows);
        } else if constexpr (std::is_same_v<T, cmd::Aap>) {
          os << ' ' << x.subarray << ' ' << format_group(x.src) << ' ' << format_group(x.dst);
        } else if constexpr (std::is_same_v<T, cmd::Rd>) {
          os << ' ' << x.cols.begin << ' ' << x.cols.end;
        } else if constexpr (std::is_same_v<T, cmd::Wr>) {
          os << ' ' << x.cols.begin << ' ' << x.cols.end << ' ' << x.bits.to_hex();
        } else if constexpr (std::is_same_v<T, cmd::Xfer>) {
          os << ' ' << x.dst_bank << ' ' << x.cols.begin << ' ' << x.cols.end;
        } else if constexpr (std::is_same_v<T, cmd::Rdx>) {
          os << ' ' << x.cols.begin << ' ' << x.cols.end << ' ' << to_string(x.timing);
        } else if constexpr (std::is_same_v<T, cmd::ChipRd>) {
          os << ' ' << x.pattern << ' ' << x.base;
        } else if constexpr (std::is_same_v<T, cmd::ChipWr>) {
          os << ' ' << x.pattern << ' ' << x.base << ' ' << x.bits.to_hex();
        }
      },
      c);
  return os.str();
}

std::string CommandTrace::to_text() const {
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    out += std::to_string(i);
    out += ' ';
    out += format_command(entries_[i]);
    out += '\n';
  }
  return out;
}

namespace {

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t lineno) : line_(line), lineno_(lineno) {}

  std::string_view token() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < line_.size() && line_[pos_] != ' ' && line_[pos_] != '\t') ++pos_;
    if (start == pos_) error("missing field");
    return line_.substr(start, pos_ - start);
  }

  std::uint32_t u32() { return to_u32(token()); }

  std::uint32_t to_u32(std::string_view t) {
    std::uint32_t v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) error("bad integer '" + std::string(t) + "'");
    return v;
  }

  RowGroup group() {
    RowGroup g;
    std::string_view t = token();
    while (!t.empty()) {
      const auto comma = t.find(',');
      std::string_view item = t.substr(0, comma);
      RowRef r;
      if (!item.empty() && item[0] == '~') {
        r.negated = true;
        item.remove_prefix(1);
      }
      r.row = to_u32(item);
      g.push_back(r);
      if (comma == std::string_view::npos) break;
      t.remove_prefix(comma + 1);
    }
    return g;
  }

  void finish() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t' || line_[pos_] == '\r')) ++pos_;
    if (pos_ != line_.size()) error("trailing fields");
  }

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::ParseError, "trace line " + std::to_string(lineno_) + ": " + what);
  }

 private:
  std::string_view line_;
  std::size_t lineno_;
  std::size_t pos_ = 0;
};

}  // namespace

CommandTrace CommandTrace::parse(std::string_view text) {
  CommandTrace trace;
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos || line[line.find_first_not_of(" \t")] == '#')
      continue;

    LineParser p(line, lineno);
    p.u32();  // sequence number
    const std::uint32_t bank = p.u32();
    const std::string_view op = p.token();
    if (op == "ACT") {
      const auto sub = p.u32();
      trace.append(cmd::Act{bank, sub, p.group()});
    } else if (op == "PRE") {
      trace.append(cmd::Pre{bank});
    } else if (op == "AAP") {
      const auto sub = p.u32();
      auto src = p.group();
      trace.append(cmd::Aap{bank, sub, src, p.group()});
    } else if (op == "AP") {
      const auto sub = p.u32();
      trace.append(cmd::Ap{bank, sub, p.group()});
    } else if (op == "RD") {
      const auto b = p.u32();
      trace.append(cmd::Rd{bank, {b, p.u32()}});
    } else if (op == "WR") {
      const auto b = p.u32();
      const auto e = p.u32();
      if (e < b) p.error("empty column range");
      trace.append(cmd::Wr{bank, {b, e}, BitRow::from_hex(p.token(), e - b)});
    } else if (op == "XFER") {
      const auto dst = p.u32();
      const auto b = p.u32();
      trace.append(cmd::Xfer{bank, dst, {b, p.u32()}});
    } else if (op == "RDX") {
      const auto b = p.u32();
      const auto e = p.u32();
      const auto t = p.token();
      ReducedTiming timing;
      if (t == "READ_LATENCY") timing = ReducedTiming::ReadLatency;
      else if (t == "TRCD") timing = ReducedTiming::Trcd;
      else p.error("unknown reduced timing '" + std::string(t) + "'");
      trace.append(cmd::Rdx{bank, {b, e}, timing});
    } else if (op == "CHIP_RD") {
      const auto pat = p.u32();
      trace.append(cmd::ChipRd{bank, pat, p.u32()});
    } else if (op == "CHIP_WR") {
      const auto pat = p.u32();
      const auto base = p.u32();
      const auto hex = p.token();
      trace.append(cmd::ChipWr{bank, pat, base, BitRow::from_hex(hex, hex.size() * 4)});
    } else {
      p.error("unknown mnemonic '" + std::string(op) + "'");
    }
    p.finish();
  }
  return trace;
}

// ---------------------------------------------------------------------------
// DramDevice

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

DramDevice::DramDevice(const DramGeometry& geometry, const ComputeLayout& layout, std::uint64_t seed)
    : DramDevice(geometry, layout, seed, Options{}) {}

DramDevice::DramDevice(const DramGeometry& geometry, const ComputeLayout& layout, std::uint64_t seed,
                       Options options)
    : geometry_(geometry), layout_(layout), seed_(seed), options_(options), region_base_(0), rng_(seed) {
  validate(geometry_, layout_);
  region_base_ = geometry_.rows_per_subarray - layout_.region_rows();
  banks_.resize(geometry_.banks_per_device);
  rows_.resize(std::size_t{geometry_.banks_per_device} * geometry_.subarrays_per_bank *
               geometry_.rows_per_subarray);
  for (std::uint32_t b = 0; b < geometry_.banks_per_device; ++b)
    for (std::uint32_t s = 0; s < geometry_.subarrays_per_bank; ++s) cells(b, s, c1_row()).fill(true);
}

DramDevice::DramDevice(const Config& config)
    : DramDevice(config.geometry, config.compute, config.seed, Options{config.quac_row_decoder}) {}

std::uint32_t DramDevice::tra_row(std::uint32_t i) const {
  if (i >= layout_.tra_rows) fail(ErrorCode::OutOfRange, "no TRA row " + std::to_string(i));
  return region_base_ + i;
}

std::uint32_t DramDevice::dcc_row(std::uint32_t i) const {
  if (i >= layout_.dcc_rows) fail(ErrorCode::OutOfRange, "no DCC row " + std::to_string(i));
  return region_base_ + layout_.tra_rows + i;
}

std::uint32_t DramDevice::spill_row(std::uint32_t i) const {
  if (i >= layout_.spill_rows) fail(ErrorCode::OutOfRange, "no spill row " + std::to_string(i));
  return c1_row() + 1 + i;
}

bool DramDevice::is_dcc_row(std::uint32_t row) const noexcept {
  const std::uint32_t first = region_base_ + layout_.tra_rows;
  return row >= first && row < first + layout_.dcc_rows;
}

bool DramDevice::is_tra_row(std::uint32_t row) const noexcept {
  return row >= region_base_ && row < region_base_ + layout_.tra_rows;
}

void DramDevice::check_bank(std::uint32_t bank) const {
  if (bank >= geometry_.banks_per_device) fail(ErrorCode::OutOfRange, "bank " + std::to_string(bank));
}

void DramDevice::check_subarray(std::uint32_t subarray) const {
  if (subarray >= geometry_.subarrays_per_bank)
    fail(ErrorCode::OutOfRange, "subarray " + std::to_string(subarray));
}

void DramDevice::check_cols(ColumnRange cols) const {
  if (cols.begin > cols.end || cols.end > geometry_.columns_per_row)
    fail(ErrorCode::OutOfRange,
         "column range [" + std::to_string(cols.begin) + "," + std::to_string(cols.end) + ")");
}

void DramDevice::check_group(const RowGroup& rows, bool as_destination) const {
  if (rows.empty()) fail(ErrorCode::IllegalRowSet, "empty row group");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const RowRef& r = rows[i];
    if (r.row >= geometry_.rows_per_subarray) fail(ErrorCode::OutOfRange, "row " + std::to_string(r.row));
    if (r.negated && !is_dcc_row(r.row))
      fail(ErrorCode::IllegalRowSet, "row " + std::to_string(r.row) + " has no negated wordline");
    for (std::size_t j = 0; j < i; ++j)
      if (rows[j].row == r.row) fail(ErrorCode::IllegalRowSet, "row " + std::to_string(r.row) + " decoded twice");
    if (as_destination && is_control_row(r.row))
      fail(ErrorCode::ProtectedRow, "control row " + std::to_string(r.row) + " is immutable");
  }
  if (rows.size() == 1) return;

  bool all_compute = true;
  bool all_data = true;
  for (const auto& r : rows) {
    all_compute = all_compute && (is_tra_row(r.row) || is_dcc_row(r.row));
    all_data = all_data && r.row < region_base_;
  }
  if (all_compute) return;
  if (all_data && options_.quac_row_decoder && rows.size() == 4) {
    std::array<std::uint32_t, 4> idx{};
    for (std::size_t i = 0; i < 4; ++i) idx[i] = rows[i].row;
    std::sort(idx.begin(), idx.end());
    if (idx[3] - idx[0] == 3) return;
  }
  fail(ErrorCode::IllegalRowSet, "rows {" + format_group(rows) + "} cannot be activated together");
}

DramDevice::Bank& DramDevice::open_bank(std::uint32_t bank) {
  check_bank(bank);
  Bank& b = banks_[bank];
  if (!b.open) fail(ErrorCode::RowClosed, "bank " + std::to_string(bank) + " has no open row");
  return b;
}

BitRow& DramDevice::cells(std::uint32_t bank, std::uint32_t subarray, std::uint32_t row) {
  BitRow& r = rows_[(std::size_t{bank} * geometry_.subarrays_per_bank + subarray) * geometry_.rows_per_subarray + row];
  if (r.empty()) r = BitRow(geometry_.columns_per_row);
  return r;
}

const BitRow* DramDevice::cells_if(std::uint32_t bank, std::uint32_t subarray, std::uint32_t row) const {
  const BitRow& r =
      rows_[(std::size_t{bank} * geometry_.subarrays_per_bank + subarray) * geometry_.rows_per_subarray + row];
  return r.empty() ? nullptr : &r;
}

BitRow DramDevice::sense(std::uint32_t bank, std::uint32_t subarray, const RowGroup& rows) {
  const std::size_t n = rows.size();
  BitRow out(geometry_.columns_per_row);
  std::array<const BitRow*, RowGroup::max_rows> src{};
  for (std::size_t j = 0; j < n; ++j) src[j] = cells_if(bank, subarray, rows[j].row);

  auto word = [&](std::size_t j, std::size_t w) -> std::uint64_t {
    const std::uint64_t v = src[j] ? src[j]->words()[w] : 0;
    return rows[j].negated ? ~v : v;
  };

  auto dst = out.words();
  for (std::size_t w = 0; w < dst.size(); ++w) {
    if (n == 1) {
      dst[w] = word(0, w);
      continue;
    }
    // Bit-sliced population count of the charged cells per bitline (0..4).
    std::uint64_t c0 = 0, c1 = 0, c2 = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint64_t x = word(j, w);
      const std::uint64_t carry0 = c0 & x;
      c0 ^= x;
      const std::uint64_t carry1 = c1 & carry0;
      c1 ^= carry0;
      c2 |= carry1;
    }
    std::uint64_t high = 0, tie = 0;
    switch (n) {
      case 2:
        high = c1 & ~c0 & ~c2;
        tie = c0 & ~c1 & ~c2;
        break;
      case 3:
        high = c1 | c2;
        break;
      default:
        high = (c1 & c0) | c2;
        tie = c1 & ~c0 & ~c2;
        break;
    }
    if (w + 1 == dst.size() && geometry_.columns_per_row % 64 != 0)
      tie &= (std::uint64_t{1} << (geometry_.columns_per_row % 64)) - 1;
    if (tie) high |= tie & rng_();
    dst[w] = high;
  }
  out.clear_tail();
  return out;
}

void DramDevice::restore(std::uint32_t bank, std::uint32_t subarray, const RowGroup& rows, const BitRow& value) {
  for (const auto& r : rows) {
    if (is_control_row(r.row)) continue;
    cells(bank, subarray, r.row) = r.negated ? ~value : value;
  }
}

void DramDevice::activate(const RowAddress& addr) {
  check_bank(addr.bank);
  check_subarray(addr.subarray);
  const RowGroup rows = RowGroup::single(addr.row);
  check_group(rows, false);
  Bank& b = banks_[addr.bank];
  if (b.open) fail(ErrorCode::BankOpen, "bank " + std::to_string(addr.bank) + " already has an open row");
  b.buffer = sense(addr.bank, addr.subarray, rows);
  restore(addr.bank, addr.subarray, rows, b.buffer);
  b.open = true;
  b.subarray = addr.subarray;
  b.rows = rows;
  trace_.append(cmd::Act{addr.bank, addr.subarray, rows});
}

void DramDevice::multi_activate(std::uint32_t bank, std::uint32_t subarray, const RowGroup& rows) {
  check_bank(bank);
  check_subarray(subarray);
  if (rows.size() < 2) fail(ErrorCode::IllegalRowSet, "multi-row activation needs 2 to 4 rows");
  check_group(rows, false);
  Bank& b = banks_[bank];
  if (b.open) fail(ErrorCode::BankOpen, "bank " + std::to_string(bank) + " already has an open row");
  b.buffer = sense(bank, subarray, rows);
  restore(bank, subarray, rows, b.buffer);
  b.open = true;
  b.subarray = subarray;
  b.rows = rows;
  trace_.append(cmd::Act{bank, subarray, rows});
}

void DramDevice::precharge(std::uint32_t bank) {
  check_bank(bank);
  Bank& b = banks_[bank];
  b.open = false;
  b.rows = RowGroup{};
  b.buffer = BitRow{};
  trace_.append(cmd::Pre{bank});
}

BitRow DramDevice::read_buffer(std::uint32_t bank, ColumnRange cols) {
  Bank& b = open_bank(bank);
  check_cols(cols);
  BitRow out = b.buffer.slice(cols.begin, cols.end);
  trace_.append(cmd::Rd{bank, cols});
  return out;
}

void DramDevice::write_buffer(std::uint32_t bank, ColumnRange cols, const BitRow& bits) {
  Bank& b = open_bank(bank);
  check_cols(cols);
  if (bits.size() != cols.width()) fail(ErrorCode::InvalidArgument, "write payload width does not match range");
  for (const auto& r : b.rows)
    if (is_control_row(r.row)) fail(ErrorCode::ProtectedRow, "control rows are immutable");
  b.buffer.assign(cols.begin, bits);
  for (const auto& r : b.rows) cells(bank, b.subarray, r.row).assign(cols.begin, r.negated ? ~bits : bits);
  trace_.append(cmd::Wr{bank, cols, bits});
}

BitRow DramDevice::host_read(const RowAddress& addr, ColumnRange cols) {
  Bank& b = open_bank(addr.bank);
  if (b.subarray != addr.subarray || b.rows != RowGroup::single(addr.row))
    fail(ErrorCode::RowMismatch, "row " + std::to_string(addr.row) + " is not the open row");
  return read_buffer(addr.bank, cols);
}

void DramDevice::host_write(const RowAddress& addr, ColumnRange cols, const BitRow& bits) {
  check_bank(addr.bank);
  if (is_control_row(addr.row))
    fail(ErrorCode::ProtectedRow, "control row " + std::to_string(addr.row) + " is immutable");
  Bank& b = open_bank(addr.bank);
  if (b.subarray != addr.subarray || b.rows != RowGroup::single(addr.row))
    fail(ErrorCode::RowMismatch, "row " + std::to_string(addr.row) + " is not the open row");
  write_buffer(addr.bank, cols, bits);
}

void DramDevice::aap(std::uint32_t bank, std::uint32_t subarray, const RowGroup& src, const RowGroup& dst) {
  check_bank(bank);
  check_subarray(subarray);
  check_group(src, false);
  check_group(dst, true);
  if (banks_[bank].open) fail(ErrorCode::BankOpen, "bank " + std::to_string(bank) + " already has an open row");
  const BitRow value = sense(bank, subarray, src);
  restore(bank, subarray, src, value);
  restore(bank, subarray, dst, value);
  trace_.append(cmd::Aap{bank, subarray, src, dst});
}

void DramDevice::ap(std::uint32_t bank, std::uint32_t subarray, const RowGroup& rows) {
  check_bank(bank);
  check_subarray(subarray);
  check_group(rows, false);
  if (banks_[bank].open) fail(ErrorCode::BankOpen, "bank " + std::to_string(bank) + " already has an open row");
  const BitRow value = sense(bank, subarray, rows);
  restore(bank, subarray, rows, value);
  trace_.append(cmd::Ap{bank, subarray, rows});
}

void DramDevice::transfer(std::uint32_t src_bank, std::uint32_t dst_bank, ColumnRange cols) {
  check_bank(src_bank);
  check_bank(dst_bank);
  if (src_bank == dst_bank) fail(ErrorCode::SameBank, "internal transfer needs two distinct banks");
  Bank& s = open_bank(src_bank);
  Bank& d = open_bank(dst_bank);
  check_cols(cols);
  for (const auto& r : d.rows)
    if (is_control_row(r.row)) fail(ErrorCode::ProtectedRow, "control rows are immutable");
  const BitRow bits = s.buffer.slice(cols.begin, cols.end);
  d.buffer.assign(cols.begin, bits);
  for (const auto& r : d.rows) cells(dst_bank, d.subarray, r.row).assign(cols.begin, r.negated ? ~bits : bits);
  trace_.append(cmd::Xfer{src_bank, dst_bank, cols});
}

BitRow DramDevice::read_reduced(std::uint32_t bank, ColumnRange cols, ReducedTiming timing) {
  if (!classifier_) fail(ErrorCode::InvalidArgument, "reduced-timing read needs a cell reliability profile");
  Bank& b = open_bank(bank);
  check_cols(cols);
  if (b.rows.size() != 1) fail(ErrorCode::RowMismatch, "reduced-timing reads need a single open row");
  const RowAddress addr{bank, b.subarray, b.rows[0].row};
  BitRow out = b.buffer.slice(cols.begin, cols.end);
  std::uint64_t coins = 0;
  unsigned coins_left = 0;
  for (std::uint32_t c = cols.begin; c < cols.end; ++c) {
    switch (classifier_->classify(addr, c)) {
      case CellClass::Strong: break;
      case CellClass::StuckZero: out.set(c - cols.begin, false); break;
      case CellClass::StuckOne: out.set(c - cols.begin, true); break;
      case CellClass::Random:
        if (coins_left == 0) {
          coins = rng_();
          coins_left = 64;
        }
        out.set(c - cols.begin, coins & 1u);
        coins >>= 1;
        --coins_left;
        break;
    }
  }
  trace_.append(cmd::Rdx{bank, cols, timing});
  return out;
}

namespace {

struct ChipSlots {
  std::uint32_t element_bits;
  std::vector<std::uint64_t> slot;  // per chip: cacheline slot within the open row
};

}  // namespace

static ChipSlots resolve_chip_slots(const DramGeometry& g, std::uint32_t row, std::uint32_t pattern,
                                    std::uint32_t base) {
  const std::uint32_t chips = g.chips_per_rank;
  gsdram::PatternId p{pattern};
  gsdram::check_pattern(p, chips);
  if (g.columns_per_row % g.cacheline_bits != 0)
    fail(ErrorCode::InvalidGeometry, "gather/scatter needs rows made of whole cachelines");
  if (g.element_bits() > 64) fail(ErrorCode::InvalidGeometry, "gather/scatter elements are at most 64 bits");
  const std::uint64_t per_row = g.columns_per_row / g.cacheline_bits;
  const std::uint64_t elements_per_row = per_row * chips;
  if (base >= elements_per_row) fail(ErrorCode::OutOfRange, "gather base outside the open row");
  const std::uint64_t global_base = std::uint64_t{row} * elements_per_row + base;
  if (!gsdram::is_legal_base(p, global_base, chips))
    fail(ErrorCode::MisalignedBase, "base " + std::to_string(base) + " is not aligned for pattern " +
                                        std::to_string(pattern));
  ChipSlots out{g.element_bits(), std::vector<std::uint64_t>(chips)};
  for (std::uint32_t x = 0; x < chips; ++x) {
    const std::uint64_t cl = gsdram::ctl_column(x, p, global_base, chips);
    if (cl < std::uint64_t{row} * per_row || cl >= (std::uint64_t{row} + 1) * per_row)
      fail(ErrorCode::RowSpan, "strided set crosses the per-chip row boundary");
    out.slot[x] = cl - std::uint64_t{row} * per_row;
  }
  return out;
}

BitRow DramDevice::chip_read(std::uint32_t bank, std::uint32_t pattern, std::uint32_t base) {
  Bank& b = open_bank(bank);
  if (b.rows.size() != 1) fail(ErrorCode::RowMismatch, "gather needs a single open row");
  const ChipSlots slots = resolve_chip_slots(geometry_, b.rows[0].row, pattern, base);
  const std::uint32_t eb = slots.element_bits;
  BitRow out(geometry_.cacheline_bits);
  for (std::uint32_t x = 0; x < geometry_.chips_per_rank; ++x) {
    const std::uint64_t off = slots.slot[x] * geometry_.cacheline_bits + std::uint64_t{x} * eb;
    out.assign(std::size_t{x} * eb, b.buffer.slice(off, off + eb));
  }
  trace_.append(cmd::ChipRd{bank, pattern, base});
  return out;
}

void DramDevice::chip_write(std::uint32_t bank, std::uint32_t pattern, std::uint32_t base,
                            const BitRow& chip_order_bits) {
  Bank& b = open_bank(bank);
  if (b.rows.size() != 1) fail(ErrorCode::RowMismatch, "scatter needs a single open row");
  if (is_control_row(b.rows[0].row)) fail(ErrorCode::ProtectedRow, "control rows are immutable");
  if (chip_order_bits.size() != geometry_.cacheline_bits)
    fail(ErrorCode::InvalidArgument, "scatter payload must be one cacheline");
  const ChipSlots slots = resolve_chip_slots(geometry_, b.rows[0].row, pattern, base);
  const std::uint32_t eb = slots.element_bits;
  BitRow& row = cells(bank, b.subarray, b.rows[0].row);
  for (std::uint32_t x = 0; x < geometry_.chips_per_rank; ++x) {
    const std::uint64_t off = slots.slot[x] * geometry_.cacheline_bits + std::uint64_t{x} * eb;
    const BitRow elem = chip_order_bits.slice(std::size_t{x} * eb, std::size_t{x + 1} * eb);
    b.buffer.assign(off, elem);
    row.assign(off, elem);
  }
  trace_.append(cmd::ChipWr{bank, pattern, base, chip_order_bits});
}

void DramDevice::execute(const Command& c) {
  std::visit(
      [this](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, cmd::Act>) {
          if (x.rows.size() == 1 && !x.rows[0].negated) {
            activate({x.bank, x.subarray, x.rows[0].row});
          } else if (x.rows.size() == 1) {
            // Single activation through a negated wordline.
            check_bank(x.bank);
            check_subarray(x.subarray);
            check_group(x.rows, false);
            Bank& b = banks_[x.bank];
            if (b.open) fail(ErrorCode::BankOpen, "bank " + std::to_string(x.bank) + " already has an open row");
            b.buffer = sense(x.bank, x.subarray, x.rows);
            restore(x.bank, x.subarray, x.rows, b.buffer);
            b.open = true;
            b.subarray = x.subarray;
            b.rows = x.rows;
            trace_.append(x);
          } else {
            multi_activate(x.bank, x.subarray, x.rows);
          }
        } else if constexpr (std::is_same_v<T, cmd::Pre>) {
          precharge(x.bank);
        } else if constexpr (std::is_same_v<T, cmd::Aap>) {
          aap(x.bank, x.subarray, x.src, x.dst);
        } else if constexpr (std::is_same_v<T, cmd::Ap>) {
          ap(x.bank, x.subarray, x.rows);
        } else if constexpr (std::is_same_v<T, cmd::Rd>) {
          read_buffer(x.bank, x.cols);
        } else if constexpr (std::is_same_v<T, cmd::Wr>) {
          write_buffer(x.bank, x.cols, x.bits);
        } else if constexpr (std::is_same_v<T, cmd::Xfer>) {
          transfer(x.bank, x.dst_bank, x.cols);
        } else if constexpr (std::is_same_v<T, cmd::Rdx>) {
          read_reduced(x.bank, x.cols, x.timing);
        } else if constexpr (std::is_same_v<T, cmd::ChipRd>) {
          chip_read(x.bank, x.pattern, x.base);
        } else if constexpr (std::is_same_v<T, cmd::ChipWr>) {
          chip_write(x.bank, x.pattern, x.base, x.bits);
        }
      },
      c);
}

void DramDevice::store_row(const RowAddress& addr, const BitRow& bits) {
  if (bits.size() != geometry_.columns_per_row) fail(ErrorCode::InvalidArgument, "row payload width mismatch");
  if (is_control_row(addr.row)) fail(ErrorCode::ProtectedRow, "control rows are immutable");
  activate(addr);
  write_buffer(addr.bank, full_row(), bits);
  precharge(addr.bank);
}

BitRow DramDevice::load_row(const RowAddress& addr) {
  activate(addr);
  BitRow out = read_buffer(addr.bank, full_row());
  precharge(addr.bank);
  return out;
}

BitRow DramDevice::peek(const RowAddress& addr) const {
  check_bank(addr.bank);
  check_subarray(addr.subarray);
  if (addr.row >= geometry_.rows_per_subarray) fail(ErrorCode::OutOfRange, "row " + std::to_string(addr.row));
  const BitRow* r = cells_if(addr.bank, addr.subarray, addr.row);
  return r ? *r : BitRow(geometry_.columns_per_row);
}

bool DramDevice::is_open(std::uint32_t bank) const {
  check_bank(bank);
  return banks_[bank].open;
}

bool DramDevice::is_open_row(const RowAddress& addr) const {
  check_bank(addr.bank);
  const Bank& b = banks_[addr.bank];
  return b.open && b.subarray == addr.subarray && b.rows == RowGroup::single(addr.row);
}

std::uint64_t DramDevice::state_digest() const {
  std::uint64_t h = mix64(seed_ ^ rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].empty() || rows_[i].popcount() == 0) continue;
    h = mix64(h ^ i);
    for (auto w : rows_[i].words()) h = mix64(h ^ w);
  }
  for (std::size_t b = 0; b < banks_.size(); ++b) {
    if (!banks_[b].open) continue;
    h = mix64(h ^ (0xb0000000ull + b));
    for (const auto& r : banks_[b].rows) h = mix64(h ^ (std::uint64_t{r.row} << 1 | r.negated));
    for (auto w : banks_[b].buffer.words()) h = mix64(h ^ w);
  }
  return h;
}

void replay(DramDevice& device, const CommandTrace& trace) {
  for (const auto& c : trace.entries()) device.execute(c);
}

}  // namespace pumsim
