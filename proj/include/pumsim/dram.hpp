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

#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pumsim/bitrow.hpp"
#include "pumsim/config.hpp"

namespace pumsim {

struct RowAddress {
  std::uint32_t bank = 0;
  std::uint32_t subarray = 0;
  std::uint32_t row = 0;

  friend bool operator==(const RowAddress&, const RowAddress&) = default;
};

/// Half-open column interval [begin, end).
struct ColumnRange {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  std::uint32_t width() const { return end - begin; }
  friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

/// One decoded wordline. `negated` selects the complementary wordline of a
/// dual-contact row, which connects the cell to the inverted bitline.
struct RowRef {
  std::uint32_t row = 0;
  bool negated = false;

  friend bool operator==(const RowRef&, const RowRef&) = default;
};

/// The set of 1 to 4 wordlines raised by one activation, all in one subarray.
class RowGroup {
 public:
  static constexpr std::size_t max_rows = 4;

  RowGroup() = default;
  RowGroup(std::initializer_list<RowRef> rows);
  static RowGroup single(std::uint32_t row) { return RowGroup{RowRef{row, false}}; }

  void push_back(RowRef r);
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  const RowRef& operator[](std::size_t i) const noexcept { return rows_[i]; }
  const RowRef* begin() const noexcept { return rows_.data(); }
  const RowRef* end() const noexcept { return rows_.data() + size_; }

  friend bool operator==(const RowGroup& a, const RowGroup& b) noexcept;

 private:
  std::array<RowRef, max_rows> rows_{};
  std::size_t size_ = 0;
};

enum class ReducedTiming : std::uint8_t { ReadLatency, Trcd };

std::string_view to_string(ReducedTiming t) noexcept;

/// Behaviour of one cell when read with a violated timing parameter.
enum class CellClass : std::uint8_t { Strong, StuckZero, StuckOne, Random };

class CellClassifier {
 public:
  virtual ~CellClassifier() = default;
  virtual CellClass classify(const RowAddress& addr, std::uint32_t column) const = 0;
};

namespace cmd {

struct Act {
  std::uint32_t bank = 0, subarray = 0;
  RowGroup rows;
};
struct Pre {
  std::uint32_t bank = 0;
};
struct Aap {
  std::uint32_t bank = 0, subarray = 0;
  RowGroup src, dst;
};
struct Ap {
  std::uint32_t bank = 0, subarray = 0;
  RowGroup rows;
};
struct Rd {
  std::uint32_t bank = 0;
  ColumnRange cols;
};
struct Wr {
  std::uint32_t bank = 0;
  ColumnRange cols;
  BitRow bits;
};
/// One internal-bus beat between the row buffers of two banks (RowClone PSM).
struct Xfer {
  std::uint32_t bank = 0, dst_bank = 0;
  ColumnRange cols;
};
/// Read issued with a violated timing parameter.
struct Rdx {
  std::uint32_t bank = 0;
  ColumnRange cols;
  ReducedTiming timing = ReducedTiming::ReadLatency;
};
struct ChipRd {
  std::uint32_t bank = 0, pattern = 0, base = 0;
};
struct ChipWr {
  std::uint32_t bank = 0, pattern = 0, base = 0;
  BitRow bits;
};

}  // namespace cmd

using Command = std::variant<cmd::Act, cmd::Pre, cmd::Aap, cmd::Ap, cmd::Rd, cmd::Wr, cmd::Xfer, cmd::Rdx,
                             cmd::ChipRd, cmd::ChipWr>;

enum class CommandKind : std::uint8_t { Act, Pre, Aap, Ap, Rd, Wr, Xfer, Rdx, ChipRd, ChipWr };
inline constexpr std::size_t command_kind_count = 10;

CommandKind kind_of(const Command& c) noexcept;
std::uint32_t bank_of(const Command& c) noexcept;
std::string_view mnemonic(CommandKind k) noexcept;

/// Append-only record of every command a device executed.
///
/// Text form: one command per line, `<seq> <bank> <MNEMONIC> <args...>`:
///   ACT    <subarray> <group>            group = comma list of rows, '~' marks a negated DCC wordline
///   PRE
///   AAP    <subarray> <src-group> <dst-group>
///   AP     <subarray> <group>
///   RD     <col-begin> <col-end>
///   WR     <col-begin> <col-end> <hex>
///   XFER   <dst-bank> <col-begin> <col-end>
///   RDX    <col-begin> <col-end> <READ_LATENCY|TRCD>
///   CHIP_RD <pattern> <base>
///   CHIP_WR <pattern> <base> <hex>
/// Lines starting with '#' and blank lines are ignored by the parser.
class CommandTrace {
 public:
  void append(Command c);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const Command& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<Command>& entries() const noexcept { return entries_; }

  std::uint64_t count(CommandKind k) const noexcept { return counts_[static_cast<std::size_t>(k)]; }
  /// Primitive DRAM commands, with AAP expanded to ACT+ACT+PRE and AP to ACT+PRE.
  std::uint64_t dram_command_count() const noexcept;

  /// Entries [from, to) as an independent trace.
  CommandTrace slice(std::size_t from, std::size_t to) const;
  CommandTrace slice(std::size_t from) const { return slice(from, size()); }

  std::string to_text() const;
  static CommandTrace parse(std::string_view text);

 private:
  std::vector<Command> entries_;
  std::array<std::uint64_t, command_kind_count> counts_{};
};

std::string format_command(const Command& c);

/// Functional model of one DRAM device with charge-sharing multi-row activation.
///
/// Per bitline, activating n rows senses 1 when more than n/2 of the (port-adjusted)
/// cells are charged, 0 when fewer, and a fair coin from the device generator on a
/// tie. Every activated row is then restored to the sensed value. A device is not
/// thread-safe; distinct devices are independent.
class DramDevice {
 public:
  struct Options {
    /// Allows 4 consecutive data rows in one activation (quadruple activation).
    bool quac_row_decoder = true;
  };

  DramDevice(const DramGeometry& geometry, const ComputeLayout& layout, std::uint64_t seed);
  DramDevice(const DramGeometry& geometry, const ComputeLayout& layout, std::uint64_t seed, Options options);
  explicit DramDevice(const Config& config);

  DramDevice(DramDevice&&) noexcept = default;
  DramDevice& operator=(DramDevice&&) noexcept = default;

  const DramGeometry& geometry() const noexcept { return geometry_; }
  const ComputeLayout& layout() const noexcept { return layout_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const Options& options() const noexcept { return options_; }

  // Compute-region row indices (identical in every subarray).
  std::uint32_t data_rows() const noexcept { return region_base_; }
  std::uint32_t tra_row(std::uint32_t i) const;
  std::uint32_t dcc_row(std::uint32_t i) const;
  std::uint32_t c0_row() const noexcept { return region_base_ + layout_.tra_rows + layout_.dcc_rows; }
  std::uint32_t c1_row() const noexcept { return c0_row() + 1; }
  std::uint32_t spill_row(std::uint32_t i) const;
  bool is_control_row(std::uint32_t row) const noexcept { return row == c0_row() || row == c1_row(); }
  bool is_dcc_row(std::uint32_t row) const noexcept;
  bool is_tra_row(std::uint32_t row) const noexcept;

  // Commands. Each successful call appends exactly one trace entry; a failing
  // call changes nothing.
  void activate(const RowAddress& addr);
  void multi_activate(std::uint32_t bank, std::uint32_t subarray, const RowGroup& rows);
  void precharge(std::uint32_t bank);
  BitRow read_buffer(std::uint32_t bank, ColumnRange cols);
  void write_buffer(std::uint32_t bank, ColumnRange cols, const BitRow& bits);
  void aap(std::uint32_t bank, std::uint32_t subarray, const RowGroup& src, const RowGroup& dst);
  void ap(std::uint32_t bank, std::uint32_t subarray, const RowGroup& rows);
  void transfer(std::uint32_t src_bank, std::uint32_t dst_bank, ColumnRange cols);
  BitRow read_reduced(std::uint32_t bank, ColumnRange cols, ReducedTiming timing);
  /// Returns one element per chip, in chip order.
  BitRow chip_read(std::uint32_t bank, std::uint32_t pattern, std::uint32_t base);
  void chip_write(std::uint32_t bank, std::uint32_t pattern, std::uint32_t base, const BitRow& chip_order_bits);

  void execute(const Command& c);

  /// host_read / host_write: like read_buffer / write_buffer but also check that
  /// exactly `addr` is the open row.
  BitRow host_read(const RowAddress& addr, ColumnRange cols);
  void host_write(const RowAddress& addr, ColumnRange cols, const BitRow& bits);

  /// ACT + WR(full row) + PRE.
  void store_row(const RowAddress& addr, const BitRow& bits);
  /// ACT + RD(full row) + PRE.
  BitRow load_row(const RowAddress& addr);

  void attach_classifier(std::shared_ptr<const CellClassifier> classifier) { classifier_ = std::move(classifier); }
  const CellClassifier* classifier() const noexcept { return classifier_.get(); }

  // Inspection; not traced.
  BitRow peek(const RowAddress& addr) const;
  bool is_open(std::uint32_t bank) const;
  /// True when exactly `addr` (single row, normal wordline) is open.
  bool is_open_row(const RowAddress& addr) const;
  const CommandTrace& trace() const noexcept { return trace_; }
  /// Hash of all row contents and bank states.
  std::uint64_t state_digest() const;

  ColumnRange full_row() const noexcept { return {0, geometry_.columns_per_row}; }

 private:
  struct Bank {
    bool open = false;
    std::uint32_t subarray = 0;
    RowGroup rows;
    BitRow buffer;
  };

  void check_bank(std::uint32_t bank) const;
  void check_subarray(std::uint32_t subarray) const;
  void check_cols(ColumnRange cols) const;
  void check_group(const RowGroup& rows, bool as_destination) const;
  Bank& open_bank(std::uint32_t bank);

  BitRow& cells(std::uint32_t bank, std::uint32_t subarray, std::uint32_t row);
  const BitRow* cells_if(std::uint32_t bank, std::uint32_t subarray, std::uint32_t row) const;

  BitRow sense(std::uint32_t bank, std::uint32_t subarray, const RowGroup& rows);
  void restore(std::uint32_t bank, std::uint32_t subarray, const RowGroup& rows, const BitRow& value);

  DramGeometry geometry_;
  ComputeLayout layout_;
  std::uint64_t seed_;
  Options options_;
  std::uint32_t region_base_;
  std::mt19937_64 rng_;
  std::vector<Bank> banks_;
  std::vector<BitRow> rows_;  // empty entry == never written (all zero); C1 rows materialized
  CommandTrace trace_;
  std::shared_ptr<const CellClassifier> classifier_;
};

/// Executes every command of `trace` on `device` in order.
void replay(DramDevice& device, const CommandTrace& trace);

}  // namespace pumsim
