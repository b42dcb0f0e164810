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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pumsim/config.hpp"
#include "pumsim/dram.hpp"
#include "pumsim/logic.hpp"

namespace pumsim {

/// Symbolic row of a microprogram.
///   Operand / Result  "<name><bit>"   lower-case name declared in the header
///   Tra               "T<i>"
///   Dcc               "D<i>", "~D<i>" through the negated wordline
///   Zero / One        "C0" / "C1"
///   Spill             "S<i>"
///   Scratch           "X<i>"          data rows borrowed after the result rows
struct SymRow {
  enum class Kind : std::uint8_t { Operand, Result, Tra, Dcc, Zero, One, Spill, Scratch };
  Kind kind = Kind::Tra;
  std::string name;  // Operand / Result
  std::uint32_t index = 0;
  bool negated = false;  // Dcc only

  std::string str() const;
  static SymRow parse(std::string_view text);
  friend bool operator==(const SymRow&, const SymRow&) = default;
};

struct MicroOp {
  enum class Kind : std::uint8_t { Aap, Ap, Init };
  Kind kind = Kind::Aap;
  std::vector<SymRow> src;  // Aap: one row; Ap: the activated group
  SymRow dst;               // Aap / Init
  bool value = false;       // Init

  std::string str() const;
  friend bool operator==(const MicroOp&, const MicroOp&) = default;
};

struct OperandDesc {
  std::string name;
  std::uint32_t width = 0;
  friend bool operator==(const OperandDesc&, const OperandDesc&) = default;
};

/// Straight-line AAP/AP/INIT program over symbolic rows. INIT v executes as AAP from C<v>.
///
/// Text form:
///   operand <name> <width>
///   result <name> <width>
///   scratch <count>
///   AAP <src> <dst>
///   AP <row>,<row>,<row>
///   INIT <0|1> <dst>
/// '#' starts a comment line.
struct Microprogram {
  std::vector<OperandDesc> operands;
  std::vector<OperandDesc> results;
  std::uint32_t scratch_rows = 0;
  std::vector<MicroOp> ops;

  std::size_t count(MicroOp::Kind k) const;
  /// DRAM commands after expansion (AAP and INIT = 3, AP = 2).
  std::uint64_t dram_command_count() const;
  std::string to_text() const;
  static Microprogram parse(std::string_view text);
  friend bool operator==(const Microprogram&, const Microprogram&) = default;
};

struct AllocOptions {
  /// Data rows the allocator may borrow once the spill rows are full.
  std::uint32_t scratch_rows = 0;
};

/// Row assignment for every MAJ node plus the resulting op schedule.
struct RowAllocation {
  struct Placement {
    std::uint32_t node = 0;
    std::array<SymRow, 3> group;
    std::size_t op_index = 0;  // index of the AP in `ops`
  };
  std::vector<Placement> placements;
  std::vector<MicroOp> ops;
  std::uint32_t spill_used = 0;
  std::uint32_t scratch_used = 0;
  std::uint32_t peak_live = 0;
};

/// Greedy allocation in topological order: each MAJ picks the compute-row
/// triple that needs the fewest AAPs, saving still-live values it would
/// overwrite into free compute rows, then spill rows, then scratch rows.
/// Throws InsufficientRows.
RowAllocation allocate_rows(const MajNetwork& mig, const ComputeLayout& layout, const AllocOptions& options = {});

/// Wraps an allocation with operand and result descriptors derived from the network ports.
Microprogram codegen(const MajNetwork& mig, const RowAllocation& alloc);

/// Physical placement of the operand, result and scratch rows of a program.
struct Binding {
  std::map<std::string, std::uint32_t> base_row;
  std::uint32_t scratch_base = 0;
};

/// Executes `program` in one subarray. Operand rows are only read.
void execute(DramDevice& device, const Microprogram& program, std::uint32_t bank, std::uint32_t subarray,
             const Binding& binding);

/// w-bit operand stored bit-serially: bit i of lane j at (base_row + i, column j).
struct VerticalVector {
  std::uint32_t bank = 0;
  std::uint32_t subarray = 0;
  std::uint32_t base_row = 0;
  std::uint32_t width = 0;
  std::uint32_t lanes = 0;
  bool is_signed = false;
};

/// Pure transposition: row i holds bit i of every word. Throws TooManyLanes.
std::vector<BitRow> transpose(std::span<const std::uint64_t> words, std::uint32_t width, std::uint32_t columns);
std::vector<std::uint64_t> untranspose(std::span<const BitRow> rows, std::uint32_t lanes);

/// Writes `words` vertically with one full-row write per bit.
VerticalVector transpose_in(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, std::uint32_t base_row,
                            std::span<const std::uint64_t> words, std::uint32_t width, bool is_signed = false);
std::vector<std::uint64_t> transpose_out(DramDevice& device, const VerticalVector& v);

enum class SimdOpKind : std::uint8_t { Add, Sub, Mul, Relu, GreaterThan };

std::string_view to_string(SimdOpKind k) noexcept;
SimdOpKind parse_simd_op(std::string_view name);
bool is_binary(SimdOpKind k) noexcept;
std::uint32_t result_width(SimdOpKind k, std::uint32_t width) noexcept;

/// AND/OR/NOT description of the op over operands "a", "b" and result "r".
LogicNetwork simd_logic(SimdOpKind kind, std::uint32_t width);

/// Compiles the op for the given compute layout. Throws WidthOutOfRange unless 2 <= width <= 64.
Microprogram build_simd_op(SimdOpKind kind, std::uint32_t width, const ComputeLayout& layout = {});

/// Scalar reference of one lane.
std::uint64_t simd_reference(SimdOpKind kind, std::uint32_t width, std::uint64_t a, std::uint64_t b) noexcept;

/// Rows a, b, r and scratch placed back to back from `first_row`.
Binding default_binding(const Microprogram& program, std::uint32_t first_row = 0);
/// Data rows `default_binding` occupies.
std::uint32_t rows_needed(const Microprogram& program);

/// transpose_in, execute, transpose_out with `default_binding`.
std::vector<std::uint64_t> run_simd(DramDevice& device, const Microprogram& program, std::uint32_t bank,
                                    std::uint32_t subarray, std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b);

}  // namespace pumsim
