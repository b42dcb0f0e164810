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
#include <optional>
#include <string_view>
#include <vector>

#include "pumsim/dram.hpp"

namespace pumsim {

enum class BitwiseOpKind : std::uint8_t { Not, And, Or, Nand, Nor, Xor, Xnor };

std::string_view to_string(BitwiseOpKind k) noexcept;
/// Parses "not", "and", ... (case-insensitive). Throws InvalidArgument.
BitwiseOpKind parse_bitwise_op(std::string_view name);
bool is_binary(BitwiseOpKind k) noexcept;
/// Software reference for one 64-bit word.
std::uint64_t apply_bitwise(BitwiseOpKind k, std::uint64_t a, std::uint64_t b) noexcept;

/// Commands issued by one bulk operation together with the rows it touched.
struct OpSequence {
  CommandTrace commands;
  std::vector<std::uint32_t> sources;
  std::uint32_t destination = 0;
  std::vector<std::uint32_t> scratch;  // compute rows overwritten along the way
};

/// Fast parallel mode: one AAP from src to dst inside a subarray.
void rowclone_fpm(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, std::uint32_t src_row,
                  std::uint32_t dst_row);
/// Overload taking full addresses; throws CrossSubarray unless both share bank and subarray.
void rowclone_fpm(DramDevice& device, const RowAddress& src, const RowAddress& dst);

/// Pipelined serial mode: copies the first `bytes` of src into dst over the
/// internal bus, one cacheline per XFER. bytes == 0 issues nothing.
void rowclone_psm(DramDevice& device, const RowAddress& src, const RowAddress& dst, std::uint64_t bytes);

/// Number of XFER beats rowclone_psm issues.
std::uint64_t psm_transfers(const DramGeometry& g, std::uint64_t bytes) noexcept;

/// AAP from the C0 or C1 control row.
void row_init(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, std::uint32_t dst_row, bool value);

/// dst = ~src through DCC row D0.
void ambit_not(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, std::uint32_t src_row,
               std::uint32_t dst_row);

/// dst = op(a, b). Sources are copied into compute rows first and are left intact.
/// Throws MissingOperand when a binary op gets no `b`.
OpSequence bulk_bitwise(DramDevice& device, std::uint32_t bank, std::uint32_t subarray, BitwiseOpKind op,
                        std::uint32_t a, std::optional<std::uint32_t> b, std::uint32_t dst);

}  // namespace pumsim
