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

#include "pumsim/error.hpp"

namespace pumsim {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BankOpen: return "BankOpen";
    case ErrorCode::RowClosed: return "RowClosed";
    case ErrorCode::RowMismatch: return "RowMismatch";
    case ErrorCode::IllegalRowSet: return "IllegalRowSet";
    case ErrorCode::ProtectedRow: return "ProtectedRow";
    case ErrorCode::CrossSubarray: return "CrossSubarray";
    case ErrorCode::SameBank: return "SameBank";
    case ErrorCode::MissingOperand: return "MissingOperand";
    case ErrorCode::CyclicNetwork: return "CyclicNetwork";
    case ErrorCode::InsufficientRows: return "InsufficientRows";
    case ErrorCode::WidthOutOfRange: return "WidthOutOfRange";
    case ErrorCode::TooManyLanes: return "TooManyLanes";
    case ErrorCode::UnsupportedPattern: return "UnsupportedPattern";
    case ErrorCode::MisalignedBase: return "MisalignedBase";
    case ErrorCode::RowSpan: return "RowSpan";
    case ErrorCode::BadFractions: return "BadFractions";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::NoTrngCells: return "NoTrngCells";
    case ErrorCode::UnknownBenchmark: return "UnknownBenchmark";
    case ErrorCode::CorrectnessMismatch: return "CorrectnessMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace pumsim
