// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "common/error.hpp"

namespace lakegraph {

enum class ColumnKind : uint8_t {
	INT64 = 0,
	FLOAT64 = 1,
	STRING = 2,
	DATE32 = 3,
	BOOL = 4,
};

const char *ColumnKindName(ColumnKind kind);
ColumnKind ColumnKindFromName(const std::string &name);

// Runtime cell value. DATE32 is carried as int64 (days since epoch), BOOL as bool.
using Value = std::variant<int64_t, double, std::string, bool>;

// Vertex primary keys are INT64 or STRING.
using RawKey = std::variant<int64_t, std::string>;

struct RawKeyHash {
	size_t operator()(const RawKey &k) const;
};

// Gregorian <-> days-since-1970 conversion.
int32_t DaysFromCivil(int year, int month, int day);
void CivilFromDays(int32_t days, int &year, int &month, int &day);
int32_t ParseDate32(const std::string &iso);
std::string FormatDate32(int64_t days);

// Canonical text form used in result tables and reports.
std::string FormatValue(const Value &value, ColumnKind kind);
std::string FormatDouble(double v);

// Three-way comparison of two values of the same column kind.
int CompareValues(const Value &a, const Value &b, ColumnKind kind);

bool ValueKindMatches(const Value &v, ColumnKind kind);

} // namespace lakegraph
