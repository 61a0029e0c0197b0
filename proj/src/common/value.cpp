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

#include "common/value.hpp"

#include <charconv>
#include <cstdio>
#include <functional>

#include "common/bytes.hpp"

namespace lakegraph {

const char *ColumnKindName(ColumnKind kind) {
	switch (kind) {
	case ColumnKind::INT64:
		return "INT64";
	case ColumnKind::FLOAT64:
		return "FLOAT64";
	case ColumnKind::STRING:
		return "STRING";
	case ColumnKind::DATE32:
		return "DATE32";
	case ColumnKind::BOOL:
		return "BOOL";
	}
	return "UNKNOWN";
}

ColumnKind ColumnKindFromName(const std::string &name) {
	if (name == "INT64") {
		return ColumnKind::INT64;
	}
	if (name == "FLOAT64") {
		return ColumnKind::FLOAT64;
	}
	if (name == "STRING") {
		return ColumnKind::STRING;
	}
	if (name == "DATE32") {
		return ColumnKind::DATE32;
	}
	if (name == "BOOL") {
		return ColumnKind::BOOL;
	}
	throw LakeGraphError(ErrorKind::InvalidArgument, "unknown column kind: " + name);
}

size_t RawKeyHash::operator()(const RawKey &k) const {
	if (std::holds_alternative<int64_t>(k)) {
		uint64_t v = static_cast<uint64_t>(std::get<int64_t>(k));
		return static_cast<size_t>(Fnv1a64(&v, sizeof(v)));
	}
	const auto &s = std::get<std::string>(k);
	return static_cast<size_t>(Fnv1a64(s));
}

int32_t DaysFromCivil(int y, int m, int d) {
	y -= m <= 2;
	const int era = (y >= 0 ? y : y - 399) / 400;
	const unsigned yoe = static_cast<unsigned>(y - era * 400);
	const unsigned doy = (153u * (static_cast<unsigned>(m) + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
	const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
	return static_cast<int32_t>(era * 146097 + static_cast<int>(doe) - 719468);
}

void CivilFromDays(int32_t days, int &year, int &month, int &day) {
	int32_t z = days + 719468;
	const int era = (z >= 0 ? z : z - 146096) / 146097;
	const unsigned doe = static_cast<unsigned>(z - era * 146097);
	const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
	const int y = static_cast<int>(yoe) + era * 400;
	const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
	const unsigned mp = (5 * doy + 2) / 153;
	day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
	month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
	year = y + (month <= 2);
}

int32_t ParseDate32(const std::string &iso) {
	int y = 0, m = 0, d = 0;
	if (std::sscanf(iso.c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 || d > 31) {
		throw LakeGraphError(ErrorKind::InvalidArgument, "invalid ISO date: " + iso);
	}
	return DaysFromCivil(y, m, d);
}

std::string FormatDate32(int64_t days) {
	int y, m, d;
	CivilFromDays(static_cast<int32_t>(days), y, m, d);
	char buf[16];
	std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
	return buf;
}

std::string FormatDouble(double v) {
	char buf[64];
	auto res = std::to_chars(buf, buf + sizeof(buf), v);
	return std::string(buf, res.ptr);
}

std::string FormatValue(const Value &value, ColumnKind kind) {
	switch (kind) {
	case ColumnKind::INT64:
		return std::to_string(std::get<int64_t>(value));
	case ColumnKind::FLOAT64:
		return FormatDouble(std::get<double>(value));
	case ColumnKind::STRING:
		return std::get<std::string>(value);
	case ColumnKind::DATE32:
		return FormatDate32(std::get<int64_t>(value));
	case ColumnKind::BOOL:
		return std::get<bool>(value) ? "true" : "false";
	}
	throw LakeGraphError(ErrorKind::Internal, "unreachable column kind");
}

int CompareValues(const Value &a, const Value &b, ColumnKind kind) {
	switch (kind) {
	case ColumnKind::INT64:
	case ColumnKind::DATE32: {
		int64_t x = std::get<int64_t>(a), y = std::get<int64_t>(b);
		return x < y ? -1 : (x > y ? 1 : 0);
	}
	case ColumnKind::FLOAT64: {
		double x = std::get<double>(a), y = std::get<double>(b);
		return x < y ? -1 : (x > y ? 1 : 0);
	}
	case ColumnKind::STRING: {
		const auto &x = std::get<std::string>(a);
		const auto &y = std::get<std::string>(b);
		int c = x.compare(y);
		return c < 0 ? -1 : (c > 0 ? 1 : 0);
	}
	case ColumnKind::BOOL: {
		int x = std::get<bool>(a) ? 1 : 0, y = std::get<bool>(b) ? 1 : 0;
		return x - y;
	}
	}
	throw LakeGraphError(ErrorKind::Internal, "unreachable column kind");
}

bool ValueKindMatches(const Value &v, ColumnKind kind) {
	switch (kind) {
	case ColumnKind::INT64:
	case ColumnKind::DATE32:
		return std::holds_alternative<int64_t>(v);
	case ColumnKind::FLOAT64:
		return std::holds_alternative<double>(v);
	case ColumnKind::STRING:
		return std::holds_alternative<std::string>(v);
	case ColumnKind::BOOL:
		return std::holds_alternative<bool>(v);
	}
	return false;
}

} // namespace lakegraph
