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

// Standalone chunk decoder used as a test oracle. Deliberately written
// against the file-format description only; it shares no code with the
// production decoders.

#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lakegraph::testing {

using RefValue = std::variant<int64_t, double, std::string, bool>;

// kind ids: 0 INT64, 1 FLOAT64, 2 STRING, 3 DATE32, 4 BOOL
// encoding ids: 0 PLAIN, 1 DICT, 2 RLE
inline std::vector<RefValue> RefDecodeChunk(const uint8_t *data, size_t len, uint8_t kind, uint8_t encoding,
                                            uint64_t row_count) {
	size_t pos = 0;
	auto need = [&](size_t n) {
		if (pos + n > len) {
			throw std::runtime_error("ref decoder out of bounds");
		}
	};
	auto rd_u8 = [&]() -> uint8_t {
		need(1);
		return data[pos++];
	};
	auto rd_u32 = [&]() -> uint32_t {
		need(4);
		uint32_t v = 0;
		for (int i = 0; i < 4; i++) {
			v |= static_cast<uint32_t>(data[pos + i]) << (8 * i);
		}
		pos += 4;
		return v;
	};
	auto rd_u64 = [&]() -> uint64_t {
		need(8);
		uint64_t v = 0;
		for (int i = 0; i < 8; i++) {
			v |= static_cast<uint64_t>(data[pos + i]) << (8 * i);
		}
		pos += 8;
		return v;
	};
	auto rd_varint = [&]() -> uint64_t {
		uint64_t v = 0;
		int shift = 0;
		for (;;) {
			uint8_t b = rd_u8();
			v |= static_cast<uint64_t>(b & 0x7f) << shift;
			if (!(b & 0x80)) {
				return v;
			}
			shift += 7;
		}
	};
	auto rd_plain = [&]() -> RefValue {
		switch (kind) {
		case 0:
			return static_cast<int64_t>(rd_u64());
		case 1: {
			uint64_t bits = rd_u64();
			double d;
			std::memcpy(&d, &bits, sizeof(d));
			return d;
		}
		case 2: {
			uint32_t n = rd_u32();
			need(n);
			std::string s(reinterpret_cast<const char *>(data + pos), n);
			pos += n;
			return s;
		}
		case 3:
			return static_cast<int64_t>(static_cast<int32_t>(rd_u32()));
		case 4:
			return rd_u8() != 0;
		default:
			throw std::runtime_error("ref decoder: bad kind");
		}
	};

	std::vector<RefValue> out;
	out.reserve(row_count);
	switch (encoding) {
	case 0:
		for (uint64_t i = 0; i < row_count; i++) {
			out.push_back(rd_plain());
		}
		break;
	case 1: {
		size_t index_bytes = static_cast<size_t>(4 * row_count);
		if (index_bytes > len) {
			throw std::runtime_error("ref decoder: dict too short");
		}
		size_t dict_end = len - index_bytes;
		std::vector<RefValue> dict;
		while (pos < dict_end) {
			dict.push_back(rd_plain());
		}
		if (pos != dict_end) {
			throw std::runtime_error("ref decoder: dict misaligned");
		}
		for (uint64_t i = 0; i < row_count; i++) {
			uint32_t idx = rd_u32();
			out.push_back(dict.at(idx));
		}
		break;
	}
	case 2:
		while (out.size() < row_count) {
			uint64_t run = rd_varint();
			RefValue v = rd_plain();
			for (uint64_t i = 0; i < run && out.size() < row_count; i++) {
				out.push_back(v);
			}
		}
		break;
	default:
		throw std::runtime_error("ref decoder: bad encoding");
	}
	return out;
}

} // namespace lakegraph::testing
