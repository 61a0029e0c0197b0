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
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "common/error.hpp"

namespace lakegraph {

using Bytes = std::vector<uint8_t>;

// Little-endian append-only buffer writer.
class ByteWriter {
public:
	explicit ByteWriter(Bytes &out) : out_(out) {}

	void u8(uint8_t v) { out_.push_back(v); }
	void u16(uint16_t v) { Fixed(v); }
	void u32(uint32_t v) { Fixed(v); }
	void u64(uint64_t v) { Fixed(v); }
	void i32(int32_t v) { Fixed(static_cast<uint32_t>(v)); }
	void i64(int64_t v) { Fixed(static_cast<uint64_t>(v)); }
	void f64(double v) {
		uint64_t bits;
		std::memcpy(&bits, &v, sizeof(bits));
		Fixed(bits);
	}
	void raw(const void *data, size_t len) {
		const auto *p = static_cast<const uint8_t *>(data);
		out_.insert(out_.end(), p, p + len);
	}
	void str16(std::string_view s) {
		if (s.size() > UINT16_MAX) {
			throw LakeGraphError(ErrorKind::InvalidArgument, "string exceeds u16 length prefix: " +
			                     std::to_string(s.size()));
		}
		u16(static_cast<uint16_t>(s.size()));
		raw(s.data(), s.size());
	}
	void str32(std::string_view s) {
		if (s.size() > UINT32_MAX) {
			throw LakeGraphError(ErrorKind::InvalidArgument, "string exceeds u32 length prefix");
		}
		u32(static_cast<uint32_t>(s.size()));
		raw(s.data(), s.size());
	}
	// Unsigned LEB128.
	void varint(uint64_t v) {
		while (v >= 0x80) {
			out_.push_back(static_cast<uint8_t>(v) | 0x80);
			v >>= 7;
		}
		out_.push_back(static_cast<uint8_t>(v));
	}
	size_t size() const { return out_.size(); }

private:
	template <typename T>
	void Fixed(T v) {
		uint8_t buf[sizeof(T)];
		for (size_t i = 0; i < sizeof(T); i++) {
			buf[i] = static_cast<uint8_t>(v >> (8 * i));
		}
		raw(buf, sizeof(T));
	}

	Bytes &out_;
};

// Bounds-checked little-endian reader over a borrowed byte span.
class ByteReader {
public:
	ByteReader(const uint8_t *data, size_t len) : data_(data), len_(len) {}
	explicit ByteReader(std::span<const uint8_t> s) : data_(s.data()), len_(s.size()) {}

	uint8_t u8() { return Take(1)[0]; }
	uint16_t u16() { return Fixed<uint16_t>(); }
	uint32_t u32() { return Fixed<uint32_t>(); }
	uint64_t u64() { return Fixed<uint64_t>(); }
	int32_t i32() { return static_cast<int32_t>(Fixed<uint32_t>()); }
	int64_t i64() { return static_cast<int64_t>(Fixed<uint64_t>()); }
	double f64() {
		uint64_t bits = Fixed<uint64_t>();
		double v;
		std::memcpy(&v, &bits, sizeof(v));
		return v;
	}
	std::string str16() { return TakeString(u16()); }
	std::string str32() { return TakeString(u32()); }
	uint64_t varint() {
		uint64_t v = 0;
		int shift = 0;
		for (;;) {
			if (shift > 63) {
				throw LakeGraphError(ErrorKind::FormatError, "varint overflow");
			}
			uint8_t b = u8();
			v |= static_cast<uint64_t>(b & 0x7f) << shift;
			if ((b & 0x80) == 0) {
				return v;
			}
			shift += 7;
		}
	}
	const uint8_t *Take(size_t n) {
		if (n > remaining()) {
			throw LakeGraphError(ErrorKind::FormatError, "byte reader out of bounds: need " + std::to_string(n) +
			                     ", have " + std::to_string(remaining()));
		}
		const uint8_t *p = data_ + pos_;
		pos_ += n;
		return p;
	}
	void Skip(size_t n) { Take(n); }
	size_t pos() const { return pos_; }
	void Seek(size_t p) {
		if (p > len_) {
			throw LakeGraphError(ErrorKind::FormatError, "byte reader seek out of bounds");
		}
		pos_ = p;
	}
	size_t remaining() const { return len_ - pos_; }
	bool exhausted() const { return pos_ == len_; }

private:
	template <typename T>
	T Fixed() {
		const uint8_t *p = Take(sizeof(T));
		T v = 0;
		for (size_t i = 0; i < sizeof(T); i++) {
			v |= static_cast<T>(p[i]) << (8 * i);
		}
		return v;
	}
	std::string TakeString(size_t n) {
		const uint8_t *p = Take(n);
		return std::string(reinterpret_cast<const char *>(p), n);
	}

	const uint8_t *data_;
	size_t len_;
	size_t pos_ = 0;
};

inline uint64_t Fnv1a64(const void *data, size_t len, uint64_t seed = 14695981039346656037ULL) {
	const auto *p = static_cast<const uint8_t *>(data);
	uint64_t h = seed;
	for (size_t i = 0; i < len; i++) {
		h ^= p[i];
		h *= 1099511628211ULL;
	}
	return h;
}

inline uint64_t Fnv1a64(std::string_view s, uint64_t seed = 14695981039346656037ULL) {
	return Fnv1a64(s.data(), s.size(), seed);
}

} // namespace lakegraph
