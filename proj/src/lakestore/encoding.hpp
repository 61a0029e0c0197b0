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

#include <optional>
#include <utility>

#include "common/bytes.hpp"
#include "common/value.hpp"

namespace lakegraph {

enum class Encoding : uint8_t {
	PLAIN = 0,
	DICT = 1,
	RLE = 2,
};

// Columnar value buffer. Exactly one of the payload vectors is populated,
// selected by kind (DATE32 rides in ints, BOOL in bools as 0/1).
struct ColumnVector {
	ColumnKind kind = ColumnKind::INT64;
	std::vector<int64_t> ints;
	std::vector<double> doubles;
	std::vector<std::string> strings;
	std::vector<uint8_t> bools;

	explicit ColumnVector(ColumnKind k = ColumnKind::INT64) : kind(k) {}

	size_t size() const;
	void Append(const Value &v);
	Value At(size_t i) const;
	void Clear();
	void Reserve(size_t n);
};

bool EncodingApplicable(Encoding enc, ColumnKind kind);

// Serializes values with the given encoding. RLE is limited to
// INT64/DATE32/BOOL; passing another kind throws.
Bytes EncodeChunk(const ColumnVector &values, Encoding enc);

// Forward-only decoder over one encoded chunk. Supports batched decode and
// value skipping without materialization (RLE skips whole runs).
class ChunkDecoder {
public:
	ChunkDecoder(const uint8_t *data, size_t len, ColumnKind kind, Encoding enc, uint64_t row_count);

	uint64_t position() const { return position_; }
	uint64_t row_count() const { return row_count_; }

	// Appends the next n values to out (n capped at remaining rows).
	void Decode(size_t n, ColumnVector &out);
	// Advances past n values.
	void Skip(size_t n);

private:
	void DecodePlainOne(ByteReader &r, ColumnVector &out);
	void SkipPlainOne(ByteReader &r);

	ColumnKind kind_;
	Encoding enc_;
	uint64_t row_count_;
	uint64_t position_ = 0;
	ByteReader reader_;
	// RLE run state.
	uint64_t run_remaining_ = 0;
	Value run_value_ {int64_t {0}};
	// DICT state: parsed dictionary plus an index cursor.
	ColumnVector dict_;
	ByteReader index_reader_;
};

// One-shot convenience for whole-chunk decodes.
ColumnVector DecodeChunk(const uint8_t *data, size_t len, ColumnKind kind, Encoding enc, uint64_t row_count);

// Min/max over the values; nullopt for kinds without populated stats
// (STRING, BOOL) or empty inputs.
std::optional<std::pair<Value, Value>> ComputeMinMax(const ColumnVector &values);

} // namespace lakegraph
