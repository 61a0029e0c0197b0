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

#include "lakestore/encoding.hpp"

#include <limits>
#include <unordered_map>

namespace lakegraph {

size_t ColumnVector::size() const {
	switch (kind) {
	case ColumnKind::INT64:
	case ColumnKind::DATE32:
		return ints.size();
	case ColumnKind::FLOAT64:
		return doubles.size();
	case ColumnKind::STRING:
		return strings.size();
	case ColumnKind::BOOL:
		return bools.size();
	}
	return 0;
}

void ColumnVector::Append(const Value &v) {
	if (!ValueKindMatches(v, kind)) {
		throw LakeGraphError(ErrorKind::InvalidArgument,
		                     std::string("value does not match column kind ") + ColumnKindName(kind));
	}
	switch (kind) {
	case ColumnKind::INT64:
	case ColumnKind::DATE32:
		ints.push_back(std::get<int64_t>(v));
		break;
	case ColumnKind::FLOAT64:
		doubles.push_back(std::get<double>(v));
		break;
	case ColumnKind::STRING:
		strings.push_back(std::get<std::string>(v));
		break;
	case ColumnKind::BOOL:
		bools.push_back(std::get<bool>(v) ? 1 : 0);
		break;
	}
}

Value ColumnVector::At(size_t i) const {
	switch (kind) {
	case ColumnKind::INT64:
	case ColumnKind::DATE32:
		return ints.at(i);
	case ColumnKind::FLOAT64:
		return doubles.at(i);
	case ColumnKind::STRING:
		return strings.at(i);
	case ColumnKind::BOOL:
		return bools.at(i) != 0;
	}
	throw LakeGraphError(ErrorKind::Internal, "unreachable column kind");
}

void ColumnVector::Clear() {
	ints.clear();
	doubles.clear();
	strings.clear();
	bools.clear();
}

void ColumnVector::Reserve(size_t n) {
	switch (kind) {
	case ColumnKind::INT64:
	case ColumnKind::DATE32:
		ints.reserve(n);
		break;
	case ColumnKind::FLOAT64:
		doubles.reserve(n);
		break;
	case ColumnKind::STRING:
		strings.reserve(n);
		break;
	case ColumnKind::BOOL:
		bools.reserve(n);
		break;
	}
}

bool EncodingApplicable(Encoding enc, ColumnKind kind) {
	if (enc == Encoding::RLE) {
		return kind == ColumnKind::INT64 || kind == ColumnKind::DATE32 || kind == ColumnKind::BOOL;
	}
	return true;
}

namespace {

void CheckDate32Range(int64_t v) {
	if (v < std::numeric_limits<int32_t>::min() || v > std::numeric_limits<int32_t>::max()) {
		throw LakeGraphError(ErrorKind::InvalidArgument, "DATE32 value out of range: " + std::to_string(v));
	}
}

void WritePlainValue(ByteWriter &w, const ColumnVector &values, size_t i) {
	switch (values.kind) {
	case ColumnKind::INT64:
		w.i64(values.ints[i]);
		break;
	case ColumnKind::DATE32:
		CheckDate32Range(values.ints[i]);
		w.i32(static_cast<int32_t>(values.ints[i]));
		break;
	case ColumnKind::FLOAT64:
		w.f64(values.doubles[i]);
		break;
	case ColumnKind::STRING:
		w.str32(values.strings[i]);
		break;
	case ColumnKind::BOOL:
		w.u8(values.bools[i] ? 1 : 0);
		break;
	}
}

Bytes EncodePlain(const ColumnVector &values) {
	Bytes out;
	ByteWriter w(out);
	for (size_t i = 0; i < values.size(); i++) {
		WritePlainValue(w, values, i);
	}
	return out;
}

// Dictionary section holds PLAIN-encoded unique values in first-appearance
// order; indices follow as u32 little-endian, one per row. The decoder finds
// the boundary from the trailing 4*rowCount index bytes.
Bytes EncodeDict(const ColumnVector &values) {
	size_t n = values.size();
	std::vector<uint32_t> indices(n);
	ColumnVector uniques(values.kind);

	auto intern = [&](auto &map, const auto &key, size_t i) {
		auto it = map.find(key);
		if (it == map.end()) {
			uint32_t id = static_cast<uint32_t>(uniques.size());
			map.emplace(key, id);
			uniques.Append(values.At(i));
			indices[i] = id;
		} else {
			indices[i] = it->second;
		}
	};

	switch (values.kind) {
	case ColumnKind::INT64:
	case ColumnKind::DATE32: {
		std::unordered_map<int64_t, uint32_t> map;
		for (size_t i = 0; i < n; i++) {
			intern(map, values.ints[i], i);
		}
		break;
	}
	case ColumnKind::FLOAT64: {
		std::unordered_map<uint64_t, uint32_t> map;
		for (size_t i = 0; i < n; i++) {
			uint64_t bits;
			std::memcpy(&bits, &values.doubles[i], sizeof(bits));
			intern(map, bits, i);
		}
		break;
	}
	case ColumnKind::STRING: {
		std::unordered_map<std::string, uint32_t> map;
		for (size_t i = 0; i < n; i++) {
			intern(map, values.strings[i], i);
		}
		break;
	}
	case ColumnKind::BOOL: {
		std::unordered_map<uint8_t, uint32_t> map;
		for (size_t i = 0; i < n; i++) {
			intern(map, values.bools[i], i);
		}
		break;
	}
	}

	Bytes out = EncodePlain(uniques);
	ByteWriter w(out);
	for (uint32_t idx : indices) {
		w.u32(idx);
	}
	return out;
}

// (varint runLength, PLAIN value) pairs.
Bytes EncodeRle(const ColumnVector &values) {
	Bytes out;
	ByteWriter w(out);
	size_t n = values.size();
	size_t i = 0;
	auto at = [&](size_t k) -> int64_t {
		return values.kind == ColumnKind::BOOL ? values.bools[k] : values.ints[k];
	};
	while (i < n) {
		size_t j = i + 1;
		while (j < n && at(j) == at(i)) {
			j++;
		}
		w.varint(j - i);
		WritePlainValue(w, values, i);
		i = j;
	}
	return out;
}

} // namespace

Bytes EncodeChunk(const ColumnVector &values, Encoding enc) {
	if (!EncodingApplicable(enc, values.kind)) {
		throw LakeGraphError(ErrorKind::InvalidArgument,
		                     std::string("encoding not applicable to column kind ") + ColumnKindName(values.kind));
	}
	switch (enc) {
	case Encoding::PLAIN:
		return EncodePlain(values);
	case Encoding::DICT:
		return EncodeDict(values);
	case Encoding::RLE:
		return EncodeRle(values);
	}
	throw LakeGraphError(ErrorKind::InvalidArgument, "unknown encoding");
}

ChunkDecoder::ChunkDecoder(const uint8_t *data, size_t len, ColumnKind kind, Encoding enc, uint64_t row_count)
    : kind_(kind), enc_(enc), row_count_(row_count), reader_(data, len), dict_(kind), index_reader_(data, len) {
	if (enc_ == Encoding::DICT) {
		uint64_t index_bytes = 4 * row_count_;
		if (index_bytes > len) {
			throw LakeGraphError(ErrorKind::FormatError, "dictionary chunk shorter than its index section");
		}
		size_t dict_len = len - static_cast<size_t>(index_bytes);
		ByteReader dict_reader(data, dict_len);
		while (!dict_reader.exhausted()) {
			DecodePlainOne(dict_reader, dict_);
		}
		index_reader_.Seek(dict_len);
	}
}

void ChunkDecoder::DecodePlainOne(ByteReader &r, ColumnVector &out) {
	switch (kind_) {
	case ColumnKind::INT64:
		out.ints.push_back(r.i64());
		break;
	case ColumnKind::DATE32:
		out.ints.push_back(r.i32());
		break;
	case ColumnKind::FLOAT64:
		out.doubles.push_back(r.f64());
		break;
	case ColumnKind::STRING:
		out.strings.push_back(r.str32());
		break;
	case ColumnKind::BOOL:
		out.bools.push_back(r.u8());
		break;
	}
}

void ChunkDecoder::SkipPlainOne(ByteReader &r) {
	switch (kind_) {
	case ColumnKind::INT64:
	case ColumnKind::FLOAT64:
		r.Skip(8);
		break;
	case ColumnKind::DATE32:
		r.Skip(4);
		break;
	case ColumnKind::STRING:
		r.Skip(r.u32());
		break;
	case ColumnKind::BOOL:
		r.Skip(1);
		break;
	}
}

void ChunkDecoder::Decode(size_t n, ColumnVector &out) {
	if (out.kind != kind_) {
		throw LakeGraphError(ErrorKind::InvalidArgument, "decode target kind mismatch");
	}
	n = static_cast<size_t>(std::min<uint64_t>(n, row_count_ - position_));
	switch (enc_) {
	case Encoding::PLAIN:
		for (size_t i = 0; i < n; i++) {
			DecodePlainOne(reader_, out);
		}
		break;
	case Encoding::DICT:
		for (size_t i = 0; i < n; i++) {
			uint32_t idx = index_reader_.u32();
			if (idx >= dict_.size()) {
				throw LakeGraphError(ErrorKind::FormatError, "dictionary index out of range");
			}
			out.Append(dict_.At(idx));
		}
		break;
	case Encoding::RLE:
		for (size_t i = 0; i < n; i++) {
			if (run_remaining_ == 0) {
				run_remaining_ = reader_.varint();
				if (run_remaining_ == 0) {
					throw LakeGraphError(ErrorKind::FormatError, "zero-length run");
				}
				ColumnVector one(kind_);
				DecodePlainOne(reader_, one);
				run_value_ = one.At(0);
			}
			out.Append(run_value_);
			run_remaining_--;
		}
		break;
	}
	position_ += n;
}

void ChunkDecoder::Skip(size_t n) {
	n = static_cast<size_t>(std::min<uint64_t>(n, row_count_ - position_));
	switch (enc_) {
	case Encoding::PLAIN:
		for (size_t i = 0; i < n; i++) {
			SkipPlainOne(reader_);
		}
		break;
	case Encoding::DICT:
		index_reader_.Skip(4 * n);
		break;
	case Encoding::RLE: {
		size_t left = n;
		while (left > 0) {
			if (run_remaining_ == 0) {
				run_remaining_ = reader_.varint();
				if (run_remaining_ == 0) {
					throw LakeGraphError(ErrorKind::FormatError, "zero-length run");
				}
				ColumnVector one(kind_);
				DecodePlainOne(reader_, one);
				run_value_ = one.At(0);
			}
			size_t take = static_cast<size_t>(std::min<uint64_t>(left, run_remaining_));
			run_remaining_ -= take;
			left -= take;
		}
		break;
	}
	}
	position_ += n;
}

ColumnVector DecodeChunk(const uint8_t *data, size_t len, ColumnKind kind, Encoding enc, uint64_t row_count) {
	ColumnVector out(kind);
	out.Reserve(row_count);
	ChunkDecoder dec(data, len, kind, enc, row_count);
	dec.Decode(row_count, out);
	return out;
}

std::optional<std::pair<Value, Value>> ComputeMinMax(const ColumnVector &values) {
	if (values.size() == 0) {
		return std::nullopt;
	}
	switch (values.kind) {
	case ColumnKind::INT64:
	case ColumnKind::DATE32: {
		int64_t lo = values.ints[0], hi = values.ints[0];
		for (int64_t v : values.ints) {
			lo = std::min(lo, v);
			hi = std::max(hi, v);
		}
		return std::make_pair(Value {lo}, Value {hi});
	}
	case ColumnKind::FLOAT64: {
		double lo = values.doubles[0], hi = values.doubles[0];
		for (double v : values.doubles) {
			lo = std::min(lo, v);
			hi = std::max(hi, v);
		}
		return std::make_pair(Value {lo}, Value {hi});
	}
	case ColumnKind::STRING:
	case ColumnKind::BOOL:
		return std::nullopt;
	}
	return std::nullopt;
}

} // namespace lakegraph
