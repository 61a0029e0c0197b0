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

#include "lakestore/lgc.hpp"

#include <cstring>

namespace lakegraph {

namespace {

void WriteBound(ByteWriter &w, const Value &v, ColumnKind kind) {
	switch (kind) {
	case ColumnKind::INT64:
		w.i64(std::get<int64_t>(v));
		break;
	case ColumnKind::DATE32:
		w.i32(static_cast<int32_t>(std::get<int64_t>(v)));
		break;
	case ColumnKind::FLOAT64:
		w.f64(std::get<double>(v));
		break;
	case ColumnKind::STRING:
		w.str16(std::get<std::string>(v));
		break;
	case ColumnKind::BOOL:
		w.u8(std::get<bool>(v) ? 1 : 0);
		break;
	}
}

Value ReadBound(ByteReader &r, ColumnKind kind) {
	switch (kind) {
	case ColumnKind::INT64:
		return r.i64();
	case ColumnKind::DATE32:
		return static_cast<int64_t>(r.i32());
	case ColumnKind::FLOAT64:
		return r.f64();
	case ColumnKind::STRING:
		return r.str16();
	case ColumnKind::BOOL:
		return r.u8() != 0;
	}
	throw LakeGraphError(ErrorKind::Internal, "unreachable column kind");
}

Bytes SerializeFooter(const TableMeta &meta) {
	Bytes out;
	ByteWriter w(out);
	w.u16(static_cast<uint16_t>(meta.schema.columns.size()));
	for (const auto &col : meta.schema.columns) {
		w.str16(col.name);
		w.u8(static_cast<uint8_t>(col.kind));
	}
	w.u32(static_cast<uint32_t>(meta.row_groups.size()));
	for (const auto &group : meta.row_groups) {
		w.u64(group.row_count);
		for (size_t c = 0; c < meta.schema.columns.size(); c++) {
			const auto &chunk = group.columns[c];
			w.u64(chunk.byte_offset);
			w.u64(chunk.byte_length);
			w.u8(static_cast<uint8_t>(chunk.encoding));
			w.u8(chunk.has_min_max ? 1 : 0);
			if (chunk.has_min_max) {
				WriteBound(w, chunk.min_value, meta.schema.columns[c].kind);
				WriteBound(w, chunk.max_value, meta.schema.columns[c].kind);
			}
		}
	}
	return out;
}

TableMeta ParseFooter(const Bytes &bytes) {
	ByteReader r(bytes.data(), bytes.size());
	TableMeta meta;
	uint16_t column_count = r.u16();
	meta.schema.columns.reserve(column_count);
	for (uint16_t c = 0; c < column_count; c++) {
		ColumnSchema col;
		col.name = r.str16();
		uint8_t kind = r.u8();
		if (kind > static_cast<uint8_t>(ColumnKind::BOOL)) {
			throw LakeGraphError(ErrorKind::FormatError, "unknown column kind id " + std::to_string(kind));
		}
		col.kind = static_cast<ColumnKind>(kind);
		meta.schema.columns.push_back(std::move(col));
	}
	uint32_t group_count = r.u32();
	meta.row_groups.reserve(group_count);
	for (uint32_t g = 0; g < group_count; g++) {
		RowGroupMeta group;
		group.row_count = r.u64();
		group.columns.reserve(column_count);
		for (uint16_t c = 0; c < column_count; c++) {
			ColumnChunkMeta chunk;
			chunk.byte_offset = r.u64();
			chunk.byte_length = r.u64();
			uint8_t enc = r.u8();
			if (enc > static_cast<uint8_t>(Encoding::RLE)) {
				throw LakeGraphError(ErrorKind::FormatError, "unknown encoding id " + std::to_string(enc));
			}
			chunk.encoding = static_cast<Encoding>(enc);
			chunk.has_min_max = r.u8() != 0;
			if (chunk.has_min_max) {
				chunk.min_value = ReadBound(r, meta.schema.columns[c].kind);
				chunk.max_value = ReadBound(r, meta.schema.columns[c].kind);
			}
			group.columns.push_back(std::move(chunk));
		}
		meta.row_groups.push_back(std::move(group));
	}
	if (!r.exhausted()) {
		throw LakeGraphError(ErrorKind::FormatError, "trailing bytes after footer");
	}
	return meta;
}

} // namespace

TableWriter::TableWriter(TableSchema schema, uint64_t row_group_size, std::vector<Encoding> encodings)
    : schema_(std::move(schema)), row_group_size_(row_group_size), encodings_(std::move(encodings)) {
	if (row_group_size_ == 0) {
		throw LakeGraphError(ErrorKind::InvalidArgument, "rowGroupSize must be positive");
	}
	if (schema_.columns.empty()) {
		throw LakeGraphError(ErrorKind::InvalidArgument, "table schema has no columns");
	}
	if (encodings_.empty()) {
		encodings_.assign(schema_.columns.size(), Encoding::PLAIN);
	}
	if (encodings_.size() != schema_.columns.size()) {
		throw LakeGraphError(ErrorKind::InvalidArgument, "encoding list does not match column count");
	}
	for (size_t c = 0; c < schema_.columns.size(); c++) {
		if (!EncodingApplicable(encodings_[c], schema_.columns[c].kind)) {
			throw LakeGraphError(ErrorKind::InvalidArgument,
			                     "encoding not applicable to column " + schema_.columns[c].name);
		}
		buffers_.emplace_back(schema_.columns[c].kind);
	}
	meta_.schema = schema_;
	body_.insert(body_.end(), kLgcMagic, kLgcMagic + 4);
}

void TableWriter::AppendRow(const std::vector<Value> &row) {
	if (row.size() != schema_.columns.size()) {
		throw LakeGraphError(ErrorKind::InvalidArgument,
		                     "row arity " + std::to_string(row.size()) + " does not match schema arity " +
		                     std::to_string(schema_.columns.size()));
	}
	for (size_t c = 0; c < row.size(); c++) {
		buffers_[c].Append(row[c]);
	}
	if (buffers_[0].size() >= row_group_size_) {
		FlushRowGroup();
	}
}

void TableWriter::FlushRowGroup() {
	size_t rows = buffers_[0].size();
	if (rows == 0) {
		return;
	}
	RowGroupMeta group;
	group.row_count = rows;
	for (size_t c = 0; c < buffers_.size(); c++) {
		Bytes chunk = EncodeChunk(buffers_[c], encodings_[c]);
		ColumnChunkMeta cm;
		cm.byte_offset = body_.size();
		cm.byte_length = chunk.size();
		cm.encoding = encodings_[c];
		if (auto mm = ComputeMinMax(buffers_[c])) {
			cm.has_min_max = true;
			cm.min_value = mm->first;
			cm.max_value = mm->second;
		}
		body_.insert(body_.end(), chunk.begin(), chunk.end());
		group.columns.push_back(std::move(cm));
		buffers_[c].Clear();
	}
	meta_.row_groups.push_back(std::move(group));
}

Bytes TableWriter::Finish() {
	if (finished_) {
		throw LakeGraphError(ErrorKind::ContractViolation, "table writer already finished");
	}
	finished_ = true;
	FlushRowGroup();
	Bytes footer = SerializeFooter(meta_);
	ByteWriter w(body_);
	w.raw(footer.data(), footer.size());
	w.u32(static_cast<uint32_t>(footer.size()));
	w.raw(kLgcMagic, 4);
	return std::move(body_);
}

void WriteTable(ObjectStore &store, const std::string &path, const TableSchema &schema,
                const std::vector<std::vector<Value>> &rows, uint64_t row_group_size,
                const std::vector<Encoding> &encodings) {
	TableWriter writer(schema, row_group_size, encodings);
	for (const auto &row : rows) {
		writer.AppendRow(row);
	}
	Bytes bytes = writer.Finish();
	store.Put(path, bytes);
}

TableMeta ReadFooter(ObjectStore &store, const std::string &path) {
	uint64_t size = store.Size(path);
	if (size < 12) {
		throw LakeGraphError(ErrorKind::FormatError, "file too small for a footer: " + path);
	}
	Bytes tail = store.Get(path, size - 8, 8);
	if (std::memcmp(tail.data() + 4, kLgcMagic, 4) != 0) {
		throw LakeGraphError(ErrorKind::FormatError, "bad trailing magic in " + path);
	}
	ByteReader tr(tail.data(), 4);
	uint32_t footer_len = tr.u32();
	if (static_cast<uint64_t>(footer_len) + 12 > size) {
		throw LakeGraphError(ErrorKind::FormatError, "footer length exceeds file size in " + path);
	}
	uint64_t footer_start = size - 8 - footer_len;
	Bytes footer = store.Get(path, footer_start, footer_len);
	TableMeta meta = ParseFooter(footer);
	for (const auto &group : meta.row_groups) {
		for (const auto &chunk : group.columns) {
			if (chunk.byte_offset < 4 || chunk.byte_offset + chunk.byte_length > footer_start) {
				throw LakeGraphError(ErrorKind::FormatError, "chunk byte range outside file body in " + path);
			}
		}
	}
	return meta;
}

Bytes ReadColumnChunkBytes(ObjectStore &store, const std::string &path, const ColumnChunkMeta &chunk) {
	return store.Get(path, chunk.byte_offset, chunk.byte_length);
}

ColumnVector ReadColumnChunk(ObjectStore &store, const std::string &path, const TableMeta &meta, size_t group,
                             size_t column) {
	if (group >= meta.row_groups.size() || column >= meta.schema.columns.size()) {
		throw LakeGraphError(ErrorKind::InvalidArgument, "row group or column index out of range");
	}
	const auto &g = meta.row_groups[group];
	const auto &chunk = g.columns[column];
	Bytes bytes = ReadColumnChunkBytes(store, path, chunk);
	return DecodeChunk(bytes.data(), bytes.size(), meta.schema.columns[column].kind, chunk.encoding, g.row_count);
}

} // namespace lakegraph
