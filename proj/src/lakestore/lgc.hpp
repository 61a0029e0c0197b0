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

//===----------------------------------------------------------------------===//
// LGC columnar table files.
//
// Layout:
//   "LGC1"
//   row group 0: column 0 chunk, column 1 chunk, ...
//   row group 1: ...
//   footer
//   u32 footerLength
//   "LGC1"
//
// Footer:
//   u16 columnCount
//   per column: u16 nameLen, name bytes, u8 kind
//   u32 rowGroupCount
//   per group:
//     u64 rowCount
//     per column: u64 byteOffset, u64 byteLength, u8 encoding, u8 hasMinMax,
//                 then typed min and max when hasMinMax=1
//                 (INT64 i64, DATE32 i32, FLOAT64 f64, STRING u16 len + bytes)
//
// Byte offsets are absolute within the file. No nulls, no compression.
//===----------------------------------------------------------------------===//

#pragma once

#include "lakestore/encoding.hpp"
#include "lakestore/object_store.hpp"

namespace lakegraph {

constexpr char kLgcMagic[4] = {'L', 'G', 'C', '1'};

struct ColumnSchema {
	std::string name;
	ColumnKind kind;
};

struct TableSchema {
	std::vector<ColumnSchema> columns;

	int Find(const std::string &name) const {
		for (size_t i = 0; i < columns.size(); i++) {
			if (columns[i].name == name) {
				return static_cast<int>(i);
			}
		}
		return -1;
	}
};

struct ColumnChunkMeta {
	uint64_t byte_offset = 0;
	uint64_t byte_length = 0;
	Encoding encoding = Encoding::PLAIN;
	bool has_min_max = false;
	Value min_value {int64_t {0}};
	Value max_value {int64_t {0}};
};

struct RowGroupMeta {
	uint64_t row_count = 0;
	std::vector<ColumnChunkMeta> columns;
};

struct TableMeta {
	TableSchema schema;
	std::vector<RowGroupMeta> row_groups;

	uint64_t TotalRows() const {
		uint64_t n = 0;
		for (const auto &g : row_groups) {
			n += g.row_count;
		}
		return n;
	}
	// Starting row index of each group plus a trailing total.
	std::vector<uint64_t> RowOffsets() const {
		std::vector<uint64_t> offsets;
		offsets.reserve(row_groups.size() + 1);
		uint64_t n = 0;
		for (const auto &g : row_groups) {
			offsets.push_back(n);
			n += g.row_count;
		}
		offsets.push_back(n);
		return offsets;
	}
};

// Streams rows into row groups and assembles the final file image in memory
// (objects are written with a single immutable put).
class TableWriter {
public:
	TableWriter(TableSchema schema, uint64_t row_group_size, std::vector<Encoding> encodings);

	void AppendRow(const std::vector<Value> &row);
	// Serializes buffered data and returns the complete file bytes.
	Bytes Finish();

	const TableMeta &meta() const { return meta_; }

private:
	void FlushRowGroup();

	TableSchema schema_;
	uint64_t row_group_size_;
	std::vector<Encoding> encodings_;
	std::vector<ColumnVector> buffers_;
	Bytes body_;
	TableMeta meta_;
	bool finished_ = false;
};

void WriteTable(ObjectStore &store, const std::string &path, const TableSchema &schema,
                const std::vector<std::vector<Value>> &rows, uint64_t row_group_size,
                const std::vector<Encoding> &encodings);

// Fetches table metadata with exactly two ranged reads: the trailing 8 bytes
// (footer length + magic), then the footer body. Object size comes from a
// metadata probe, not a get.
TableMeta ReadFooter(ObjectStore &store, const std::string &path);

// Fetches one column chunk with exactly one ranged read.
Bytes ReadColumnChunkBytes(ObjectStore &store, const std::string &path, const ColumnChunkMeta &chunk);

ColumnVector ReadColumnChunk(ObjectStore &store, const std::string &path, const TableMeta &meta, size_t group,
                             size_t column);

} // namespace lakegraph
