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

#include <map>
#include <string>
#include <vector>

#include "catalog/catalog.hpp"
#include "lakestore/lgc.hpp"

namespace lakegraph::testing {

struct TableFixture {
	std::string name;
	TableSchema schema;
	std::vector<std::vector<Value>> rows;
	size_t file_count = 1;
	uint64_t row_group_size = 4;
	std::vector<Encoding> encodings;
	uint64_t manifest_version = 1;
};

inline std::string PartPath(const std::string &table, size_t index) {
	return "tables/" + table + "/data/part-" + std::to_string(index) + ".lgc";
}

// Splits rows evenly into file_count parts (front-loaded remainder) and
// writes parts plus the manifest.
inline void WriteTableFixture(ObjectStore &store, const TableFixture &t) {
	TableManifest manifest;
	manifest.table = t.name;
	manifest.version = t.manifest_version;
	size_t n = t.rows.size();
	size_t per = t.file_count ? (n + t.file_count - 1) / t.file_count : n;
	for (size_t f = 0; f < t.file_count; f++) {
		size_t begin = std::min(n, f * per);
		size_t end = std::min(n, begin + per);
		std::vector<std::vector<Value>> part(t.rows.begin() + begin, t.rows.begin() + end);
		std::string path = PartPath(t.name, f);
		WriteTable(store, path, t.schema, part, t.row_group_size, t.encodings);
		manifest.files.push_back({path, part.size()});
	}
	std::string mj = manifest.ToJson();
	store.Put(ManifestPath(t.name), reinterpret_cast<const uint8_t *>(mj.data()), mj.size());
}

inline void WriteGraphFixture(ObjectStore &store, const GraphSchema &schema,
                              const std::vector<TableFixture> &tables,
                              const std::string &schema_path = "graph.json") {
	for (const auto &t : tables) {
		WriteTableFixture(store, t);
	}
	std::string sj = schema.ToJson();
	store.Put(schema_path, reinterpret_cast<const uint8_t *>(sj.data()), sj.size());
}

// Small person/comment/tag fixture used across module tests.
//
//   person(id INT64 key, name STRING, gender STRING, age INT64)
//   tag(id INT64 key, name STRING)
//   comment(id INT64 key, content STRING)
//   knows(src INT64, tgt INT64, since DATE32)        person -> person
//   hasCreator(commentId INT64, personId INT64, date DATE32)  comment -> person
//   hasTag(commentId INT64, tagId INT64)             comment -> tag
struct SocialFixture {
	GraphSchema schema;
	std::vector<TableFixture> tables;

	static GraphSchema MakeSchema() {
		GraphSchema s;
		s.vertices = {{"person", "person", "id"}, {"comment", "comment", "id"}, {"tag", "tag", "id"}};
		s.edges = {{"knows", "knows", "src", "person", "tgt", "person"},
		           {"hasCreator", "hasCreator", "commentId", "comment", "personId", "person"},
		           {"hasTag", "hasTag", "commentId", "comment", "tagId", "tag"}};
		return s;
	}
};

} // namespace lakegraph::testing
