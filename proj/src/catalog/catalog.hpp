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
#include <optional>
#include <string>
#include <vector>

#include "lakestore/lgc.hpp"

namespace lakegraph {

struct VertexTypeDef {
	std::string type;
	std::string table;
	std::string key;
};

struct EdgeTypeDef {
	std::string type;
	std::string table;
	std::string src_key;
	std::string src_type;
	std::string tgt_key;
	std::string tgt_type;
};

struct GraphSchema {
	std::vector<VertexTypeDef> vertices;
	std::vector<EdgeTypeDef> edges;

	static GraphSchema FromJson(const std::string &json);
	std::string ToJson() const;

	const VertexTypeDef *FindVertexType(const std::string &type) const;
	const EdgeTypeDef *FindEdgeType(const std::string &type) const;
	const VertexTypeDef *FindVertexByTable(const std::string &table) const;
	const EdgeTypeDef *FindEdgeByTable(const std::string &table) const;
};

struct ManifestFile {
	std::string path;
	uint64_t row_count = 0;
};

struct TableManifest {
	std::string table;
	uint64_t version = 0;
	std::vector<ManifestFile> files;

	static TableManifest FromJson(const std::string &json);
	std::string ToJson() const;
};

inline std::string ManifestPath(const std::string &table) {
	return "tables/" + table + "/manifest.json";
}

constexpr const char *kRegistryPath = "_lakegraph/registry.json";
constexpr const char *kTopologyPrefix = "_lakegraph/topology/";

enum class FileKind : uint8_t {
	Vertex = 1,
	Edge = 2,
};

struct FileEntry {
	uint32_t file_id = 0;
	std::string path;
	std::string table;
	uint64_t row_count = 0;
	FileKind kind = FileKind::Vertex;
};

// Table data file identities. IDs start at 1 (0 is reserved for dangling
// vertices) and are never reused once retired.
class FileRegistry {
public:
	uint64_t version = 1;
	uint32_t next_file_id = 1;
	std::map<uint32_t, FileEntry> entries;            // ordered by fileId
	std::map<std::string, uint64_t> table_versions;   // manifest versions at last sync

	const FileEntry *Find(uint32_t file_id) const;
	const FileEntry &Require(uint32_t file_id) const;
	const FileEntry *FindByPath(const std::string &table, const std::string &path) const;
	std::vector<const FileEntry *> TableFiles(const std::string &table) const;
	std::vector<const FileEntry *> FilesOfKind(FileKind kind) const;
	uint32_t MaxFileId() const { return entries.empty() ? 0 : entries.rbegin()->first; }

	// Hash of the vertex id space (sorted vertex fileId/path/rowCount
	// triples). Materialized edge lists embed a value derived from it so any
	// change to the vertex space invalidates them.
	uint64_t VertexSpaceFingerprint() const;

	std::string ToJson() const;
	static FileRegistry FromJson(const std::string &json);
};

struct ManifestDiff {
	struct AddedFile {
		std::string table;
		std::string path;
		uint64_t row_count = 0;
	};
	std::vector<AddedFile> added;
	std::vector<uint32_t> removed;
	std::map<std::string, uint64_t> new_table_versions;

	bool Empty() const { return added.empty() && removed.empty(); }
};

// Parsed graph metadata plus its file registry. Loading prefers the
// persisted registry (stable fileIds across restarts) and falls back to a
// deterministic lexicographic assignment for fresh stores.
class Catalog {
public:
	static Catalog Load(ObjectStore &store, const std::string &schema_path);

	// Re-reads manifests and reports changes relative to the registry.
	ManifestDiff DiffManifests(ObjectStore &store) const;
	// Retires removed files, assigns fresh ids to added ones, bumps version.
	void ApplyDiff(const ManifestDiff &diff);
	void PersistRegistry(ObjectStore &store) const;

	GraphSchema schema;
	FileRegistry registry;
	bool loaded_from_persisted_registry = false;

private:
	static void ValidateSchema(const GraphSchema &schema);
	static std::map<std::string, TableManifest> ReadManifests(ObjectStore &store, const GraphSchema &schema);
	static void ValidateKeyColumns(ObjectStore &store, const GraphSchema &schema,
	                               const std::map<std::string, TableManifest> &manifests);
};

} // namespace lakegraph
