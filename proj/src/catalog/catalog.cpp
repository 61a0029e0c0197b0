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

#include "catalog/catalog.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

using json = nlohmann::json;

namespace lakegraph {

namespace {

std::string JsonString(const json &j, const char *field, const std::string &ctx) {
	if (!j.contains(field) || !j[field].is_string()) {
		throw LakeGraphError(ErrorKind::FormatError, ctx + ": missing string field '" + field + "'");
	}
	return j[field].get<std::string>();
}

} // namespace

GraphSchema GraphSchema::FromJson(const std::string &text) {
	json j;
	try {
		j = json::parse(text);
	} catch (const std::exception &e) {
		throw LakeGraphError(ErrorKind::FormatError, std::string("invalid schema JSON: ") + e.what());
	}
	GraphSchema schema;
	for (const auto &v : j.value("vertices", json::array())) {
		VertexTypeDef def;
		def.type = JsonString(v, "type", "vertex");
		def.table = JsonString(v, "table", "vertex " + def.type);
		def.key = JsonString(v, "key", "vertex " + def.type);
		schema.vertices.push_back(std::move(def));
	}
	for (const auto &e : j.value("edges", json::array())) {
		EdgeTypeDef def;
		def.type = JsonString(e, "type", "edge");
		def.table = JsonString(e, "table", "edge " + def.type);
		def.src_key = JsonString(e, "srcKey", "edge " + def.type);
		def.src_type = JsonString(e, "srcType", "edge " + def.type);
		def.tgt_key = JsonString(e, "tgtKey", "edge " + def.type);
		def.tgt_type = JsonString(e, "tgtType", "edge " + def.type);
		schema.edges.push_back(std::move(def));
	}
	return schema;
}

std::string GraphSchema::ToJson() const {
	json j;
	j["vertices"] = json::array();
	for (const auto &v : vertices) {
		j["vertices"].push_back({{"type", v.type}, {"table", v.table}, {"key", v.key}});
	}
	j["edges"] = json::array();
	for (const auto &e : edges) {
		j["edges"].push_back({{"type", e.type},
		                      {"table", e.table},
		                      {"srcKey", e.src_key},
		                      {"srcType", e.src_type},
		                      {"tgtKey", e.tgt_key},
		                      {"tgtType", e.tgt_type}});
	}
	return j.dump(2);
}

const VertexTypeDef *GraphSchema::FindVertexType(const std::string &type) const {
	for (const auto &v : vertices) {
		if (v.type == type) {
			return &v;
		}
	}
	return nullptr;
}

const EdgeTypeDef *GraphSchema::FindEdgeType(const std::string &type) const {
	for (const auto &e : edges) {
		if (e.type == type) {
			return &e;
		}
	}
	return nullptr;
}

const VertexTypeDef *GraphSchema::FindVertexByTable(const std::string &table) const {
	for (const auto &v : vertices) {
		if (v.table == table) {
			return &v;
		}
	}
	return nullptr;
}

const EdgeTypeDef *GraphSchema::FindEdgeByTable(const std::string &table) const {
	for (const auto &e : edges) {
		if (e.table == table) {
			return &e;
		}
	}
	return nullptr;
}

TableManifest TableManifest::FromJson(const std::string &text) {
	json j;
	try {
		j = json::parse(text);
	} catch (const std::exception &e) {
		throw LakeGraphError(ErrorKind::FormatError, std::string("invalid manifest JSON: ") + e.what());
	}
	TableManifest m;
	m.table = JsonString(j, "table", "manifest");
	if (!j.contains("version") || !j["version"].is_number_unsigned()) {
		throw LakeGraphError(ErrorKind::FormatError, "manifest " + m.table + ": missing unsigned 'version'");
	}
	m.version = j["version"].get<uint64_t>();
	for (const auto &f : j.value("files", json::array())) {
		ManifestFile mf;
		mf.path = JsonString(f, "path", "manifest " + m.table);
		if (!f.contains("rowCount") || !f["rowCount"].is_number_unsigned()) {
			throw LakeGraphError(ErrorKind::FormatError,
			                     "manifest " + m.table + ": file " + mf.path + " missing unsigned 'rowCount'");
		}
		mf.row_count = f["rowCount"].get<uint64_t>();
		m.files.push_back(std::move(mf));
	}
	return m;
}

std::string TableManifest::ToJson() const {
	json j;
	j["table"] = table;
	j["version"] = version;
	j["files"] = json::array();
	for (const auto &f : files) {
		j["files"].push_back({{"path", f.path}, {"rowCount", f.row_count}});
	}
	return j.dump(2);
}

const FileEntry *FileRegistry::Find(uint32_t file_id) const {
	auto it = entries.find(file_id);
	return it == entries.end() ? nullptr : &it->second;
}

const FileEntry &FileRegistry::Require(uint32_t file_id) const {
	const FileEntry *e = Find(file_id);
	if (!e) {
		throw LakeGraphError(ErrorKind::NotFound, "file id not registered: " + std::to_string(file_id));
	}
	return *e;
}

const FileEntry *FileRegistry::FindByPath(const std::string &table, const std::string &path) const {
	for (const auto &[id, e] : entries) {
		if (e.table == table && e.path == path) {
			return &e;
		}
	}
	return nullptr;
}

std::vector<const FileEntry *> FileRegistry::TableFiles(const std::string &table) const {
	std::vector<const FileEntry *> out;
	for (const auto &[id, e] : entries) {
		if (e.table == table) {
			out.push_back(&e);
		}
	}
	return out;
}

std::vector<const FileEntry *> FileRegistry::FilesOfKind(FileKind kind) const {
	std::vector<const FileEntry *> out;
	for (const auto &[id, e] : entries) {
		if (e.kind == kind) {
			out.push_back(&e);
		}
	}
	return out;
}

uint64_t FileRegistry::VertexSpaceFingerprint() const {
	uint64_t h = 14695981039346656037ULL;
	for (const auto &[id, e] : entries) {
		if (e.kind != FileKind::Vertex) {
			continue;
		}
		uint32_t fid = e.file_id;
		h = Fnv1a64(&fid, sizeof(fid), h);
		h = Fnv1a64(e.path, h);
		uint64_t rc = e.row_count;
		h = Fnv1a64(&rc, sizeof(rc), h);
	}
	return h;
}

std::string FileRegistry::ToJson() const {
	json j;
	j["version"] = version;
	j["nextFileId"] = next_file_id;
	j["entries"] = json::array();
	for (const auto &[id, e] : entries) {
		j["entries"].push_back({{"fileId", e.file_id},
		                        {"path", e.path},
		                        {"table", e.table},
		                        {"rowCount", e.row_count},
		                        {"kind", e.kind == FileKind::Vertex ? "vertex" : "edge"}});
	}
	j["tableVersions"] = json::object();
	for (const auto &[table, v] : table_versions) {
		j["tableVersions"][table] = v;
	}
	return j.dump(2);
}

FileRegistry FileRegistry::FromJson(const std::string &text) {
	json j;
	try {
		j = json::parse(text);
	} catch (const std::exception &e) {
		throw LakeGraphError(ErrorKind::FormatError, std::string("invalid registry JSON: ") + e.what());
	}
	FileRegistry reg;
	reg.version = j.at("version").get<uint64_t>();
	reg.next_file_id = j.at("nextFileId").get<uint32_t>();
	const json entries = j.value("entries", json::array());
	for (const auto &e : entries) {
		FileEntry entry;
		entry.file_id = e.at("fileId").get<uint32_t>();
		entry.path = e.at("path").get<std::string>();
		entry.table = e.at("table").get<std::string>();
		entry.row_count = e.at("rowCount").get<uint64_t>();
		entry.kind = e.at("kind").get<std::string>() == "vertex" ? FileKind::Vertex : FileKind::Edge;
		reg.entries.emplace(entry.file_id, std::move(entry));
	}
	const json versions = j.value("tableVersions", json::object());
	for (const auto &[table, v] : versions.items()) {
		reg.table_versions[table] = v.get<uint64_t>();
	}
	return reg;
}

void Catalog::ValidateSchema(const GraphSchema &schema) {
	std::set<std::string> type_names;
	std::set<std::string> tables;
	for (const auto &v : schema.vertices) {
		if (!type_names.insert(v.type).second) {
			throw LakeGraphError(ErrorKind::InvalidArgument, "duplicate type name in schema: " + v.type);
		}
		if (!tables.insert(v.table).second) {
			throw LakeGraphError(ErrorKind::InvalidArgument, "table referenced by multiple types: " + v.table);
		}
	}
	for (const auto &e : schema.edges) {
		if (!type_names.insert(e.type).second) {
			throw LakeGraphError(ErrorKind::InvalidArgument, "duplicate type name in schema: " + e.type);
		}
		if (!tables.insert(e.table).second) {
			throw LakeGraphError(ErrorKind::InvalidArgument, "table referenced by multiple types: " + e.table);
		}
		if (!schema.FindVertexType(e.src_type)) {
			throw LakeGraphError(ErrorKind::InvalidArgument,
			                     "edge " + e.type + " references undeclared srcType " + e.src_type);
		}
		if (!schema.FindVertexType(e.tgt_type)) {
			throw LakeGraphError(ErrorKind::InvalidArgument,
			                     "edge " + e.type + " references undeclared tgtType " + e.tgt_type);
		}
	}
}

std::map<std::string, TableManifest> Catalog::ReadManifests(ObjectStore &store, const GraphSchema &schema) {
	std::map<std::string, TableManifest> manifests;
	auto read_one = [&](const std::string &table) {
		std::string path = ManifestPath(table);
		if (!store.Exists(path)) {
			throw LakeGraphError(ErrorKind::NotFound, "dangling table reference: no manifest for table " + table);
		}
		Bytes raw = store.GetAll(path);
		TableManifest m = TableManifest::FromJson(std::string(raw.begin(), raw.end()));
		if (m.table != table) {
			throw LakeGraphError(ErrorKind::FormatError,
			                     "manifest at " + path + " declares table " + m.table);
		}
		std::set<std::string> paths;
		for (const auto &f : m.files) {
			if (!paths.insert(f.path).second) {
				throw LakeGraphError(ErrorKind::FormatError, "duplicate file path in manifest " + table);
			}
			if (f.row_count >= (1ULL << 32)) {
				throw LakeGraphError(ErrorKind::InvalidArgument,
				                     "file " + f.path + " rowCount exceeds 32-bit row index space");
			}
		}
		manifests.emplace(table, std::move(m));
	};
	for (const auto &v : schema.vertices) {
		read_one(v.table);
	}
	for (const auto &e : schema.edges) {
		read_one(e.table);
	}
	return manifests;
}

void Catalog::ValidateKeyColumns(ObjectStore &store, const GraphSchema &schema,
                                 const std::map<std::string, TableManifest> &manifests) {
	auto check = [&](const std::string &table, const std::vector<std::string> &keys) {
		const auto &m = manifests.at(table);
		if (m.files.empty()) {
			return;
		}
		// One footer per table is enough for schema-level validation; per-file
		// consistency is enforced when chunks are actually read.
		std::string first = std::min_element(m.files.begin(), m.files.end(), [](const auto &a, const auto &b) {
			                    return a.path < b.path;
		                    })->path;
		TableMeta meta = ReadFooter(store, first);
		for (const auto &key : keys) {
			int idx = meta.schema.Find(key);
			if (idx < 0) {
				throw LakeGraphError(ErrorKind::InvalidArgument,
				                     "key column " + key + " missing from table " + table);
			}
			ColumnKind kind = meta.schema.columns[idx].kind;
			if (kind != ColumnKind::INT64 && kind != ColumnKind::STRING) {
				throw LakeGraphError(ErrorKind::InvalidArgument,
				                     "key column " + key + " of table " + table + " must be INT64 or STRING, got " +
				                     ColumnKindName(kind));
			}
		}
	};
	for (const auto &v : schema.vertices) {
		check(v.table, {v.key});
	}
	for (const auto &e : schema.edges) {
		check(e.table, {e.src_key, e.tgt_key});
	}
}

Catalog Catalog::Load(ObjectStore &store, const std::string &schema_path) {
	if (!store.Exists(schema_path)) {
		throw LakeGraphError(ErrorKind::NotFound, "graph schema not found at " + schema_path);
	}
	Bytes raw = store.GetAll(schema_path);
	Catalog catalog;
	catalog.schema = GraphSchema::FromJson(std::string(raw.begin(), raw.end()));
	ValidateSchema(catalog.schema);

	auto manifests = ReadManifests(store, catalog.schema);
	ValidateKeyColumns(store, catalog.schema, manifests);

	if (store.Exists(kRegistryPath)) {
		Bytes reg_raw = store.GetAll(kRegistryPath);
		catalog.registry = FileRegistry::FromJson(std::string(reg_raw.begin(), reg_raw.end()));
		catalog.loaded_from_persisted_registry = true;
		ManifestDiff diff = catalog.DiffManifests(store);
		if (!diff.Empty()) {
			catalog.ApplyDiff(diff);
		} else {
			catalog.registry.table_versions.clear();
			for (const auto &[table, m] : manifests) {
				catalog.registry.table_versions[table] = m.version;
			}
		}
		return catalog;
	}

	// Fresh assignment: (tableName, filePath) lexicographic order, ids from 1.
	std::vector<std::pair<std::string, std::string>> ordered; // (table, path)
	std::map<std::pair<std::string, std::string>, uint64_t> row_counts;
	std::map<std::string, FileKind> table_kinds;
	for (const auto &v : catalog.schema.vertices) {
		table_kinds[v.table] = FileKind::Vertex;
	}
	for (const auto &e : catalog.schema.edges) {
		table_kinds[e.table] = FileKind::Edge;
	}
	for (const auto &[table, m] : manifests) {
		for (const auto &f : m.files) {
			ordered.emplace_back(table, f.path);
			row_counts[{table, f.path}] = f.row_count;
		}
		catalog.registry.table_versions[table] = m.version;
	}
	std::sort(ordered.begin(), ordered.end());
	for (const auto &[table, path] : ordered) {
		FileEntry entry;
		entry.file_id = catalog.registry.next_file_id++;
		entry.path = path;
		entry.table = table;
		entry.row_count = row_counts[{table, path}];
		entry.kind = table_kinds[table];
		catalog.registry.entries.emplace(entry.file_id, std::move(entry));
	}
	catalog.registry.version = 1;
	return catalog;
}

ManifestDiff Catalog::DiffManifests(ObjectStore &store) const {
	auto manifests = ReadManifests(store, schema);
	ManifestDiff diff;
	for (const auto &[table, m] : manifests) {
		diff.new_table_versions[table] = m.version;
	}

	std::set<std::pair<std::string, std::string>> current; // (table, path)
	for (const auto &[table, m] : manifests) {
		for (const auto &f : m.files) {
			current.insert({table, f.path});
			if (!registry.FindByPath(table, f.path)) {
				diff.added.push_back({table, f.path, f.row_count});
			}
		}
	}
	std::set<std::string> changed_tables;
	for (const auto &a : diff.added) {
		changed_tables.insert(a.table);
	}
	for (const auto &[id, e] : registry.entries) {
		if (!current.count({e.table, e.path})) {
			diff.removed.push_back(id);
			changed_tables.insert(e.table);
		}
	}
	// Manifest versions must strictly increase whenever the file list changed.
	for (const auto &table : changed_tables) {
		auto it = registry.table_versions.find(table);
		if (it != registry.table_versions.end() && manifests.at(table).version <= it->second) {
			throw LakeGraphError(ErrorKind::ContractViolation,
			                     "manifest for table " + table + " changed its file list without a version bump (" +
			                     std::to_string(manifests.at(table).version) + " <= " + std::to_string(it->second) +
			                     ")");
		}
	}
	return diff;
}

void Catalog::ApplyDiff(const ManifestDiff &diff) {
	if (diff.Empty()) {
		for (const auto &[table, v] : diff.new_table_versions) {
			registry.table_versions[table] = v;
		}
		return;
	}
	std::map<std::string, FileKind> table_kinds;
	for (const auto &v : schema.vertices) {
		table_kinds[v.table] = FileKind::Vertex;
	}
	for (const auto &e : schema.edges) {
		table_kinds[e.table] = FileKind::Edge;
	}
	for (uint32_t id : diff.removed) {
		registry.entries.erase(id);
	}
	// Fresh ids in deterministic (table, path) order; retired ids never return.
	auto added = diff.added;
	std::sort(added.begin(), added.end(), [](const auto &a, const auto &b) {
		return std::tie(a.table, a.path) < std::tie(b.table, b.path);
	});
	for (const auto &a : added) {
		FileEntry entry;
		entry.file_id = registry.next_file_id++;
		entry.path = a.path;
		entry.table = a.table;
		entry.row_count = a.row_count;
		entry.kind = table_kinds.at(a.table);
		registry.entries.emplace(entry.file_id, std::move(entry));
	}
	registry.version++;
	for (const auto &[table, v] : diff.new_table_versions) {
		registry.table_versions[table] = v;
	}
}

void Catalog::PersistRegistry(ObjectStore &store) const {
	std::string json_text = registry.ToJson();
	store.Put(kRegistryPath, reinterpret_cast<const uint8_t *>(json_text.data()), json_text.size());
}

} // namespace lakegraph
