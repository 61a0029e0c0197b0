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

#include <set>

#include "catalog/catalog.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "helpers.hpp"

using namespace lakegraph;
using namespace lakegraph::testing;

namespace {

TableFixture VertexTable(const std::string &name, int base, size_t rows, size_t files) {
	TableFixture t;
	t.name = name;
	t.schema = TableSchema {{{"id", ColumnKind::INT64}, {"label", ColumnKind::STRING}}};
	for (size_t i = 0; i < rows; i++) {
		t.rows.push_back({static_cast<int64_t>(base + i), name + std::to_string(i)});
	}
	t.file_count = files;
	return t;
}

TableFixture EdgeTable(const std::string &name, size_t rows, size_t files) {
	TableFixture t;
	t.name = name;
	t.schema = TableSchema {{{"src", ColumnKind::INT64}, {"tgt", ColumnKind::INT64}}};
	for (size_t i = 0; i < rows; i++) {
		t.rows.push_back({static_cast<int64_t>(i), static_cast<int64_t>(i + 1)});
	}
	t.file_count = files;
	return t;
}

GraphSchema TwoVertexOneEdgeSchema() {
	GraphSchema s;
	s.vertices = {{"comment", "comment", "id"}, {"person", "person", "id"}};
	s.edges = {{"knows", "knows", "src", "person", "tgt", "person"}};
	return s;
}

void WriteBaseFixture(ObjectStore &store) {
	WriteGraphFixture(store, TwoVertexOneEdgeSchema(),
	                  {VertexTable("comment", 100, 6, 2), VertexTable("person", 1, 6, 2), EdgeTable("knows", 5, 2)});
}

// Rewrites the knows manifest with the given file list.
void RewriteKnowsManifest(ObjectStore &store, uint64_t version, const std::vector<ManifestFile> &files) {
	TableManifest m;
	m.table = "knows";
	m.version = version;
	m.files = files;
	std::string mj = m.ToJson();
	store.Put(ManifestPath("knows"), reinterpret_cast<const uint8_t *>(mj.data()), mj.size());
}

} // namespace

TEST_CASE("loadCatalog assigns lexicographic file ids starting at 1") {
	TempDir dir;
	LocalStore store(dir.path());
	WriteBaseFixture(store);
	Catalog cat = Catalog::Load(store, "graph.json");
	REQUIRE(cat.registry.entries.size() == 6);
	// (table, path) lexicographic: comment < knows < person.
	CHECK(cat.registry.Require(1).table == "comment");
	CHECK(cat.registry.Require(1).path == PartPath("comment", 0));
	CHECK(cat.registry.Require(2).path == PartPath("comment", 1));
	CHECK(cat.registry.Require(3).table == "knows");
	CHECK(cat.registry.Require(4).table == "knows");
	CHECK(cat.registry.Require(5).table == "person");
	CHECK(cat.registry.Require(6).path == PartPath("person", 1));
	CHECK(cat.registry.Require(3).kind == FileKind::Edge);
	CHECK(cat.registry.Require(5).kind == FileKind::Vertex);
	CHECK(cat.registry.Require(1).row_count == 3);
	CHECK(cat.registry.next_file_id == 7);
}

TEST_CASE("re-running loadCatalog on unchanged storage is deterministic") {
	TempDir dir;
	LocalStore store(dir.path());
	WriteBaseFixture(store);
	Catalog a = Catalog::Load(store, "graph.json");
	Catalog b = Catalog::Load(store, "graph.json");
	REQUIRE(a.registry.entries.size() == b.registry.entries.size());
	for (const auto &[id, e] : a.registry.entries) {
		const FileEntry &other = b.registry.Require(id);
		CHECK(other.path == e.path);
		CHECK(other.table == e.table);
		CHECK(other.row_count == e.row_count);
	}
	CHECK(a.registry.VertexSpaceFingerprint() == b.registry.VertexSpaceFingerprint());
}

TEST_CASE("registry covers exactly the manifest files") {
	TempDir dir;
	LocalStore store(dir.path());
	WriteBaseFixture(store);
	Catalog cat = Catalog::Load(store, "graph.json");
	std::set<std::pair<std::string, std::string>> from_registry;
	for (const auto &[id, e] : cat.registry.entries) {
		from_registry.insert({e.table, e.path});
	}
	std::set<std::pair<std::string, std::string>> from_manifests;
	for (const auto &table : {"comment", "person", "knows"}) {
		Bytes raw = store.GetAll(ManifestPath(table));
		TableManifest m = TableManifest::FromJson(std::string(raw.begin(), raw.end()));
		for (const auto &f : m.files) {
			from_manifests.insert({table, f.path});
		}
	}
	CHECK(from_registry == from_manifests);
}

TEST_CASE("non-key-capable key column kind is rejected") {
	TempDir dir;
	LocalStore store(dir.path());
	GraphSchema s;
	s.vertices = {{"v", "v", "score"}};
	TableFixture t;
	t.name = "v";
	t.schema = TableSchema {{{"score", ColumnKind::FLOAT64}}};
	t.rows = {{0.5}, {1.5}};
	WriteGraphFixture(store, s, {t});
	CHECK_THROWS_WITH_AS(Catalog::Load(store, "graph.json"),
	                     doctest::Contains("must be INT64 or STRING"), LakeGraphError);
}

TEST_CASE("missing key column and missing manifest are rejected") {
	TempDir dir;
	LocalStore store(dir.path());
	GraphSchema s;
	s.vertices = {{"v", "v", "nope"}};
	TableFixture t;
	t.name = "v";
	t.schema = TableSchema {{{"id", ColumnKind::INT64}}};
	t.rows = {{int64_t {1}}};
	WriteGraphFixture(store, s, {t});
	CHECK_THROWS_WITH_AS(Catalog::Load(store, "graph.json"), doctest::Contains("missing from table"),
	                     LakeGraphError);

	GraphSchema s2;
	s2.vertices = {{"w", "w", "id"}};
	std::string sj = s2.ToJson();
	store.Put("graph2.json", reinterpret_cast<const uint8_t *>(sj.data()), sj.size());
	CHECK_THROWS_WITH_AS(Catalog::Load(store, "graph2.json"), doctest::Contains("dangling table reference"),
	                     LakeGraphError);
}

TEST_CASE("oversized file rowCount is rejected") {
	TempDir dir;
	LocalStore store(dir.path());
	WriteBaseFixture(store);
	RewriteKnowsManifest(store, 2, {{PartPath("knows", 0), 1ULL << 32}});
	CHECK_THROWS_WITH_AS(Catalog::Load(store, "graph.json"), doctest::Contains("32-bit row index"),
	                     LakeGraphError);
}

TEST_CASE("diffManifests with unchanged manifests is empty") {
	TempDir dir;
	LocalStore store(dir.path());
	WriteBaseFixture(store);
	Catalog cat = Catalog::Load(store, "graph.json");
	ManifestDiff diff = cat.DiffManifests(store);
	CHECK(diff.Empty());
}

TEST_CASE("appended edge file shows up as added with a fresh max id") {
	TempDir dir;
	LocalStore store(dir.path());
	WriteBaseFixture(store);
	Catalog cat = Catalog::Load(store, "graph.json");
	uint64_t version_before = cat.registry.version;

	TableSchema es {{{"src", ColumnKind::INT64}, {"tgt", ColumnKind::INT64}}};
	WriteTable(store, PartPath("knows", 2), es, {{int64_t {9}, int64_t {10}}}, 4, {});
	RewriteKnowsManifest(store, 2,
	                     {{PartPath("knows", 0), 3}, {PartPath("knows", 1), 2}, {PartPath("knows", 2), 1}});

	ManifestDiff diff = cat.DiffManifests(store);
	REQUIRE(diff.added.size() == 1);
	CHECK(diff.removed.empty());
	CHECK(diff.added[0].path == PartPath("knows", 2));
	cat.ApplyDiff(diff);
	CHECK(cat.registry.Require(7).path == PartPath("knows", 2));
	CHECK(cat.registry.version == version_before + 1);
	CHECK(cat.registry.MaxFileId() == 7);
}

TEST_CASE("delete then re-add of the same path yields a different file id") {
	TempDir dir;
	LocalStore store(dir.path());
	WriteBaseFixture(store);
	Catalog cat = Catalog::Load(store, "graph.json");
	uint32_t old_id = cat.registry.FindByPath("knows", PartPath("knows", 1))->file_id;

	RewriteKnowsManifest(store, 2, {{PartPath("knows", 0), 3}});
	cat.ApplyDiff(cat.DiffManifests(store));
	CHECK(cat.registry.Find(old_id) == nullptr);

	RewriteKnowsManifest(store, 3, {{PartPath("knows", 0), 3}, {PartPath("knows", 1), 2}});
	cat.ApplyDiff(cat.DiffManifests(store));
	const FileEntry *readded = cat.registry.FindByPath("knows", PartPath("knows", 1));
	REQUIRE(readded != nullptr);
	CHECK(readded->file_id != old_id);
	CHECK(readded->file_id == 7);
}

TEST_CASE("file id bindings never change across diff sequences") {
	TempDir dir;
	LocalStore store(dir.path());
	WriteBaseFixture(store);
	Catalog cat = Catalog::Load(store, "graph.json");
	std::map<uint32_t, std::string> seen;
	auto record = [&] {
		for (const auto &[id, e] : cat.registry.entries) {
			auto it = seen.find(id);
			if (it == seen.end()) {
				seen.emplace(id, e.table + "|" + e.path);
			} else {
				CHECK(it->second == e.table + "|" + e.path);
			}
		}
	};
	record();
	TableSchema es {{{"src", ColumnKind::INT64}, {"tgt", ColumnKind::INT64}}};
	WriteTable(store, PartPath("knows", 2), es, {{int64_t {9}, int64_t {10}}}, 4, {});
	RewriteKnowsManifest(store, 2,
	                     {{PartPath("knows", 0), 3}, {PartPath("knows", 1), 2}, {PartPath("knows", 2), 1}});
	cat.ApplyDiff(cat.DiffManifests(store));
	record();
	RewriteKnowsManifest(store, 3, {{PartPath("knows", 0), 3}, {PartPath("knows", 2), 1}});
	cat.ApplyDiff(cat.DiffManifests(store));
	record();
	RewriteKnowsManifest(store, 4, {{PartPath("knows", 0), 3}, {PartPath("knows", 1), 2}, {PartPath("knows", 2), 1}});
	cat.ApplyDiff(cat.DiffManifests(store));
	record();
}

TEST_CASE("file list change without a manifest version bump is rejected") {
	TempDir dir;
	LocalStore store(dir.path());
	WriteBaseFixture(store);
	Catalog cat = Catalog::Load(store, "graph.json");
	RewriteKnowsManifest(store, 1, {{PartPath("knows", 0), 3}}); // same version, fewer files
	CHECK_THROWS_WITH_AS(cat.DiffManifests(store), doctest::Contains("version bump"), LakeGraphError);
}

TEST_CASE("persisted registry keeps ids stable across reloads after changes") {
	TempDir dir;
	LocalStore store(dir.path());
	WriteBaseFixture(store);
	Catalog cat = Catalog::Load(store, "graph.json");
	cat.PersistRegistry(store);

	// Remove one edge file and add another; a freshly loaded catalog must keep
	// surviving ids stable and assign a fresh id to the new file.
	TableSchema es {{{"src", ColumnKind::INT64}, {"tgt", ColumnKind::INT64}}};
	WriteTable(store, PartPath("knows", 9), es, {{int64_t {1}, int64_t {2}}}, 4, {});
	RewriteKnowsManifest(store, 2, {{PartPath("knows", 0), 3}, {PartPath("knows", 9), 1}});

	Catalog reloaded = Catalog::Load(store, "graph.json");
	CHECK(reloaded.loaded_from_persisted_registry);
	CHECK(reloaded.registry.FindByPath("knows", PartPath("knows", 0))->file_id ==
	      cat.registry.FindByPath("knows", PartPath("knows", 0))->file_id);
	CHECK(reloaded.registry.FindByPath("comment", PartPath("comment", 1))->file_id ==
	      cat.registry.FindByPath("comment", PartPath("comment", 1))->file_id);
	CHECK(reloaded.registry.FindByPath("knows", PartPath("knows", 9))->file_id == 7);
	CHECK(reloaded.registry.Find(4) == nullptr);
	CHECK(reloaded.registry.version == cat.registry.version + 1);
}

TEST_CASE("schema validation rejects undeclared endpoint types and duplicates") {
	GraphSchema bad;
	bad.vertices = {{"person", "person", "id"}};
	bad.edges = {{"knows", "knows", "src", "person", "tgt", "city"}};
	TempDir dir;
	LocalStore store(dir.path());
	std::string sj = bad.ToJson();
	store.Put("graph.json", reinterpret_cast<const uint8_t *>(sj.data()), sj.size());
	CHECK_THROWS_WITH_AS(Catalog::Load(store, "graph.json"), doctest::Contains("undeclared"), LakeGraphError);

	GraphSchema dup;
	dup.vertices = {{"person", "person", "id"}, {"person", "p2", "id"}};
	sj = dup.ToJson();
	store.Put("graph.json", reinterpret_cast<const uint8_t *>(sj.data()), sj.size());
	CHECK_THROWS_WITH_AS(Catalog::Load(store, "graph.json"), doctest::Contains("duplicate"), LakeGraphError);
}

TEST_CASE("vertex space fingerprint tracks vertex files only") {
	TempDir dir;
	LocalStore store(dir.path());
	WriteBaseFixture(store);
	Catalog cat = Catalog::Load(store, "graph.json");
	uint64_t fp = cat.registry.VertexSpaceFingerprint();

	// Edge-only change leaves the fingerprint alone.
	RewriteKnowsManifest(store, 2, {{PartPath("knows", 0), 3}});
	cat.ApplyDiff(cat.DiffManifests(store));
	CHECK(cat.registry.VertexSpaceFingerprint() == fp);

	// Vertex change moves it.
	TableSchema vs {{{"id", ColumnKind::INT64}, {"label", ColumnKind::STRING}}};
	WriteTable(store, PartPath("person", 7), vs, {{int64_t {99}, std::string("x")}}, 4, {});
	TableManifest pm;
	pm.table = "person";
	pm.version = 2;
	pm.files = {{PartPath("person", 0), 3}, {PartPath("person", 1), 3}, {PartPath("person", 7), 1}};
	std::string mj = pm.ToJson();
	store.Put(ManifestPath("person"), reinterpret_cast<const uint8_t *>(mj.data()), mj.size());
	cat.ApplyDiff(cat.DiffManifests(store));
	CHECK(cat.registry.VertexSpaceFingerprint() != fp);
}
