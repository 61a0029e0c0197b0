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

#include <chrono>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "helpers.hpp"
#include "topology/topology.hpp"

using namespace lakegraph;
using namespace lakegraph::testing;

namespace {

GraphSchema PersonRelatesSchema(ColumnKind key_kind) {
	GraphSchema s;
	s.vertices = {{"person", "person", "id"}};
	s.edges = {{"relates", "relates", "src", "person", "tgt", "person"}};
	(void)key_kind;
	return s;
}

TableFixture StringPersonTable(const std::vector<std::string> &keys) {
	TableFixture t;
	t.name = "person";
	t.schema = TableSchema {{{"id", ColumnKind::STRING}, {"name", ColumnKind::STRING}}};
	for (const auto &k : keys) {
		t.rows.push_back({k, "n" + k});
	}
	return t;
}

TableFixture StringEdgeTable(const std::string &name,
                             const std::vector<std::pair<std::string, std::string>> &edges) {
	TableFixture t;
	t.name = name;
	t.schema = TableSchema {{{"src", ColumnKind::STRING}, {"tgt", ColumnKind::STRING}}};
	for (const auto &[s, d] : edges) {
		t.rows.push_back({s, d});
	}
	return t;
}

// Mirrors WriteTableFixture's split: ceil(n / file_count) rows per part,
// front-loaded.
std::vector<std::pair<size_t, size_t>> FixtureSplit(size_t rows, size_t file_count) {
	std::vector<std::pair<size_t, size_t>> ranges;
	size_t per = file_count ? (rows + file_count - 1) / file_count : rows;
	for (size_t f = 0; f < file_count; f++) {
		size_t begin = std::min(rows, f * per);
		size_t end = std::min(rows, begin + per);
		ranges.push_back({begin, end});
	}
	return ranges;
}

StartupOptions TestOptions(const std::string &cache_dir, size_t pipeline_depth = 4) {
	StartupOptions opts;
	opts.parallelism = 4;
	opts.pipeline_depth = pipeline_depth;
	opts.cache_dir = cache_dir;
	return opts;
}

} // namespace

TEST_CASE("packed vertex ids split into file id and row index") {
	CHECK(PackVertexId(1, 0) == 4294967296ULL);
	CHECK(PackVertexId(0, 0) == 0);
	CHECK(PackVertexId(0, 7) == 7);
	std::mt19937_64 rng(42);
	for (int i = 0; i < 1000; i++) {
		uint32_t f = static_cast<uint32_t>(rng());
		uint32_t r = static_cast<uint32_t>(rng());
		uint64_t packed = PackVertexId(f, r);
		CHECK(VertexFileId(packed) == f);
		CHECK(VertexRowIndex(packed) == r);
	}
	// Packed ids order first by file, then by row.
	CHECK(PackVertexId(1, 4294967295u) < PackVertexId(2, 0));
}

TEST_CASE("string keys translate to packed ids in row order") {
	TempDir dir;
	TempDir cache;
	LocalStore store(dir.path());
	WriteGraphFixture(store, PersonRelatesSchema(ColumnKind::STRING),
	                  {StringPersonTable({"P1", "P2", "P3"}),
	                   StringEdgeTable("relates", {{"P1", "P3"}, {"P2", "P1"}})});

	StartupResult r = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
	// Lexicographic assignment puts the person part at file id 1.
	CHECK(r.catalog.registry.Require(1).table == "person");
	REQUIRE(r.topology.lists.count(2) == 1);
	const EdgeList &list = r.topology.lists.at(2);
	REQUIRE(list.entries.size() == 2);
	CHECK(list.entries[0] == EdgeEntry {PackVertexId(1, 0), PackVertexId(1, 2)});
	CHECK(list.entries[1] == EdgeEntry {PackVertexId(1, 1), PackVertexId(1, 0)});
	CHECK(list.edge_type == "relates");
	CHECK(r.report.idm_entries == 3);
	CHECK(r.report.lists_built == 1);
	CHECK(r.report.dangling_count == 0);
}

TEST_CASE("unknown endpoint keys share one dangling id per type") {
	TempDir dir;
	TempDir cache;
	LocalStore store(dir.path());
	GraphSchema s;
	s.vertices = {{"person", "person", "id"}, {"comment", "comment", "id"}};
	s.edges = {{"rel1", "rel1", "src", "person", "tgt", "person"},
	           {"rel2", "rel2", "src", "person", "tgt", "comment"}};
	TableFixture person = StringPersonTable({"P1"});
	TableFixture comment;
	comment.name = "comment";
	comment.schema = TableSchema {{{"id", ColumnKind::STRING}}};
	comment.rows = {{std::string("C1")}};
	WriteGraphFixture(store, s,
	                  {person, comment, StringEdgeTable("rel1", {{"P1", "X"}, {"P1", "X"}, {"P1", "Y"}}),
	                   StringEdgeTable("rel2", {{"P1", "X"}})});

	StartupResult r = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
	// Files assigned lexicographically: comment=1, person=2, rel1=3, rel2=4.
	const EdgeList &rel1 = r.topology.lists.at(3);
	const EdgeList &rel2 = r.topology.lists.at(4);

	// Same unknown key, same vertex type: one id for both occurrences.
	CHECK(rel1.entries[0].tgt == rel1.entries[1].tgt);
	CHECK(VertexFileId(rel1.entries[0].tgt) == 0);
	// A different unknown key gets the next row index.
	CHECK(rel1.entries[2].tgt != rel1.entries[0].tgt);
	CHECK(VertexFileId(rel1.entries[2].tgt) == 0);
	// Same raw key under another vertex type is a distinct vertex.
	CHECK(VertexFileId(rel2.entries[0].tgt) == 0);
	CHECK(rel2.entries[0].tgt != rel1.entries[0].tgt);
	CHECK(r.report.dangling_count == 3);

	// Deterministic scan order: rel1 is built before rel2, so X-as-person
	// precedes Y-as-person precedes X-as-comment.
	CHECK(rel1.entries[0].tgt == PackVertexId(0, 0));
	CHECK(rel1.entries[2].tgt == PackVertexId(0, 1));
	CHECK(rel2.entries[0].tgt == PackVertexId(0, 2));

	auto person_dangling = r.topology.dangling.TypedIds("person");
	auto comment_dangling = r.topology.dangling.TypedIds("comment");
	CHECK(person_dangling == std::vector<uint64_t> {PackVertexId(0, 0), PackVertexId(0, 1)});
	CHECK(comment_dangling == std::vector<uint64_t> {PackVertexId(0, 2)});
}

TEST_CASE("every edge entry addresses the row holding its raw key") {
	TempDir dir;
	TempDir cache;
	LocalStore store(dir.path());
	std::mt19937_64 rng(7);

	GraphSchema s;
	s.vertices = {{"person", "person", "id"}, {"city", "city", "id"}};
	s.edges = {{"knows", "knows", "src", "person", "tgt", "person"},
	           {"livesIn", "livesIn", "personId", "person", "cityId", "city"}};

	TableFixture person;
	person.name = "person";
	person.schema = TableSchema {{{"id", ColumnKind::INT64}, {"age", ColumnKind::INT64}}};
	std::vector<int64_t> person_keys;
	for (int i = 0; i < 57; i++) {
		person_keys.push_back(1000 + i * 3);
	}
	std::shuffle(person_keys.begin(), person_keys.end(), rng);
	for (int64_t k : person_keys) {
		person.rows.push_back({k, k % 97});
	}
	person.file_count = 3;
	person.row_group_size = 8;

	TableFixture city;
	city.name = "city";
	city.schema = TableSchema {{{"id", ColumnKind::STRING}}};
	std::vector<std::string> city_keys;
	for (int i = 0; i < 23; i++) {
		city_keys.push_back("ct" + std::to_string(i));
	}
	std::shuffle(city_keys.begin(), city_keys.end(), rng);
	for (const auto &k : city_keys) {
		city.rows.push_back({k});
	}
	city.file_count = 2;
	city.row_group_size = 4;

	TableFixture knows;
	knows.name = "knows";
	knows.schema = TableSchema {{{"src", ColumnKind::INT64}, {"tgt", ColumnKind::INT64}}};
	for (int i = 0; i < 180; i++) {
		// Roughly one in nine references a key outside the person table.
		int64_t a = (rng() % 9 == 0) ? int64_t(5000 + rng() % 4) : person_keys[rng() % person_keys.size()];
		int64_t b = (rng() % 9 == 0) ? int64_t(5000 + rng() % 4) : person_keys[rng() % person_keys.size()];
		knows.rows.push_back({a, b});
	}
	knows.file_count = 2;
	knows.row_group_size = 16;

	TableFixture lives;
	lives.name = "livesIn";
	lives.schema = TableSchema {{{"personId", ColumnKind::INT64}, {"cityId", ColumnKind::STRING}}};
	for (int i = 0; i < 90; i++) {
		int64_t p = person_keys[rng() % person_keys.size()];
		std::string c = (rng() % 7 == 0) ? "ghost" + std::to_string(rng() % 3) : city_keys[rng() % city_keys.size()];
		lives.rows.push_back({p, c});
	}
	lives.row_group_size = 16;

	WriteGraphFixture(store, s, {person, city, knows, lives});
	StartupResult r = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));

	// Oracle: (type, raw key) -> (part path, row-in-part) from the fixture
	// rows and the split rule, independent of production translation.
	std::map<std::pair<std::string, RawKey>, std::pair<std::string, uint32_t>> expected;
	auto index_table = [&](const TableFixture &t, const std::string &type) {
		auto ranges = FixtureSplit(t.rows.size(), t.file_count);
		for (size_t f = 0; f < ranges.size(); f++) {
			for (size_t i = ranges[f].first; i < ranges[f].second; i++) {
				RawKey key;
				if (t.schema.columns[0].kind == ColumnKind::INT64) {
					key = std::get<int64_t>(t.rows[i][0]);
				} else {
					key = std::get<std::string>(t.rows[i][0]);
				}
				expected[{type, key}] = {PartPath(t.name, f), static_cast<uint32_t>(i - ranges[f].first)};
			}
		}
	};
	index_table(person, "person");
	index_table(city, "city");

	auto check_edges = [&](const TableFixture &t, const std::string &src_type, const std::string &tgt_type) {
		auto ranges = FixtureSplit(t.rows.size(), t.file_count);
		for (size_t f = 0; f < ranges.size(); f++) {
			const FileEntry *entry = r.catalog.registry.FindByPath(t.name, PartPath(t.name, f));
			REQUIRE(entry != nullptr);
			const EdgeList &list = r.topology.lists.at(entry->file_id);
			REQUIRE(list.entries.size() == ranges[f].second - ranges[f].first);
			for (size_t i = ranges[f].first; i < ranges[f].second; i++) {
				const EdgeEntry &e = list.entries[i - ranges[f].first];
				auto check_side = [&](uint64_t packed, const std::string &type, const Value &raw) {
					RawKey key;
					if (std::holds_alternative<int64_t>(raw)) {
						key = std::get<int64_t>(raw);
					} else {
						key = std::get<std::string>(raw);
					}
					auto it = expected.find({type, key});
					if (it == expected.end()) {
						CHECK(VertexFileId(packed) == 0);
						CHECK(r.topology.dangling.Lookup(type, key) == packed);
					} else {
						const FileEntry &ve = r.catalog.registry.Require(VertexFileId(packed));
						CHECK(ve.path == it->second.first);
						CHECK(VertexRowIndex(packed) == it->second.second);
					}
				};
				check_side(e.src, src_type, t.rows[i][0]);
				check_side(e.tgt, tgt_type, t.rows[i][1]);
			}
		}
	};
	check_edges(knows, "person", "person");
	check_edges(lives, "person", "city");

	// Dangling coverage: exactly the foreign keys missing from the vertex
	// tables, computed by brute force.
	std::set<std::pair<std::string, RawKey>> expect_dangling;
	for (const auto &row : knows.rows) {
		for (int side = 0; side < 2; side++) {
			RawKey k = std::get<int64_t>(row[side]);
			if (!expected.count({"person", k})) {
				expect_dangling.insert({"person", k});
			}
		}
	}
	for (const auto &row : lives.rows) {
		RawKey kp = std::get<int64_t>(row[0]);
		if (!expected.count({"person", kp})) {
			expect_dangling.insert({"person", kp});
		}
		RawKey kc = std::get<std::string>(row[1]);
		if (!expected.count({"city", kc})) {
			expect_dangling.insert({"city", kc});
		}
	}
	uint64_t person_dangling = r.topology.dangling.TypedIds("person").size();
	uint64_t city_dangling = r.topology.dangling.TypedIds("city").size();
	uint64_t expect_person = 0;
	for (const auto &[type, key] : expect_dangling) {
		if (type == "person") {
			expect_person++;
		}
	}
	CHECK(person_dangling == expect_person);
	CHECK(person_dangling + city_dangling == expect_dangling.size());
	CHECK(r.report.dangling_count == expect_dangling.size());
	CHECK(r.report.idm_entries == person.rows.size() + city.rows.size());
}

TEST_CASE("duplicate primary keys are reported with both locations") {
	TempDir dir;
	TempDir cache;
	LocalStore store(dir.path());
	TableFixture person;
	person.name = "person";
	person.schema = TableSchema {{{"id", ColumnKind::INT64}}};
	person.rows = {{int64_t {1}}, {int64_t {2}}, {int64_t {3}}, {int64_t {2}}};
	person.file_count = 2;
	TableFixture rel;
	rel.name = "relates";
	rel.schema = TableSchema {{{"src", ColumnKind::INT64}, {"tgt", ColumnKind::INT64}}};
	rel.rows = {{int64_t {1}, int64_t {3}}};
	GraphSchema s;
	s.vertices = {{"person", "person", "id"}};
	s.edges = {{"relates", "relates", "src", "person", "tgt", "person"}};
	WriteGraphFixture(store, s, {person, rel});

	try {
		StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
		FAIL("expected duplicate key error");
	} catch (const LakeGraphError &e) {
		std::string msg = e.what();
		CHECK(msg.find("duplicate key 2") != std::string::npos);
		CHECK(msg.find(PartPath("person", 0)) != std::string::npos);
		CHECK(msg.find(PartPath("person", 1)) != std::string::npos);
	}
}

TEST_CASE("portion bounds cover exactly their row groups") {
	TempDir dir;
	TempDir cache;
	LocalStore store(dir.path());
	std::mt19937_64 rng(11);

	TableFixture person;
	person.name = "person";
	person.schema = TableSchema {{{"id", ColumnKind::INT64}}};
	for (int i = 0; i < 20; i++) {
		person.rows.push_back({int64_t(i)});
	}
	TableFixture rel;
	rel.name = "relates";
	rel.schema = TableSchema {{{"src", ColumnKind::INT64}, {"tgt", ColumnKind::INT64}}};
	for (int i = 0; i < 10; i++) {
		int64_t src = (i == 7) ? 99 : int64_t(rng() % 20); // row 7 dangles
		rel.rows.push_back({src, int64_t(rng() % 20)});
	}
	rel.row_group_size = 4;
	GraphSchema s;
	s.vertices = {{"person", "person", "id"}};
	s.edges = {{"relates", "relates", "src", "person", "tgt", "person"}};
	WriteGraphFixture(store, s, {person, rel});

	StartupResult r = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
	const EdgeList &list = r.topology.lists.at(2);
	REQUIRE(list.portions.size() == 3); // groups of 4, 4, 2
	std::vector<size_t> bounds = {0, 4, 8, 10};
	for (size_t g = 0; g < 3; g++) {
		CHECK(list.portions[g].group_start == g);
		CHECK(list.portions[g].group_end == g + 1);
		uint64_t lo = UINT64_MAX;
		uint64_t hi = 0;
		for (size_t i = bounds[g]; i < bounds[g + 1]; i++) {
			lo = std::min(lo, list.entries[i].src);
			hi = std::max(hi, list.entries[i].src);
		}
		CHECK(list.portions[g].min_src == lo);
		CHECK(list.portions[g].max_src == hi);
	}
	// The dangling source sits in group 1 and drags its lower bound to file 0.
	CHECK(VertexFileId(list.portions[1].min_src) == 0);
}

TEST_CASE("materialized lists round trip bit-identically") {
	EdgeList list;
	list.edge_file_id = 9;
	list.edge_type = "relates";
	std::mt19937_64 rng(3);
	for (int i = 0; i < 257; i++) {
		list.entries.push_back({rng(), rng()});
	}
	list.portions = {{0, 1, 5, 100}, {1, 2, 7, 4294967296ULL}};

	Bytes data = SerializeEdgeList(list, 777);
	auto parsed = ParseEdgeList(data, 9, 777, list.entries.size());
	REQUIRE(parsed.has_value());
	CHECK(parsed->entries == list.entries);
	CHECK(parsed->portions == list.portions);
	CHECK(parsed->edge_file_id == 9);
	CHECK(SerializeEdgeList(*parsed, 777) == data);

	CHECK(!ParseEdgeList(data, 8, 777, list.entries.size()).has_value());
	CHECK(!ParseEdgeList(data, 9, 778, list.entries.size()).has_value());
	CHECK(!ParseEdgeList(data, 9, 777, list.entries.size() + 1).has_value());
	Bytes truncated(data.begin(), data.end() - 5);
	CHECK(!ParseEdgeList(truncated, 9, 777, list.entries.size()).has_value());
	Bytes bad_magic = data;
	bad_magic[0] = 'X';
	CHECK(!ParseEdgeList(bad_magic, 9, 777, list.entries.size()).has_value());
}

namespace {

// A fixture large enough that key-column bytes dwarf metadata, shared by the
// persistence tests.
void WriteMediumGraph(ObjectStore &store) {
	GraphSchema s;
	s.vertices = {{"person", "person", "id"}};
	s.edges = {{"knows", "knows", "src", "person", "tgt", "person"}};
	TableFixture person;
	person.name = "person";
	person.schema = TableSchema {{{"id", ColumnKind::INT64}, {"pad", ColumnKind::INT64}}};
	for (int i = 0; i < 4000; i++) {
		person.rows.push_back({int64_t(i), int64_t(i * 7)});
	}
	person.file_count = 2;
	person.row_group_size = 512;
	TableFixture knows;
	knows.name = "knows";
	knows.schema = TableSchema {{{"src", ColumnKind::INT64}, {"tgt", ColumnKind::INT64}}};
	std::mt19937_64 rng(5);
	for (int i = 0; i < 8000; i++) {
		// A sprinkle of dangling endpoints so reload exercises the registry.
		int64_t a = (i % 500 == 0) ? int64_t(100000 + i) : int64_t(rng() % 4000);
		knows.rows.push_back({a, int64_t(rng() % 4000)});
	}
	knows.file_count = 2;
	knows.row_group_size = 512;
	WriteGraphFixture(store, s, {person, knows});
}

// Byte ranges of the key columns of every edge file, from the footers.
std::vector<RecordingStore::GetRecord> EdgeKeyRanges(ObjectStore &store, const Catalog &catalog) {
	std::vector<RecordingStore::GetRecord> ranges;
	for (const auto *f : catalog.registry.FilesOfKind(FileKind::Edge)) {
		const EdgeTypeDef *def = catalog.schema.FindEdgeByTable(f->table);
		TableMeta meta = ReadFooter(store, f->path);
		for (const auto &group : meta.row_groups) {
			for (const auto &col : {def->src_key, def->tgt_key}) {
				int idx = meta.schema.Find(col);
				REQUIRE(idx >= 0);
				ranges.push_back({f->path, group.columns[idx].byte_offset, group.columns[idx].byte_length});
			}
		}
	}
	return ranges;
}

bool TouchesEdgeKeys(const std::vector<RecordingStore::GetRecord> &gets,
                     const std::vector<RecordingStore::GetRecord> &key_ranges) {
	for (const auto &g : gets) {
		for (const auto &k : key_ranges) {
			if (g.path != k.path) {
				continue;
			}
			uint64_t lo = std::max(g.offset, k.offset);
			uint64_t hi = std::min(g.offset + g.len, k.offset + k.len);
			if (lo < hi) {
				return true;
			}
		}
	}
	return false;
}

} // namespace

TEST_CASE("second startup loads persisted topology without touching edge keys") {
	TempDir dir;
	TempDir cache;
	auto local = std::make_shared<LocalStore>(dir.path());
	RecordingStore store(local);
	WriteMediumGraph(store);

	StartupResult first = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
	CHECK(first.report.lists_built == 2);
	CHECK(first.report.lists_loaded == 0);
	uint64_t first_bytes = store.stats().Read().bytes_read;
	auto key_ranges = EdgeKeyRanges(*local, first.catalog);

	store.ClearRecords();
	store.stats().Reset();
	StartupResult second = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
	CHECK(second.report.lists_built == 0);
	CHECK(second.report.lists_loaded == 2);
	CHECK(!TouchesEdgeKeys(store.gets(), key_ranges));
	// With the local mirror warm, the store only serves metadata.
	uint64_t second_bytes = store.stats().Read().bytes_read;
	CHECK(second_bytes * 20 < first_bytes);

	// Same topology either way.
	REQUIRE(second.topology.lists.size() == first.topology.lists.size());
	for (const auto &[id, list] : first.topology.lists) {
		CHECK(second.topology.lists.at(id).entries == list.entries);
		CHECK(second.topology.lists.at(id).portions == list.portions);
	}
	CHECK(second.topology.dangling.total() == first.topology.dangling.total());

	SUBCASE("a cold local mirror falls back to the store copy") {
		TempDir fresh_cache;
		store.ClearRecords();
		store.stats().Reset();
		StartupResult third = StartupLoad(store, "graph.json", TestOptions(fresh_cache.Sub("c")));
		CHECK(third.report.lists_built == 0);
		CHECK(third.report.lists_loaded == 2);
		CHECK(!TouchesEdgeKeys(store.gets(), key_ranges));
		for (const auto &[id, list] : first.topology.lists) {
			CHECK(third.topology.lists.at(id).entries == list.entries);
		}
	}
}

TEST_CASE("removing one edge file and adding another rebuilds only the new file") {
	TempDir dir;
	TempDir cache;
	auto local = std::make_shared<LocalStore>(dir.path());
	RecordingStore store(local);

	GraphSchema s;
	s.vertices = {{"person", "person", "id"}};
	s.edges = {{"relates", "relates", "src", "person", "tgt", "person"}};
	TableFixture person = StringPersonTable({"P1", "P2", "P3", "P4"});
	TableFixture rel = StringEdgeTable("relates", {{"P1", "X"}, {"P2", "P3"}, {"P3", "P4"}, {"P4", "P1"}});
	rel.file_count = 2;
	WriteGraphFixture(store, s, {person, rel});

	StartupResult first = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
	CHECK(first.report.lists_built == 2);
	uint32_t part0_id = first.catalog.registry.FindByPath("relates", PartPath("relates", 0))->file_id;
	uint32_t part1_id = first.catalog.registry.FindByPath("relates", PartPath("relates", 1))->file_id;
	std::vector<EdgeEntry> part0_before = first.topology.lists.at(part0_id).entries;
	uint64_t x_id = part0_before[0].tgt;
	CHECK(VertexFileId(x_id) == 0);

	// Drop part-1, add part-2 referencing the same dangling key X plus a new
	// one.
	TableSchema es {{{"src", ColumnKind::STRING}, {"tgt", ColumnKind::STRING}}};
	WriteTable(store, PartPath("relates", 2), es,
	           {{std::string("P2"), std::string("X")}, {std::string("P3"), std::string("Z")}}, 4, {});
	TableManifest m;
	m.table = "relates";
	m.version = 2;
	m.files = {{PartPath("relates", 0), 2}, {PartPath("relates", 2), 2}};
	std::string mj = m.ToJson();
	store.Put(ManifestPath("relates"), reinterpret_cast<const uint8_t *>(mj.data()), mj.size());

	auto key_ranges_before = EdgeKeyRanges(*local, first.catalog);
	store.ClearRecords();
	StartupResult second = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
	CHECK(second.report.lists_built == 1);
	CHECK(second.report.lists_loaded == 1);
	CHECK(second.topology.lists.count(part1_id) == 0);

	// The unchanged list was loaded, bit-identical, without re-reading its
	// keys.
	CHECK(second.topology.lists.at(part0_id).entries == part0_before);
	std::vector<RecordingStore::GetRecord> part0_keys;
	for (const auto &k : key_ranges_before) {
		if (k.path == PartPath("relates", 0)) {
			part0_keys.push_back(k);
		}
	}
	CHECK(!TouchesEdgeKeys(store.gets(), part0_keys));

	// The rebuilt file resolves the shared dangling key to its old id and
	// appends a fresh one for the new key.
	uint32_t part2_id = second.catalog.registry.FindByPath("relates", PartPath("relates", 2))->file_id;
	const EdgeList &part2 = second.topology.lists.at(part2_id);
	CHECK(part2.entries[0].tgt == x_id);
	CHECK(VertexFileId(part2.entries[1].tgt) == 0);
	CHECK(part2.entries[1].tgt != x_id);
	CHECK(second.topology.dangling.total() == 2);
}

TEST_CASE("vertex table changes invalidate all materialized lists") {
	TempDir dir;
	TempDir cache;
	LocalStore store(dir.path());
	GraphSchema s;
	s.vertices = {{"person", "person", "id"}};
	s.edges = {{"relates", "relates", "src", "person", "tgt", "person"}};
	TableFixture person = StringPersonTable({"P1", "P2"});
	TableFixture rel = StringEdgeTable("relates", {{"P1", "X"}, {"P2", "P1"}});
	rel.file_count = 2;
	WriteGraphFixture(store, s, {person, rel});

	StartupResult first = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
	CHECK(first.report.lists_built == 2);
	CHECK(first.topology.dangling.total() == 1);

	// A new person file supplies the previously dangling key X.
	TableSchema vs {{{"id", ColumnKind::STRING}, {"name", ColumnKind::STRING}}};
	WriteTable(store, PartPath("person", 1), vs, {{std::string("X"), std::string("nX")}}, 4, {});
	TableManifest m;
	m.table = "person";
	m.version = 2;
	m.files = {{PartPath("person", 0), 2}, {PartPath("person", 1), 1}};
	std::string mj = m.ToJson();
	store.Put(ManifestPath("person"), reinterpret_cast<const uint8_t *>(mj.data()), mj.size());

	StartupResult second = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
	CHECK(second.report.lists_built == 2);
	CHECK(second.report.lists_loaded == 0);
	CHECK(second.topology.dangling.total() == 0);
	uint32_t new_person_id = second.catalog.registry.FindByPath("person", PartPath("person", 1))->file_id;
	uint32_t rel0_id = second.catalog.registry.FindByPath("relates", PartPath("relates", 0))->file_id;
	CHECK(second.topology.lists.at(rel0_id).entries[0].tgt == PackVertexId(new_person_id, 0));
}

TEST_CASE("refreshing after manifest changes reuses in-memory lists") {
	TempDir dir;
	TempDir cache;
	LocalStore store(dir.path());
	GraphSchema s;
	s.vertices = {{"person", "person", "id"}};
	s.edges = {{"relates", "relates", "src", "person", "tgt", "person"}};
	TableFixture person = StringPersonTable({"P1", "P2"});
	TableFixture rel = StringEdgeTable("relates", {{"P1", "P2"}});
	WriteGraphFixture(store, s, {person, rel});

	StartupResult r = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
	CHECK(r.topology.lists.size() == 1);
	uint32_t original_id = r.topology.lists.begin()->first;

	TableSchema es {{{"src", ColumnKind::STRING}, {"tgt", ColumnKind::STRING}}};
	WriteTable(store, PartPath("relates", 1), es, {{std::string("P2"), std::string("P1")}}, 4, {});
	TableManifest m;
	m.table = "relates";
	m.version = 2;
	m.files = {{PartPath("relates", 0), 1}, {PartPath("relates", 1), 1}};
	std::string mj = m.ToJson();
	store.Put(ManifestPath("relates"), reinterpret_cast<const uint8_t *>(mj.data()), mj.size());

	StartupReport refresh = RefreshTopology(store, r.catalog, r.topology, TestOptions(cache.Sub("c")));
	CHECK(refresh.lists_built == 1);
	CHECK(refresh.lists_loaded == 0); // the old list never left memory
	CHECK(r.topology.lists.size() == 2);
	CHECK(r.topology.lists.count(original_id) == 1);

	// Dropping the original file retires its list.
	TableManifest m2;
	m2.table = "relates";
	m2.version = 3;
	m2.files = {{PartPath("relates", 1), 1}};
	mj = m2.ToJson();
	store.Put(ManifestPath("relates"), reinterpret_cast<const uint8_t *>(mj.data()), mj.size());
	StartupReport refresh2 = RefreshTopology(store, r.catalog, r.topology, TestOptions(cache.Sub("c")));
	CHECK(refresh2.lists_built == 0);
	CHECK(r.topology.lists.size() == 1);
	CHECK(r.topology.lists.count(original_id) == 0);
}

TEST_CASE("deeper pipelines overlap chunk downloads") {
	TempDir dir;
	auto local = std::make_shared<LocalStore>(dir.path());
	GraphSchema s;
	s.vertices = {{"person", "person", "id"}};
	s.edges = {{"relates", "relates", "src", "person", "tgt", "person"}};
	TableFixture person;
	person.name = "person";
	person.schema = TableSchema {{{"id", ColumnKind::INT64}}};
	for (int i = 0; i < 64; i++) {
		person.rows.push_back({int64_t(i)});
	}
	person.row_group_size = 4; // 16 key chunks
	TableFixture rel;
	rel.name = "relates";
	rel.schema = TableSchema {{{"src", ColumnKind::INT64}, {"tgt", ColumnKind::INT64}}};
	for (int i = 0; i < 64; i++) {
		rel.rows.push_back({int64_t(i), int64_t((i + 1) % 64)});
	}
	rel.row_group_size = 4; // 16 groups, 32 key chunks
	{
		LocalStore plain(dir.path());
		WriteGraphFixture(plain, s, {person, rel});
	}

	auto timed_run = [&](size_t depth) {
		LatencyStore store(local, 20.0, 1e9);
		TempDir cache;
		StartupOptions opts = TestOptions(cache.Sub("c"), depth);
		opts.materialize = false;
		auto t0 = std::chrono::steady_clock::now();
		StartupResult r = StartupLoad(store, "graph.json", opts);
		auto t1 = std::chrono::steady_clock::now();
		CHECK(r.report.lists_built == 1);
		return std::chrono::duration<double, std::milli>(t1 - t0).count();
	};

	double slow = timed_run(1);
	double fast = timed_run(8);
	CHECK(fast * 2 < slow);
}

TEST_CASE("empty and zero-row edge tables load cleanly") {
	TempDir dir;
	TempDir cache;
	LocalStore store(dir.path());
	GraphSchema s;
	s.vertices = {{"person", "person", "id"}};
	s.edges = {{"relates", "relates", "src", "person", "tgt", "person"},
	           {"follows", "follows", "src", "person", "tgt", "person"}};
	TableFixture person = StringPersonTable({"P1"});
	TableFixture rel = StringEdgeTable("relates", {});
	rel.file_count = 0; // no files at all
	TableFixture follows = StringEdgeTable("follows", {});
	follows.file_count = 1; // one file with zero rows
	WriteGraphFixture(store, s, {person, rel, follows});

	StartupResult r = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
	CHECK(r.topology.ListsOfType("relates").empty());
	REQUIRE(r.topology.ListsOfType("follows").size() == 1);
	CHECK(r.topology.ListsOfType("follows")[0]->entries.empty());
	CHECK(r.topology.ListsOfType("follows")[0]->portions.empty());

	// Zero-row lists survive the persistence round trip too.
	StartupResult again = StartupLoad(store, "graph.json", TestOptions(cache.Sub("c")));
	CHECK(again.report.lists_built == 0);
	CHECK(again.report.lists_loaded == 1);
}

TEST_CASE("registered row counts must match file footers") {
	TempDir dir;
	TempDir cache;
	LocalStore store(dir.path());
	GraphSchema s;
	s.vertices = {{"person", "person", "id"}};
	s.edges = {{"relates", "relates", "src", "person", "tgt", "person"}};
	TableFixture person = StringPersonTable({"P1", "P2"});
	TableFixture rel = StringEdgeTable("relates", {{"P1", "P2"}});
	WriteGraphFixture(store, s, {person, rel});

	// Overstate the edge file's row count.
	TableManifest m;
	m.table = "relates";
	m.version = 2;
	m.files = {{PartPath("relates", 0), 5}};
	std::string mj = m.ToJson();
	store.Put(ManifestPath("relates"), reinterpret_cast<const uint8_t *>(mj.data()), mj.size());

	CHECK_THROWS_WITH_AS(StartupLoad(store, "graph.json", TestOptions(cache.Sub("c"))),
	                     doctest::Contains("registered"), LakeGraphError);
}

TEST_CASE("dangling registry round trips through its binary form") {
	DanglingCounter counter;
	uint64_t a = counter.Assign("person", RawKey {int64_t {42}});
	uint64_t b = counter.Assign("person", RawKey {std::string("X")});
	uint64_t c = counter.Assign("city", RawKey {std::string("X")});
	CHECK(counter.Assign("person", RawKey {int64_t {42}}) == a);
	CHECK(a != b);
	CHECK(b != c);
	CHECK(counter.total() == 3);

	Bytes data = counter.Serialize(99);
	auto parsed = DanglingCounter::Parse(data, 99);
	REQUIRE(parsed.has_value());
	CHECK(parsed->total() == 3);
	CHECK(parsed->Lookup("person", RawKey {int64_t {42}}) == a);
	CHECK(parsed->Lookup("person", RawKey {std::string("X")}) == b);
	CHECK(parsed->Lookup("city", RawKey {std::string("X")}) == c);
	CHECK(parsed->Serialize(99) == data);

	CHECK(!DanglingCounter::Parse(data, 100).has_value());
	Bytes truncated(data.begin(), data.end() - 1);
	CHECK(!DanglingCounter::Parse(truncated, 99).has_value());
}
