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
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "catalog/catalog.hpp"
#include "common/value.hpp"
#include "lakestore/object_store.hpp"

namespace lakegraph {

// A vertex identity packed into 64 bits: upper half file id, lower half row
// index. File id 0 is reserved for vertices that only exist as edge
// endpoints (no backing table row).
inline uint64_t PackVertexId(uint32_t file_id, uint32_t row_index) {
	return (static_cast<uint64_t>(file_id) << 32) | row_index;
}
inline uint32_t VertexFileId(uint64_t packed) {
	return static_cast<uint32_t>(packed >> 32);
}
inline uint32_t VertexRowIndex(uint64_t packed) {
	return static_cast<uint32_t>(packed & 0xffffffffu);
}

// Raw primary key -> packed vertex id, sharded per vertex type to keep lock
// contention low during parallel builds. Lives only for the duration of
// edge-list building; Release() drops the maps afterwards.
class VertexIdMapping {
public:
	VertexIdMapping(const GraphSchema &schema, size_t shard_count);

	// Inserts a batch into the shards it hashes to. Returns false and fills
	// *existing with the previously mapped id on the first duplicate key.
	bool InsertBatch(const std::string &type, const std::vector<std::pair<RawKey, uint64_t>> &batch,
	                 RawKey *dup_key, uint64_t *existing, uint64_t *incoming);
	std::optional<uint64_t> Lookup(const std::string &type, const RawKey &key) const;

	uint64_t entry_count() const;
	void Release();
	bool released() const { return released_; }

private:
	struct Shard {
		mutable std::mutex mu;
		std::unordered_map<RawKey, uint64_t, RawKeyHash> map;
	};
	struct TypeShards {
		std::vector<std::unique_ptr<Shard>> shards;
	};

	Shard &ShardFor(const std::string &type, const RawKey &key) const;

	std::map<std::string, TypeShards> types_;
	size_t shard_count_;
	bool released_ = false;
};

// Allocator for vertices referenced by edges but missing from every vertex
// table. Each distinct (vertex type, raw key) pair gets one row index under
// the reserved file id 0, assigned in deterministic scan order.
class DanglingCounter {
public:
	// Returns the packed id for (type, key), allocating the next row index
	// on first sight.
	uint64_t Assign(const std::string &type, const RawKey &key);
	std::optional<uint64_t> Lookup(const std::string &type, const RawKey &key) const;

	uint64_t total() const { return next_row_; }
	// Packed ids of this type's dangling vertices, ascending.
	std::vector<uint64_t> TypedIds(const std::string &type) const;
	std::vector<std::string> Types() const;

	Bytes Serialize(uint64_t version) const;
	// Parses a serialized registry; returns std::nullopt when the payload is
	// malformed or carries a different version.
	static std::optional<DanglingCounter> Parse(const Bytes &data, uint64_t expected_version);

private:
	std::map<std::string, std::map<RawKey, uint32_t>> by_type_;
	uint32_t next_row_ = 0;
};

struct EdgeEntry {
	uint64_t src = 0;
	uint64_t tgt = 0;

	bool operator==(const EdgeEntry &o) const = default;
};

// Row-group aligned slice of an edge list with source-id bounds, the unit of
// scan pruning. [group_start, group_end) indexes row groups of the backing
// file.
struct EdgePortion {
	uint32_t group_start = 0;
	uint32_t group_end = 0;
	uint64_t min_src = 0;
	uint64_t max_src = 0;

	bool operator==(const EdgePortion &o) const = default;
};

// Translated topology of one edge file. Entry i corresponds to row i of the
// backing table, so attribute columns line up by index.
struct EdgeList {
	uint32_t edge_file_id = 0;
	std::string edge_type;
	std::vector<EdgeEntry> entries;
	std::vector<EdgePortion> portions;
};

Bytes SerializeEdgeList(const EdgeList &list, uint64_t version);
// Returns std::nullopt when the payload is malformed or does not match the
// expected identity (wrong file, stale version, row count drift).
std::optional<EdgeList> ParseEdgeList(const Bytes &data, uint32_t expected_file_id, uint64_t expected_version,
                                      uint64_t expected_rows);

// Version tag embedded in each persisted topology artifact: any vertex-space
// change or path reassignment produces a different value, so stale artifacts
// never validate.
uint64_t TopologyArtifactVersion(uint64_t vertex_fingerprint, const std::string &token);

inline std::string TopologyStorePath(uint32_t file_id) {
	return std::string(kTopologyPrefix) + std::to_string(file_id) + ".lgt";
}
constexpr const char *kDanglingStorePath = "_lakegraph/topology/dangling.lgd";

struct StartupOptions {
	size_t parallelism = 0;      // 0 = hardware concurrency
	size_t pipeline_depth = 4;   // max chunk downloads in flight
	std::string cache_dir;       // local mirror for topology artifacts; "" = none
	bool materialize = true;     // persist freshly built artifacts
};

struct PhaseIo {
	double wall_ms = 0;
	uint64_t gets = 0;
	uint64_t bytes_read = 0;
	uint64_t puts = 0;
	uint64_t bytes_written = 0;
};

struct StartupReport {
	PhaseIo connect;
	PhaseIo idm_build;
	PhaseIo edge_build;
	PhaseIo persist;
	size_t lists_loaded = 0;
	size_t lists_built = 0;
	uint64_t idm_entries = 0;
	uint64_t dangling_count = 0;

	double TotalMs() const {
		return connect.wall_ms + idm_build.wall_ms + edge_build.wall_ms + persist.wall_ms;
	}
	uint64_t TotalBytesRead() const {
		return connect.bytes_read + idm_build.bytes_read + edge_build.bytes_read + persist.bytes_read;
	}
	std::string ToCsv() const;
};

// Immutable after startup. Edge lists are keyed by edge file id; dangling
// holds the typed id space under file id 0. vertex_fingerprint records the
// vertex space the lists were built against; a mismatch invalidates
// everything including dangling assignments.
struct Topology {
	std::map<uint32_t, EdgeList> lists;
	DanglingCounter dangling;
	uint64_t vertex_fingerprint = 0;

	std::vector<const EdgeList *> ListsOfType(const std::string &edge_type) const;
	uint64_t TotalEntries() const;
};

struct StartupResult {
	Catalog catalog;
	Topology topology;
	StartupReport report;
};

// Full startup: catalog load, topology reuse where persisted artifacts
// validate, rebuild where they do not, optional materialization. Chunk
// downloads run on a dedicated I/O group (at most pipeline_depth in flight)
// while compute workers consume completed buffers.
StartupResult StartupLoad(ObjectStore &store, const std::string &schema_path, const StartupOptions &opts);

// Reconciles topology after manifest changes: applies the catalog diff, drops
// lists of retired files, rebuilds whatever no longer validates. Lists of
// unchanged files are reused in place.
StartupReport RefreshTopology(ObjectStore &store, Catalog &catalog, Topology &topology,
                              const StartupOptions &opts);

} // namespace lakegraph
