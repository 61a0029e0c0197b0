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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cache/cache.hpp"
#include "catalog/catalog.hpp"
#include "engine/accum.hpp"
#include "engine/active_set.hpp"
#include "engine/plan.hpp"
#include "topology/topology.hpp"

namespace lakegraph {

class Engine;

namespace detail {
class ScanContext;
}

// Read access to one row (a vertex or an edge) during a scan. Values come
// from the column cache on demand; a dangling vertex has no backing row and
// yields no values.
class RowView {
public:
	uint64_t packed() const { return packed_; }
	bool dangling() const { return VertexFileId(packed_) == 0 && !is_edge_; }

	Value Get(const std::string &column) const;
	int64_t GetInt64(const std::string &column) const;

private:
	friend class Engine;
	friend class detail::ScanContext;

	RowView(detail::ScanContext *ctx, uint64_t packed, bool is_edge)
		: ctx_(ctx), packed_(packed), is_edge_(is_edge) {}

	detail::ScanContext *ctx_;
	uint64_t packed_;
	bool is_edge_;
};

// Dense per-vertex state for iterative algorithms, one array per vertex file.
template <typename T>
class VertexArray {
public:
	void Init(const FileRegistry &registry, const T &init) {
		per_file_.clear();
		for (const FileEntry *f : registry.FilesOfKind(FileKind::Vertex)) {
			per_file_[f->file_id].assign(static_cast<size_t>(f->row_count), init);
		}
	}

	T &At(uint64_t packed) {
		return per_file_.at(VertexFileId(packed))[VertexRowIndex(packed)];
	}
	const T &At(uint64_t packed) const {
		return per_file_.at(VertexFileId(packed))[VertexRowIndex(packed)];
	}

	// Visits every vertex in ascending packed-id order.
	void ForEach(const std::function<void(uint64_t, T &)> &fn) {
		for (auto &[file, rows] : per_file_) {
			for (size_t r = 0; r < rows.size(); r++) {
				fn(PackVertexId(file, static_cast<uint32_t>(r)), rows[r]);
			}
		}
	}

	const std::map<uint32_t, std::vector<T>> &files() const { return per_file_; }

private:
	std::map<uint32_t, std::vector<T>> per_file_;
};

struct ResultColumn {
	std::string name;
	// Column kind for table projections; -1 for accumulator columns, which
	// format by the value they carry.
	int kind = -1;
};

struct ResultTable {
	std::vector<ResultColumn> columns;
	std::vector<std::vector<Value>> rows;

	std::string ToCsv() const;
};

// Per-vertex output of one algorithm run, sorted by packed vertex id.
struct AlgorithmResult {
	std::string value_name;
	std::vector<std::pair<uint64_t, Value>> rows;
	size_t iterations = 0;
	bool converged = true;
};

struct EngineOptions {
	size_t parallelism = 0;  // 0 = hardware concurrency
	bool prefetch = true;    // issue frontier prefetches before vertex scans
	bool prune = true;       // skip edge portions outside the frontier id range
};

// Superstep executor over the translated topology and the column cache.
// Scans fan out one task per vertex file or edge list; accumulator updates
// and frontier inserts are buffered per task and merged at the barrier in
// task order, so results do not depend on scheduling.
class Engine {
public:
	Engine(Catalog &catalog, Topology &topology, FileMetaCache &metas, CacheManager &cache,
	       EngineOptions opts = {});

	using VertexUdf = std::function<bool(const RowView &, AccumUpdater &)>;
	using EdgeUdf = std::function<bool(const RowView &src, const RowView &edge, const RowView &tgt,
	                                   AccumUpdater &)>;

	struct EdgeScanSpec {
		std::string edge_type;
		bool dir_out = true;
		// Which stored endpoint of kept edges forms the output frontier.
		bool frontier_source = false;
	};

	// All rows of one vertex type, or of every vertex type, marked active.
	ActiveVertexSet AllOfType(const std::string &vertex_type) const;
	ActiveVertexSet AllVertices() const;
	// Registered over every vertex file, with nothing active.
	ActiveVertexSet EmptyVertexSet() const;

	// Applies udf to every active vertex; the result keeps the vertices for
	// which it returned true. Columns name what the udf will read, so the
	// needed chunks can be prefetched.
	ActiveVertexSet VertexMap(const ActiveVertexSet &input, const std::vector<std::string> &columns,
	                          const VertexUdf &udf, AccumulatorStore *accums = nullptr);

	// Scans every edge list of the given type, pruning portions whose source
	// bounds miss the frontier. Entries whose matched endpoint is active are
	// handed to udf with both endpoint views; kept edges contribute their
	// frontier-side endpoint to the output set. Buffered accumulator updates
	// merge into `accums` at the end of the call.
	ActiveVertexSet EdgeScan(const ActiveVertexSet &input, const EdgeScanSpec &spec,
	                         const EdgeUdf &udf, AccumulatorStore *accums = nullptr);

	// Semantic plan check; returns one message per problem, each prefixed
	// with its plan location. Empty means the plan is runnable.
	std::vector<std::string> ValidatePlan(const QueryPlan &plan) const;
	ResultTable RunPlan(const QueryPlan &plan);

	AlgorithmResult PageRank(double damping, size_t max_iters, double tol);
	AlgorithmResult Wcc();
	AlgorithmResult Cdlp(size_t max_iters);
	AlgorithmResult Bfs(const std::string &vertex_type, const RawKey &source);
	AlgorithmResult Lcc();

	// Primary key of a real vertex, read from its table's key column.
	RawKey VertexKeyOf(uint64_t packed);
	// Packed id of the vertex of `type` whose key column equals `key`.
	uint64_t ResolveVertex(const std::string &vertex_type, const RawKey &key);

	Catalog &catalog() { return catalog_; }
	Topology &topology() { return topology_; }
	CacheManager &cache() { return cache_; }
	const EngineOptions &options() const { return opts_; }

private:
	friend class detail::ScanContext;

	struct BoundPredicate {
		std::string column;
		CompareOp op;
		Value literal;
		ColumnKind kind;
	};

	size_t Parallelism() const;
	// Runs fn(task) for every task index on the compute pool and rethrows the
	// first task failure.
	void RunTasks(size_t task_count, const std::function<void(size_t)> &fn);

	// Table schema from the footer of the table's first data file; null when
	// the table has no files.
	const TableSchema *SchemaOfTable(const std::string &table) const;
	std::vector<const FileEntry *> VertexFilesOfType(const std::string &vertex_type) const;

	static std::vector<BoundPredicate> BindPredicates(const std::vector<Predicate> &preds,
	                                                  const TableSchema *schema, const std::string &loc,
	                                                  std::vector<std::string> &errors);
	static bool EvalPredicates(const std::vector<BoundPredicate> &preds, const RowView &row);

	Catalog &catalog_;
	Topology &topology_;
	FileMetaCache &metas_;
	CacheManager &cache_;
	EngineOptions opts_;
};

} // namespace lakegraph
