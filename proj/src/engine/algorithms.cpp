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

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "common/error.hpp"
#include "engine/engine.hpp"

// Graph algorithms over the translated topology. All of them operate on the
// union of every vertex and edge type; entries with a dangling endpoint are
// skipped because those endpoints carry no state.

namespace lakegraph {

namespace {

std::vector<std::string> AllEdgeTypes(const GraphSchema &schema) {
	std::vector<std::string> out;
	out.reserve(schema.edges.size());
	for (const EdgeTypeDef &e : schema.edges) {
		out.push_back(e.type);
	}
	return out;
}

struct PairHash {
	size_t operator()(const std::pair<uint64_t, uint64_t> &p) const {
		uint64_t h = p.first * 0x9e3779b97f4a7c15ull;
		h ^= p.second + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
		return static_cast<size_t>(h);
	}
};

size_t CountCommon(const std::vector<uint64_t> &a, const std::vector<uint64_t> &b) {
	size_t i = 0, j = 0, n = 0;
	while (i < a.size() && j < b.size()) {
		if (a[i] < b[j]) {
			i++;
		} else if (a[i] > b[j]) {
			j++;
		} else {
			n++;
			i++;
			j++;
		}
	}
	return n;
}

} // namespace

AlgorithmResult Engine::PageRank(double damping, size_t max_iters, double tol) {
	AlgorithmResult res;
	res.value_name = "pagerank";

	uint64_t n = 0;
	for (const FileEntry *f : catalog_.registry.FilesOfKind(FileKind::Vertex)) {
		n += f->row_count;
	}
	if (n == 0) {
		return res;
	}

	VertexArray<double> score;
	score.Init(catalog_.registry, 1.0 / static_cast<double>(n));
	VertexArray<double> next;
	next.Init(catalog_.registry, 0.0);
	VertexArray<uint64_t> deg;
	deg.Init(catalog_.registry, 0);

	ActiveVertexSet full = AllVertices();
	std::vector<std::string> edge_types = AllEdgeTypes(catalog_.schema);

	AccumulatorStore store;
	uint32_t deg_slot = store.Declare("deg", AccumKind::COUNT);
	uint32_t sum_slot = store.Declare("sum", AccumKind::SUM);

	for (const std::string &etype : edge_types) {
		EdgeScan(full, EdgeScanSpec{etype, true, false},
			[&](const RowView &src, const RowView &, const RowView &tgt, AccumUpdater &up) {
				if (!tgt.dangling()) {
					up.Push(deg_slot, src.packed(), static_cast<int64_t>(1));
				}
				return false;
			},
			&store);
	}
	store.Visit(deg_slot, [&](uint64_t v, const AccumulatorStore::Entry &e) {
		deg.At(v) = static_cast<uint64_t>(std::get<int64_t>(e));
	});

	double base = (1.0 - damping) / static_cast<double>(n);
	res.converged = false;
	for (size_t iter = 1; iter <= max_iters; iter++) {
		store.Clear(sum_slot);
		for (const std::string &etype : edge_types) {
			EdgeScan(full, EdgeScanSpec{etype, true, false},
				[&](const RowView &src, const RowView &, const RowView &tgt, AccumUpdater &up) {
					if (!tgt.dangling()) {
						uint64_t s = src.packed();
						up.Push(sum_slot, tgt.packed(),
							score.At(s) / static_cast<double>(deg.At(s)));
					}
					return false;
				},
				&store);
		}

		double sink_mass = 0;
		score.ForEach([&](uint64_t v, double &s) {
			if (deg.At(v) == 0) {
				sink_mass += s;
			}
		});
		double redistributed = damping * sink_mass / static_cast<double>(n);

		double l1 = 0;
		next.ForEach([&](uint64_t v, double &out) {
			double incoming = 0;
			std::optional<Value> acc = store.Read(sum_slot, v);
			if (acc) {
				incoming = std::get<double>(*acc);
			}
			out = base + redistributed + damping * incoming;
			l1 += std::fabs(out - score.At(v));
		});
		std::swap(score, next);
		res.iterations = iter;
		if (l1 < tol) {
			res.converged = true;
			break;
		}
	}

	score.ForEach([&](uint64_t v, double &s) { res.rows.emplace_back(v, Value(s)); });
	return res;
}

AlgorithmResult Engine::Wcc() {
	AlgorithmResult res;
	res.value_name = "component";

	VertexArray<uint64_t> label;
	label.Init(catalog_.registry, 0);
	label.ForEach([](uint64_t v, uint64_t &l) { l = v; });

	std::vector<std::string> edge_types = AllEdgeTypes(catalog_.schema);
	AccumulatorStore store;
	uint32_t slot = store.Declare("min", AccumKind::MIN);

	ActiveVertexSet frontier = AllVertices();
	while (frontier.Count() > 0) {
		store.Clear(slot);
		for (const std::string &etype : edge_types) {
			auto exchange = [&](const RowView &src, const RowView &, const RowView &tgt,
			                    AccumUpdater &up) {
				if (!src.dangling() && !tgt.dangling()) {
					uint64_t s = src.packed(), t = tgt.packed();
					up.Push(slot, t, static_cast<int64_t>(label.At(s)));
					up.Push(slot, s, static_cast<int64_t>(label.At(t)));
				}
				return false;
			};
			EdgeScan(frontier, EdgeScanSpec{etype, true, false}, exchange, &store);
			EdgeScan(frontier, EdgeScanSpec{etype, false, false}, exchange, &store);
		}
		ActiveVertexSet changed = EmptyVertexSet();
		store.Visit(slot, [&](uint64_t v, const AccumulatorStore::Entry &e) {
			uint64_t candidate = static_cast<uint64_t>(std::get<int64_t>(e));
			if (candidate < label.At(v)) {
				label.At(v) = candidate;
				changed.Insert(v);
			}
		});
		frontier = std::move(changed);
		res.iterations++;
	}

	label.ForEach([&](uint64_t v, uint64_t &l) {
		res.rows.emplace_back(v, Value(static_cast<int64_t>(l)));
	});
	return res;
}

AlgorithmResult Engine::Cdlp(size_t max_iters) {
	AlgorithmResult res;
	res.value_name = "label";

	VertexArray<int64_t> label;
	label.Init(catalog_.registry, 0);
	label.ForEach([](uint64_t v, int64_t &l) { l = static_cast<int64_t>(v); });
	VertexArray<int64_t> next;
	next.Init(catalog_.registry, 0);

	std::vector<std::string> edge_types = AllEdgeTypes(catalog_.schema);
	AccumulatorStore store;
	uint32_t slot = store.Declare("labels", AccumKind::MAPCOUNT);
	ActiveVertexSet full = AllVertices();

	for (size_t iter = 1; iter <= max_iters; iter++) {
		store.Clear(slot);
		for (const std::string &etype : edge_types) {
			EdgeScan(full, EdgeScanSpec{etype, true, false},
				[&](const RowView &src, const RowView &, const RowView &tgt, AccumUpdater &up) {
					if (!tgt.dangling()) {
						uint64_t s = src.packed(), t = tgt.packed();
						up.Push(slot, t, label.At(s));
						up.Push(slot, s, label.At(t));
					}
					return false;
				},
				&store);
		}

		bool changed = false;
		next.ForEach([&](uint64_t v, int64_t &out) {
			const AccumulatorStore::MapCount *m = store.ReadMap(slot, v);
			if (m == nullptr || m->empty()) {
				out = label.At(v);
				return;
			}
			// Most frequent label; ties break to the smallest, which comes
			// first in key order.
			int64_t best = 0;
			uint64_t best_count = 0;
			for (const auto &[key, count] : *m) {
				if (count > best_count) {
					best = std::get<int64_t>(key);
					best_count = count;
				}
			}
			out = best;
			changed = changed || out != label.At(v);
		});
		std::swap(label, next);
		res.iterations = iter;
		if (!changed) {
			break;
		}
	}

	label.ForEach([&](uint64_t v, int64_t &l) { res.rows.emplace_back(v, Value(l)); });
	return res;
}

AlgorithmResult Engine::Bfs(const std::string &vertex_type, const RawKey &source) {
	AlgorithmResult res;
	res.value_name = "level";

	uint64_t root = ResolveVertex(vertex_type, source);
	VertexArray<int64_t> level;
	level.Init(catalog_.registry, -1);
	level.At(root) = 0;

	std::vector<std::string> edge_types = AllEdgeTypes(catalog_.schema);
	ActiveVertexSet frontier = EmptyVertexSet();
	frontier.Insert(root);

	int64_t depth = 0;
	while (frontier.Count() > 0) {
		ActiveVertexSet next = EmptyVertexSet();
		for (const std::string &etype : edge_types) {
			ActiveVertexSet reached = EdgeScan(frontier, EdgeScanSpec{etype, true, false},
				[&](const RowView &, const RowView &, const RowView &tgt, AccumUpdater &) {
					return !tgt.dangling() && level.At(tgt.packed()) == -1;
				});
			reached.ForEach([&](uint64_t v) { next.Insert(v); });
		}
		depth++;
		next.ForEach([&](uint64_t v) { level.At(v) = depth; });
		frontier = std::move(next);
	}

	res.iterations = static_cast<size_t>(depth > 0 ? depth - 1 : 0);
	level.ForEach([&](uint64_t v, int64_t &l) { res.rows.emplace_back(v, Value(l)); });
	return res;
}

AlgorithmResult Engine::Lcc() {
	AlgorithmResult res;
	res.value_name = "lcc";

	// Undirected simple projection: self loops dropped, parallel edges and
	// reverse duplicates collapsed.
	std::unordered_set<std::pair<uint64_t, uint64_t>, PairHash> edges;
	std::unordered_map<uint64_t, std::vector<uint64_t>> adj;
	for (const auto &[fid, list] : topology_.lists) {
		(void)fid;
		for (const EdgeEntry &e : list.entries) {
			if (VertexFileId(e.src) == 0 || VertexFileId(e.tgt) == 0 || e.src == e.tgt) {
				continue;
			}
			auto key = std::minmax(e.src, e.tgt);
			if (edges.insert(key).second) {
				adj[e.src].push_back(e.tgt);
				adj[e.tgt].push_back(e.src);
			}
		}
	}
	for (auto &[v, neighbors] : adj) {
		(void)v;
		std::sort(neighbors.begin(), neighbors.end());
	}

	std::vector<const FileEntry *> files = catalog_.registry.FilesOfKind(FileKind::Vertex);
	std::vector<std::vector<double>> per_file(files.size());
	static const std::vector<uint64_t> kNoNeighbors;
	RunTasks(files.size(), [&](size_t t) {
		uint32_t file = files[t]->file_id;
		std::vector<double> &out = per_file[t];
		out.assign(static_cast<size_t>(files[t]->row_count), 0.0);
		for (size_t r = 0; r < out.size(); r++) {
			uint64_t v = PackVertexId(file, static_cast<uint32_t>(r));
			auto it = adj.find(v);
			const std::vector<uint64_t> &nv = it == adj.end() ? kNoNeighbors : it->second;
			size_t degree = nv.size();
			if (degree < 2) {
				continue;
			}
			size_t closed = 0; // twice the triangle count through v
			for (uint64_t u : nv) {
				closed += CountCommon(nv, adj.at(u));
			}
			out[r] = static_cast<double>(closed) /
				(static_cast<double>(degree) * static_cast<double>(degree - 1));
		}
	});

	res.iterations = 1;
	for (size_t t = 0; t < files.size(); t++) {
		for (size_t r = 0; r < per_file[t].size(); r++) {
			res.rows.emplace_back(PackVertexId(files[t]->file_id, static_cast<uint32_t>(r)),
				Value(per_file[t][r]));
		}
	}
	return res;
}

} // namespace lakegraph
