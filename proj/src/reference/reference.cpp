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

#include "reference/reference.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <set>
#include <unordered_map>

namespace lakegraph::reference {

namespace {

std::unordered_map<uint64_t, std::vector<uint64_t>> OutAdjacency(const EdgeVec &edges) {
	std::unordered_map<uint64_t, std::vector<uint64_t>> adj;
	for (const auto &[a, b] : edges) {
		adj[a].push_back(b);
	}
	return adj;
}

} // namespace

PageRankOutput PageRank(const VertexList &vertices, const EdgeVec &edges, double damping,
                        size_t max_iters, double tol) {
	PageRankOutput out;
	if (vertices.empty()) {
		out.converged = true;
		return out;
	}
	double n = static_cast<double>(vertices.size());

	std::unordered_map<uint64_t, size_t> out_deg;
	for (const auto &[a, b] : edges) {
		(void)b;
		out_deg[a]++;
	}

	std::map<uint64_t, double> rank;
	for (uint64_t v : vertices) {
		rank[v] = 1.0 / n;
	}

	for (size_t iter = 1; iter <= max_iters; iter++) {
		std::map<uint64_t, double> incoming;
		double sink_mass = 0;
		for (const auto &[v, r] : rank) {
			if (out_deg.find(v) == out_deg.end()) {
				sink_mass += r;
			}
		}
		for (const auto &[a, b] : edges) {
			incoming[b] += rank.at(a) / static_cast<double>(out_deg.at(a));
		}

		double l1 = 0;
		std::map<uint64_t, double> next;
		for (const auto &[v, r] : rank) {
			auto it = incoming.find(v);
			double in = it == incoming.end() ? 0.0 : it->second;
			double nr = (1.0 - damping) / n + damping * (in + sink_mass / n);
			next[v] = nr;
			l1 += std::fabs(nr - r);
		}
		rank.swap(next);
		out.iterations = iter;
		if (l1 < tol) {
			out.converged = true;
			break;
		}
	}
	out.scores = std::move(rank);
	return out;
}

std::map<uint64_t, uint64_t> Wcc(const VertexList &vertices, const EdgeVec &edges) {
	// Union-find over vertex ids.
	std::unordered_map<uint64_t, uint64_t> parent;
	for (uint64_t v : vertices) {
		parent[v] = v;
	}
	std::function<uint64_t(uint64_t)> find = [&](uint64_t v) {
		while (parent[v] != v) {
			parent[v] = parent[parent[v]];
			v = parent[v];
		}
		return v;
	};
	for (const auto &[a, b] : edges) {
		uint64_t ra = find(a), rb = find(b);
		if (ra != rb) {
			parent[ra] = rb;
		}
	}

	std::unordered_map<uint64_t, uint64_t> smallest;
	for (uint64_t v : vertices) {
		uint64_t root = find(v);
		auto it = smallest.find(root);
		if (it == smallest.end() || v < it->second) {
			smallest[root] = v;
		}
	}
	std::map<uint64_t, uint64_t> label;
	for (uint64_t v : vertices) {
		label[v] = smallest.at(find(v));
	}
	return label;
}

std::map<uint64_t, uint64_t> Cdlp(const VertexList &vertices, const EdgeVec &edges, size_t max_iters) {
	std::map<uint64_t, uint64_t> label;
	for (uint64_t v : vertices) {
		label[v] = v;
	}
	for (size_t iter = 0; iter < max_iters; iter++) {
		// Every edge occurrence contributes the label of each endpoint to the
		// other endpoint's histogram.
		std::unordered_map<uint64_t, std::map<uint64_t, uint64_t>> hist;
		for (const auto &[a, b] : edges) {
			hist[b][label.at(a)]++;
			hist[a][label.at(b)]++;
		}
		std::map<uint64_t, uint64_t> next;
		bool changed = false;
		for (uint64_t v : vertices) {
			auto it = hist.find(v);
			if (it == hist.end()) {
				next[v] = label.at(v);
				continue;
			}
			uint64_t best = 0, best_count = 0;
			for (const auto &[lab, count] : it->second) {
				if (count > best_count) {
					best = lab;
					best_count = count;
				}
			}
			next[v] = best;
			changed = changed || best != label.at(v);
		}
		label.swap(next);
		if (!changed) {
			break;
		}
	}
	return label;
}

std::map<uint64_t, int64_t> Bfs(const VertexList &vertices, const EdgeVec &edges, uint64_t source) {
	std::map<uint64_t, int64_t> level;
	for (uint64_t v : vertices) {
		level[v] = -1;
	}
	std::unordered_map<uint64_t, std::vector<uint64_t>> adj = OutAdjacency(edges);

	std::deque<uint64_t> queue;
	level[source] = 0;
	queue.push_back(source);
	while (!queue.empty()) {
		uint64_t v = queue.front();
		queue.pop_front();
		auto it = adj.find(v);
		if (it == adj.end()) {
			continue;
		}
		for (uint64_t w : it->second) {
			if (level.at(w) == -1) {
				level[w] = level.at(v) + 1;
				queue.push_back(w);
			}
		}
	}
	return level;
}

std::map<uint64_t, double> Lcc(const VertexList &vertices, const EdgeVec &edges) {
	std::unordered_map<uint64_t, std::set<uint64_t>> adj;
	for (const auto &[a, b] : edges) {
		if (a == b) {
			continue;
		}
		adj[a].insert(b);
		adj[b].insert(a);
	}
	std::map<uint64_t, double> lcc;
	for (uint64_t v : vertices) {
		auto it = adj.find(v);
		size_t deg = it == adj.end() ? 0 : it->second.size();
		if (deg < 2) {
			lcc[v] = 0.0;
			continue;
		}
		const std::set<uint64_t> &nv = it->second;
		uint64_t triangles = 0;
		for (auto u = nv.begin(); u != nv.end(); ++u) {
			for (auto w = std::next(u); w != nv.end(); ++w) {
				if (adj.at(*u).count(*w) > 0) {
					triangles++;
				}
			}
		}
		lcc[v] = 2.0 * static_cast<double>(triangles) /
			(static_cast<double>(deg) * static_cast<double>(deg - 1));
	}
	return lcc;
}

} // namespace lakegraph::reference
