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
#include <utility>
#include <vector>

// Plain single-threaded graph algorithms over explicit vertex and edge lists,
// used as comparison baselines. Deliberately independent of the scan engine:
// everything here works on adjacency structures built up front.

namespace lakegraph::reference {

using VertexList = std::vector<uint64_t>;
using EdgeVec = std::vector<std::pair<uint64_t, uint64_t>>; // directed, duplicates allowed

struct PageRankOutput {
	std::map<uint64_t, double> scores;
	size_t iterations = 0;
	bool converged = false;
};

// Damped PageRank with uniform initialization; the rank mass of vertices
// without out-edges is redistributed uniformly each iteration. Stops when the
// L1 change drops below tol.
PageRankOutput PageRank(const VertexList &vertices, const EdgeVec &edges, double damping,
                        size_t max_iters, double tol);

// Connected components ignoring edge direction; every vertex is labeled with
// the smallest vertex id of its component.
std::map<uint64_t, uint64_t> Wcc(const VertexList &vertices, const EdgeVec &edges);

// Synchronous label propagation for max_iters rounds. Each round a vertex
// adopts the most frequent label among its in- and out-neighbors, breaking
// ties toward the smallest label.
std::map<uint64_t, uint64_t> Cdlp(const VertexList &vertices, const EdgeVec &edges, size_t max_iters);

// Level of each vertex following directed edges from source; unreachable
// vertices get -1.
std::map<uint64_t, int64_t> Bfs(const VertexList &vertices, const EdgeVec &edges, uint64_t source);

// Local clustering coefficient over the undirected simple projection of the
// graph (self loops dropped, duplicate and reverse edges collapsed).
std::map<uint64_t, double> Lcc(const VertexList &vertices, const EdgeVec &edges);

} // namespace lakegraph::reference
