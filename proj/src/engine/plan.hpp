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

#include <string>
#include <vector>

#include "common/value.hpp"
#include "engine/accum.hpp"

namespace lakegraph {

enum class CompareOp : uint8_t { EQ, NE, LT, LE, GT, GE };

const char *CompareOpName(CompareOp op);
CompareOp CompareOpFromName(const std::string &name);

// One conjunct of a filter: <column> <op> <literal>.
struct Predicate {
	std::string column;
	CompareOp op = CompareOp::EQ;
	Value literal {int64_t {0}};
};

enum class AccumTarget : uint8_t {
	Neighbor, // the endpoint opposite the matched side
	ScanSide, // the matched endpoint itself
};

// Accumulator update attached to a hop: for every edge the hop keeps, fold
// `expr` (the literal 1 or an edge column) into the named slot of the target
// endpoint.
struct PlanAccum {
	AccumTarget target = AccumTarget::Neighbor;
	std::string name;
	AccumKind kind = AccumKind::SUM;
	std::string expr;
};

// One traversal step. Direction picks which stored endpoint is matched
// against the incoming frontier: out matches sources, in matches targets.
// frontier_source picks which stored endpoint of the kept edges forms the
// outgoing frontier.
struct PlanHop {
	std::string edge_type;
	bool dir_out = true;
	std::vector<Predicate> where_edge;
	std::vector<Predicate> where_neighbor;
	std::vector<PlanAccum> accums;
	bool frontier_source = false;
};

struct PlanOutput {
	std::vector<std::string> columns;
	std::vector<std::string> accums;
	uint64_t limit = 0; // 0 = unlimited
};

// Declarative traversal plan: a filtered source vertex set, a fixed hop
// sequence, and an output projection over the final frontier.
struct QueryPlan {
	std::string source_type;
	std::vector<Predicate> source_where;
	std::vector<PlanHop> hops;
	PlanOutput output;

	// Parses the JSON plan form. Structural problems are collected and
	// reported together, each prefixed with its plan location.
	static QueryPlan FromJson(const std::string &text);
};

} // namespace lakegraph
