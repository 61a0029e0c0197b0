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

#include "engine/plan.hpp"

#include "common/error.hpp"
#include "json.hpp"

using json = nlohmann::json;

namespace lakegraph {

const char *CompareOpName(CompareOp op) {
	switch (op) {
	case CompareOp::EQ: return "==";
	case CompareOp::NE: return "!=";
	case CompareOp::LT: return "<";
	case CompareOp::LE: return "<=";
	case CompareOp::GT: return ">";
	case CompareOp::GE: return ">=";
	}
	return "?";
}

CompareOp CompareOpFromName(const std::string &name) {
	if (name == "==") return CompareOp::EQ;
	if (name == "!=") return CompareOp::NE;
	if (name == "<") return CompareOp::LT;
	if (name == "<=") return CompareOp::LE;
	if (name == ">") return CompareOp::GT;
	if (name == ">=") return CompareOp::GE;
	throw LakeGraphError(ErrorKind::QueryError, "unknown comparison operator '" + name + "'");
}

namespace {

struct ParseErrors {
	std::vector<std::string> list;

	void Add(const std::string &loc, const std::string &what) {
		list.push_back(loc + ": " + what);
	}
	void ThrowIfAny() const {
		if (list.empty()) {
			return;
		}
		std::string joined = "invalid plan: ";
		for (size_t i = 0; i < list.size(); i++) {
			if (i > 0) {
				joined += "; ";
			}
			joined += list[i];
		}
		throw LakeGraphError(ErrorKind::QueryError, joined);
	}
};

bool LiteralFromJson(const json &j, Value *out) {
	if (j.is_boolean()) {
		*out = j.get<bool>();
	} else if (j.is_number_integer() || j.is_number_unsigned()) {
		*out = j.get<int64_t>();
	} else if (j.is_number_float()) {
		*out = j.get<double>();
	} else if (j.is_string()) {
		*out = j.get<std::string>();
	} else {
		return false;
	}
	return true;
}

std::vector<Predicate> ParseWhere(const json &arr, const std::string &loc, ParseErrors &errs) {
	std::vector<Predicate> out;
	if (!arr.is_array()) {
		errs.Add(loc, "must be an array of {col, op, value} objects");
		return out;
	}
	for (size_t i = 0; i < arr.size(); i++) {
		std::string at = loc + "[" + std::to_string(i) + "]";
		const json &p = arr[i];
		if (!p.is_object()) {
			errs.Add(at, "must be an object");
			continue;
		}
		Predicate pred;
		if (!p.contains("col") || !p["col"].is_string() || p["col"].get<std::string>().empty()) {
			errs.Add(at, "missing column name");
			continue;
		}
		pred.column = p["col"].get<std::string>();
		if (!p.contains("op") || !p["op"].is_string()) {
			errs.Add(at, "missing comparison operator");
			continue;
		}
		try {
			pred.op = CompareOpFromName(p["op"].get<std::string>());
		} catch (const LakeGraphError &e) {
			errs.Add(at, e.what());
			continue;
		}
		if (!p.contains("value") || !LiteralFromJson(p["value"], &pred.literal)) {
			errs.Add(at, "missing or non-scalar literal value");
			continue;
		}
		out.push_back(std::move(pred));
	}
	return out;
}

} // namespace

QueryPlan QueryPlan::FromJson(const std::string &text) {
	json root = json::parse(text, nullptr, false);
	if (root.is_discarded() || !root.is_object()) {
		throw LakeGraphError(ErrorKind::QueryError, "invalid plan: not a JSON object");
	}

	ParseErrors errs;
	QueryPlan plan;

	if (!root.contains("source") || !root["source"].is_object()) {
		errs.Add("source", "missing object");
	} else {
		const json &src = root["source"];
		if (!src.contains("type") || !src["type"].is_string() || src["type"].get<std::string>().empty()) {
			errs.Add("source.type", "missing vertex type");
		} else {
			plan.source_type = src["type"].get<std::string>();
		}
		if (src.contains("where")) {
			plan.source_where = ParseWhere(src["where"], "source.where", errs);
		}
	}

	if (root.contains("hops")) {
		const json &hops = root["hops"];
		if (!hops.is_array()) {
			errs.Add("hops", "must be an array");
		} else {
			for (size_t i = 0; i < hops.size(); i++) {
				std::string at = "hops[" + std::to_string(i) + "]";
				const json &h = hops[i];
				PlanHop hop;
				if (!h.is_object()) {
					errs.Add(at, "must be an object");
					continue;
				}
				if (!h.contains("edge") || !h["edge"].is_string() || h["edge"].get<std::string>().empty()) {
					errs.Add(at + ".edge", "missing edge type");
				} else {
					hop.edge_type = h["edge"].get<std::string>();
				}
				std::string dir = h.value("dir", "out");
				if (dir == "out") {
					hop.dir_out = true;
				} else if (dir == "in") {
					hop.dir_out = false;
				} else {
					errs.Add(at + ".dir", "must be 'out' or 'in'");
				}
				std::string frontier = h.value("frontier", hop.dir_out ? "target" : "source");
				if (frontier == "source") {
					hop.frontier_source = true;
				} else if (frontier == "target") {
					hop.frontier_source = false;
				} else {
					errs.Add(at + ".frontier", "must be 'source' or 'target'");
				}
				if (h.contains("whereEdge")) {
					hop.where_edge = ParseWhere(h["whereEdge"], at + ".whereEdge", errs);
				}
				if (h.contains("whereNeighbor")) {
					hop.where_neighbor = ParseWhere(h["whereNeighbor"], at + ".whereNeighbor", errs);
				}
				if (h.contains("accum")) {
					const json &accums = h["accum"];
					if (!accums.is_array()) {
						errs.Add(at + ".accum", "must be an array");
					} else {
						for (size_t k = 0; k < accums.size(); k++) {
							std::string aat = at + ".accum[" + std::to_string(k) + "]";
							const json &a = accums[k];
							if (!a.is_object()) {
								errs.Add(aat, "must be an object");
								continue;
							}
							PlanAccum acc;
							std::string target = a.value("target", "neighbor");
							if (target == "neighbor") {
								acc.target = AccumTarget::Neighbor;
							} else if (target == "scanside") {
								acc.target = AccumTarget::ScanSide;
							} else {
								errs.Add(aat + ".target", "must be 'neighbor' or 'scanside'");
							}
							if (!a.contains("name") || !a["name"].is_string() || a["name"].get<std::string>().empty()) {
								errs.Add(aat + ".name", "missing accumulator name");
								continue;
							}
							acc.name = a["name"].get<std::string>();
							try {
								acc.kind = AccumKindFromName(a.value("kind", "sum"));
							} catch (const LakeGraphError &e) {
								errs.Add(aat + ".kind", e.what());
								continue;
							}
							acc.expr = a.value("expr", "1");
							if (acc.expr.empty()) {
								errs.Add(aat + ".expr", "must be '1' or an edge column name");
								continue;
							}
							hop.accums.push_back(std::move(acc));
						}
					}
				}
				plan.hops.push_back(std::move(hop));
			}
		}
	}

	if (root.contains("output")) {
		const json &out = root["output"];
		if (!out.is_object()) {
			errs.Add("output", "must be an object");
		} else {
			json cols = out.value("columns", json::array());
			for (size_t i = 0; i < cols.size(); i++) {
				if (!cols[i].is_string()) {
					errs.Add("output.columns[" + std::to_string(i) + "]", "must be a column name");
					continue;
				}
				plan.output.columns.push_back(cols[i].get<std::string>());
			}
			json accs = out.value("accums", json::array());
			for (size_t i = 0; i < accs.size(); i++) {
				if (!accs[i].is_string()) {
					errs.Add("output.accums[" + std::to_string(i) + "]", "must be an accumulator name");
					continue;
				}
				plan.output.accums.push_back(accs[i].get<std::string>());
			}
			if (out.contains("limit")) {
				if (!out["limit"].is_number_unsigned() && !out["limit"].is_number_integer()) {
					errs.Add("output.limit", "must be a non-negative integer");
				} else {
					int64_t lim = out["limit"].get<int64_t>();
					if (lim < 0) {
						errs.Add("output.limit", "must be a non-negative integer");
					} else {
						plan.output.limit = static_cast<uint64_t>(lim);
					}
				}
			}
		}
	}

	errs.ThrowIfAny();
	return plan;
}

} // namespace lakegraph
