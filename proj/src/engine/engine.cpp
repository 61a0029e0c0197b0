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

#include "engine/engine.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "common/error.hpp"

namespace lakegraph {

namespace detail {

// Per-task column access. One pinned vertex handle is kept per (file,
// column) pair, swapped out when the row moves to another group, so a task
// never pins more than its working columns. Edge readers live only while the
// cursor stays in their row group, matching the forward-only scan order.
class ScanContext {
public:
	explicit ScanContext(Engine &eng) : eng_(eng) {}

	Value VertexValue(uint64_t packed, const std::string &column) {
		uint32_t file = VertexFileId(packed);
		if (file == 0) {
			throw LakeGraphError(ErrorKind::QueryError, "dangling vertex has no attribute values");
		}
		uint32_t row = VertexRowIndex(packed);
		const std::vector<uint64_t> &offsets = OffsetsOf(file);
		uint32_t group = static_cast<uint32_t>(GroupOf(offsets, row));
		auto key = std::make_pair(file, column);
		auto it = vertex_handles_.find(key);
		if (it == vertex_handles_.end() || it->second.group != group) {
			HeldHandle held {group, eng_.cache_.Vertex(file, group, column)};
			if (it == vertex_handles_.end()) {
				it = vertex_handles_.emplace(std::move(key), std::move(held)).first;
			} else {
				it->second = std::move(held);
			}
		}
		return it->second.handle->ValueAt(static_cast<uint32_t>(row - offsets[group]));
	}

	void SetEdgeFile(uint32_t file_id) {
		edge_file_ = file_id;
		edge_group_ = UINT32_MAX;
		edge_readers_.clear();
	}

	void SetEdgeCursor(uint32_t group, uint32_t row_in_group) {
		if (group != edge_group_) {
			edge_readers_.clear();
			edge_group_ = group;
		}
		edge_row_ = row_in_group;
	}

	Value EdgeValue(const std::string &column) {
		auto it = edge_readers_.find(column);
		if (it == edge_readers_.end()) {
			it = edge_readers_.emplace(column, eng_.cache_.Edge(edge_file_, edge_group_, column)).first;
		}
		return it->second.Read(edge_row_);
	}

private:
	const std::vector<uint64_t> &OffsetsOf(uint32_t file) {
		auto it = offsets_.find(file);
		if (it == offsets_.end()) {
			it = offsets_.emplace(file, eng_.metas_.Get(file).RowOffsets()).first;
		}
		return it->second;
	}

	static size_t GroupOf(const std::vector<uint64_t> &offsets, uint32_t row) {
		return static_cast<size_t>(std::upper_bound(offsets.begin(), offsets.end(), row) - offsets.begin()) - 1;
	}

	struct HeldHandle {
		uint32_t group;
		VertexHandle handle;
	};

	Engine &eng_;
	std::map<uint32_t, std::vector<uint64_t>> offsets_;
	std::map<std::pair<uint32_t, std::string>, HeldHandle> vertex_handles_;
	uint32_t edge_file_ = 0;
	uint32_t edge_group_ = UINT32_MAX;
	uint32_t edge_row_ = 0;
	std::map<std::string, EdgeReader> edge_readers_;
};

} // namespace detail

Value RowView::Get(const std::string &column) const {
	return is_edge_ ? ctx_->EdgeValue(column) : ctx_->VertexValue(packed_, column);
}

int64_t RowView::GetInt64(const std::string &column) const {
	Value v = Get(column);
	if (!std::holds_alternative<int64_t>(v)) {
		throw LakeGraphError(ErrorKind::QueryError, "column '" + column + "' is not integer valued");
	}
	return std::get<int64_t>(v);
}

namespace {

std::string CsvEscape(const std::string &s) {
	if (s.find_first_of(",\"\n\r") == std::string::npos) {
		return s;
	}
	std::string out = "\"";
	for (char c : s) {
		if (c == '"') {
			out += '"';
		}
		out += c;
	}
	out += '"';
	return out;
}

std::string FormatCell(const Value &v, int kind) {
	if (kind >= 0) {
		return FormatValue(v, static_cast<ColumnKind>(kind));
	}
	if (std::holds_alternative<int64_t>(v)) {
		return std::to_string(std::get<int64_t>(v));
	}
	if (std::holds_alternative<double>(v)) {
		return FormatDouble(std::get<double>(v));
	}
	if (std::holds_alternative<bool>(v)) {
		return std::get<bool>(v) ? "true" : "false";
	}
	return std::get<std::string>(v);
}

Value DefaultAccumValue(AccumKind kind) {
	switch (kind) {
	case AccumKind::SUM:
	case AccumKind::COUNT:
		return Value(static_cast<int64_t>(0));
	case AccumKind::OR:
		return Value(false);
	case AccumKind::MIN:
	case AccumKind::MAX:
	case AccumKind::MAPCOUNT:
		return Value(std::string());
	}
	return Value(static_cast<int64_t>(0));
}

} // namespace

std::string ResultTable::ToCsv() const {
	std::string out;
	for (size_t i = 0; i < columns.size(); i++) {
		if (i > 0) {
			out += ',';
		}
		out += CsvEscape(columns[i].name);
	}
	out += '\n';
	for (const auto &row : rows) {
		for (size_t i = 0; i < row.size(); i++) {
			if (i > 0) {
				out += ',';
			}
			out += CsvEscape(FormatCell(row[i], columns[i].kind));
		}
		out += '\n';
	}
	return out;
}

Engine::Engine(Catalog &catalog, Topology &topology, FileMetaCache &metas, CacheManager &cache,
               EngineOptions opts)
	: catalog_(catalog), topology_(topology), metas_(metas), cache_(cache), opts_(opts) {}

size_t Engine::Parallelism() const {
	if (opts_.parallelism > 0) {
		return opts_.parallelism;
	}
	unsigned hw = std::thread::hardware_concurrency();
	return hw == 0 ? 1 : hw;
}

void Engine::RunTasks(size_t task_count, const std::function<void(size_t)> &fn) {
	if (task_count == 0) {
		return;
	}
	size_t threads = std::min(Parallelism(), task_count);
	if (threads <= 1) {
		for (size_t i = 0; i < task_count; i++) {
			fn(i);
		}
		return;
	}
	std::atomic<size_t> next {0};
	std::atomic<bool> failed {false};
	std::mutex err_mu;
	std::exception_ptr err;
	std::vector<std::thread> pool;
	pool.reserve(threads);
	for (size_t w = 0; w < threads; w++) {
		pool.emplace_back([&] {
			while (!failed.load(std::memory_order_relaxed)) {
				size_t i = next.fetch_add(1);
				if (i >= task_count) {
					return;
				}
				try {
					fn(i);
				} catch (...) {
					std::lock_guard<std::mutex> lock(err_mu);
					if (!err) {
						err = std::current_exception();
					}
					failed.store(true);
					return;
				}
			}
		});
	}
	for (std::thread &t : pool) {
		t.join();
	}
	if (err) {
		std::rethrow_exception(err);
	}
}

const TableSchema *Engine::SchemaOfTable(const std::string &table) const {
	std::vector<const FileEntry *> files = catalog_.registry.TableFiles(table);
	if (files.empty()) {
		return nullptr;
	}
	return &metas_.Get(files[0]->file_id).schema;
}

std::vector<const FileEntry *> Engine::VertexFilesOfType(const std::string &vertex_type) const {
	const VertexTypeDef *def = catalog_.schema.FindVertexType(vertex_type);
	if (def == nullptr) {
		throw LakeGraphError(ErrorKind::QueryError, "unknown vertex type '" + vertex_type + "'");
	}
	return catalog_.registry.TableFiles(def->table);
}

ActiveVertexSet Engine::AllOfType(const std::string &vertex_type) const {
	ActiveVertexSet out;
	for (const FileEntry *f : VertexFilesOfType(vertex_type)) {
		out.RegisterAll(f->file_id, static_cast<uint32_t>(f->row_count));
	}
	return out;
}

ActiveVertexSet Engine::AllVertices() const {
	ActiveVertexSet out;
	for (const FileEntry *f : catalog_.registry.FilesOfKind(FileKind::Vertex)) {
		out.RegisterAll(f->file_id, static_cast<uint32_t>(f->row_count));
	}
	return out;
}

ActiveVertexSet Engine::EmptyVertexSet() const {
	ActiveVertexSet out;
	for (const FileEntry *f : catalog_.registry.FilesOfKind(FileKind::Vertex)) {
		out.Register(f->file_id, static_cast<uint32_t>(f->row_count));
	}
	return out;
}

ActiveVertexSet Engine::VertexMap(const ActiveVertexSet &input, const std::vector<std::string> &columns,
                                  const VertexUdf &udf, AccumulatorStore *accums) {
	ActiveVertexSet out;
	std::vector<std::pair<uint32_t, const ActiveVertexSet::FileBits *>> tasks;
	for (const auto &[file, fb] : input.files()) {
		out.Register(file, fb.row_count);
		if (fb.active > 0) {
			tasks.emplace_back(file, &fb);
		}
	}
	if (opts_.prefetch && !columns.empty()) {
		for (const auto &[file, fb] : tasks) {
			cache_.PrefetchRange(file, fb->min_row, fb->max_row, columns);
		}
	}

	std::vector<std::vector<uint32_t>> kept(tasks.size());
	std::vector<AccumUpdater> updaters(tasks.size());
	RunTasks(tasks.size(), [&](size_t t) {
		const auto &[file, fb] = tasks[t];
		detail::ScanContext ctx(*this);
		std::vector<uint32_t> &rows = kept[t];
		ActiveVertexSet::ForEachRow(*fb, [&](uint32_t row) {
			RowView v(&ctx, PackVertexId(file, row), false);
			if (udf(v, updaters[t])) {
				rows.push_back(row);
			}
		});
	});

	for (size_t t = 0; t < tasks.size(); t++) {
		for (uint32_t row : kept[t]) {
			out.Insert(PackVertexId(tasks[t].first, row));
		}
		if (!updaters[t].updates().empty()) {
			if (accums == nullptr) {
				throw LakeGraphError(ErrorKind::Internal, "accumulator updates pushed without a store");
			}
			accums->ApplyAll(updaters[t].updates());
		}
	}
	return out;
}

ActiveVertexSet Engine::EdgeScan(const ActiveVertexSet &input, const EdgeScanSpec &spec,
                                 const EdgeUdf &udf, AccumulatorStore *accums) {
	const EdgeTypeDef *def = catalog_.schema.FindEdgeType(spec.edge_type);
	if (def == nullptr) {
		throw LakeGraphError(ErrorKind::QueryError, "unknown edge type '" + spec.edge_type + "'");
	}
	ActiveVertexSet out;
	const std::string &out_type = spec.frontier_source ? def->src_type : def->tgt_type;
	for (const FileEntry *f : VertexFilesOfType(out_type)) {
		out.Register(f->file_id, static_cast<uint32_t>(f->row_count));
	}
	if (input.Count() == 0) {
		return out;
	}

	std::map<uint32_t, std::pair<uint64_t, uint64_t>> ranges = input.ActiveRanges();
	struct ListTask {
		const EdgeList *list;
		std::vector<const EdgePortion *> portions;
	};
	std::vector<ListTask> tasks;
	for (const EdgeList *list : topology_.ListsOfType(spec.edge_type)) {
		if (list->entries.empty()) {
			continue;
		}
		ListTask task;
		task.list = list;
		// Portion bounds index stored source ids, so they only prune scans
		// that match on the source side.
		if (opts_.prune && spec.dir_out) {
			task.portions = PruneEdgePortions(*list, ranges);
		} else {
			task.portions.reserve(list->portions.size());
			for (const EdgePortion &p : list->portions) {
				task.portions.push_back(&p);
			}
		}
		if (!task.portions.empty()) {
			tasks.push_back(std::move(task));
		}
	}

	std::vector<std::vector<uint64_t>> outs(tasks.size());
	std::vector<AccumUpdater> updaters(tasks.size());
	RunTasks(tasks.size(), [&](size_t t) {
		const EdgeList &list = *tasks[t].list;
		detail::ScanContext ctx(*this);
		ctx.SetEdgeFile(list.edge_file_id);
		std::vector<uint64_t> offsets = metas_.Get(list.edge_file_id).RowOffsets();
		for (const EdgePortion *p : tasks[t].portions) {
			for (uint32_t g = p->group_start; g < p->group_end; g++) {
				uint64_t start = offsets[g];
				uint64_t end = offsets[g + 1];
				for (uint64_t row = start; row < end; row++) {
					const EdgeEntry &e = list.entries[row];
					uint64_t matched = spec.dir_out ? e.src : e.tgt;
					if (!input.Contains(matched)) {
						continue;
					}
					ctx.SetEdgeCursor(g, static_cast<uint32_t>(row - start));
					RowView src(&ctx, e.src, false);
					RowView tgt(&ctx, e.tgt, false);
					RowView edge(&ctx, PackVertexId(list.edge_file_id, static_cast<uint32_t>(row)), true);
					if (udf(src, edge, tgt, updaters[t])) {
						outs[t].push_back(spec.frontier_source ? e.src : e.tgt);
					}
				}
			}
		}
	});

	for (size_t t = 0; t < tasks.size(); t++) {
		for (uint64_t v : outs[t]) {
			out.Insert(v);
		}
		if (!updaters[t].updates().empty()) {
			if (accums == nullptr) {
				throw LakeGraphError(ErrorKind::Internal, "accumulator updates pushed without a store");
			}
			accums->ApplyAll(updaters[t].updates());
		}
	}
	return out;
}

std::vector<Engine::BoundPredicate> Engine::BindPredicates(const std::vector<Predicate> &preds,
                                                           const TableSchema *schema, const std::string &loc,
                                                           std::vector<std::string> &errors) {
	std::vector<BoundPredicate> out;
	if (schema == nullptr) {
		// No data files yet, so no rows either; nothing will be evaluated.
		return out;
	}
	for (size_t i = 0; i < preds.size(); i++) {
		const Predicate &p = preds[i];
		std::string at = loc + "[" + std::to_string(i) + "]";
		int idx = schema->Find(p.column);
		if (idx < 0) {
			errors.push_back(at + ": column '" + p.column + "' does not exist");
			continue;
		}
		ColumnKind kind = schema->columns[static_cast<size_t>(idx)].kind;
		BoundPredicate bp {p.column, p.op, p.literal, kind};
		switch (kind) {
		case ColumnKind::INT64:
			if (!std::holds_alternative<int64_t>(p.literal)) {
				errors.push_back(at + ": column '" + p.column + "' needs an integer literal");
				continue;
			}
			break;
		case ColumnKind::FLOAT64:
			if (std::holds_alternative<int64_t>(p.literal)) {
				bp.literal = static_cast<double>(std::get<int64_t>(p.literal));
			} else if (!std::holds_alternative<double>(p.literal)) {
				errors.push_back(at + ": column '" + p.column + "' needs a numeric literal");
				continue;
			}
			break;
		case ColumnKind::STRING:
			if (!std::holds_alternative<std::string>(p.literal)) {
				errors.push_back(at + ": column '" + p.column + "' needs a string literal");
				continue;
			}
			break;
		case ColumnKind::DATE32:
			if (std::holds_alternative<std::string>(p.literal)) {
				try {
					bp.literal = static_cast<int64_t>(ParseDate32(std::get<std::string>(p.literal)));
				} catch (const LakeGraphError &) {
					errors.push_back(at + ": '" + std::get<std::string>(p.literal) +
						"' is not a valid date for column '" + p.column + "'");
					continue;
				}
			} else if (!std::holds_alternative<int64_t>(p.literal)) {
				errors.push_back(at + ": column '" + p.column + "' needs a date literal");
				continue;
			}
			break;
		case ColumnKind::BOOL:
			if (!std::holds_alternative<bool>(p.literal)) {
				errors.push_back(at + ": column '" + p.column + "' needs a boolean literal");
				continue;
			}
			break;
		}
		out.push_back(std::move(bp));
	}
	return out;
}

bool Engine::EvalPredicates(const std::vector<BoundPredicate> &preds, const RowView &row) {
	if (preds.empty()) {
		return true;
	}
	if (row.dangling()) {
		return false;
	}
	for (const BoundPredicate &p : preds) {
		int c = CompareValues(row.Get(p.column), p.literal, p.kind);
		bool ok = false;
		switch (p.op) {
		case CompareOp::EQ: ok = c == 0; break;
		case CompareOp::NE: ok = c != 0; break;
		case CompareOp::LT: ok = c < 0; break;
		case CompareOp::LE: ok = c <= 0; break;
		case CompareOp::GT: ok = c > 0; break;
		case CompareOp::GE: ok = c >= 0; break;
		}
		if (!ok) {
			return false;
		}
	}
	return true;
}

std::vector<std::string> Engine::ValidatePlan(const QueryPlan &plan) const {
	std::vector<std::string> errors;
	const GraphSchema &gs = catalog_.schema;

	const VertexTypeDef *src = gs.FindVertexType(plan.source_type);
	std::string cur_type;
	if (src == nullptr) {
		errors.push_back("source.type: unknown vertex type '" + plan.source_type + "'");
	} else {
		cur_type = src->type;
		BindPredicates(plan.source_where, SchemaOfTable(src->table), "source.where", errors);
	}

	std::map<std::string, AccumKind> accum_kinds;
	for (size_t i = 0; i < plan.hops.size(); i++) {
		const PlanHop &h = plan.hops[i];
		std::string at = "hops[" + std::to_string(i) + "]";
		const EdgeTypeDef *ed = gs.FindEdgeType(h.edge_type);
		if (ed == nullptr) {
			errors.push_back(at + ".edge: unknown edge type '" + h.edge_type + "'");
			cur_type.clear();
			continue;
		}
		std::string scan_type = h.dir_out ? ed->src_type : ed->tgt_type;
		if (!cur_type.empty() && scan_type != cur_type) {
			errors.push_back(at + ": edge '" + h.edge_type + "' matches " + scan_type +
				" vertices but the frontier holds " + cur_type);
		}
		const TableSchema *ets = SchemaOfTable(ed->table);
		BindPredicates(h.where_edge, ets, at + ".whereEdge", errors);
		std::string neighbor_type = h.dir_out ? ed->tgt_type : ed->src_type;
		const VertexTypeDef *nv = gs.FindVertexType(neighbor_type);
		BindPredicates(h.where_neighbor, nv ? SchemaOfTable(nv->table) : nullptr,
			at + ".whereNeighbor", errors);

		for (size_t k = 0; k < h.accums.size(); k++) {
			const PlanAccum &a = h.accums[k];
			std::string aat = at + ".accum[" + std::to_string(k) + "]";
			auto it = accum_kinds.find(a.name);
			if (it != accum_kinds.end()) {
				if (it->second != a.kind) {
					errors.push_back(aat + ": accumulator '" + a.name + "' already declared as " +
						AccumKindName(it->second));
				}
			} else {
				accum_kinds.emplace(a.name, a.kind);
			}
			if (a.kind == AccumKind::OR && a.expr == "1") {
				errors.push_back(aat + ".expr: an or accumulator needs a boolean edge column");
			}
			if (a.expr != "1" && ets != nullptr) {
				int idx = ets->Find(a.expr);
				if (idx < 0) {
					errors.push_back(aat + ".expr: column '" + a.expr + "' not in edge table '" +
						ed->table + "'");
				} else {
					ColumnKind ck = ets->columns[static_cast<size_t>(idx)].kind;
					if (a.kind == AccumKind::SUM && ck != ColumnKind::INT64 && ck != ColumnKind::FLOAT64) {
						errors.push_back(aat + ".expr: sum needs a numeric column");
					}
					if (a.kind == AccumKind::OR && ck != ColumnKind::BOOL) {
						errors.push_back(aat + ".expr: or needs a boolean column");
					}
					if (a.kind == AccumKind::MAPCOUNT && ck == ColumnKind::FLOAT64) {
						errors.push_back(aat + ".expr: mapcount needs integer or string keys");
					}
				}
			}
		}
		cur_type = h.frontier_source ? ed->src_type : ed->tgt_type;
	}

	if (!cur_type.empty()) {
		const VertexTypeDef *ov = gs.FindVertexType(cur_type);
		const TableSchema *ots = ov ? SchemaOfTable(ov->table) : nullptr;
		for (size_t i = 0; i < plan.output.columns.size(); i++) {
			if (ots != nullptr && ots->Find(plan.output.columns[i]) < 0) {
				errors.push_back("output.columns[" + std::to_string(i) + "]: column '" +
					plan.output.columns[i] + "' not in table '" + ov->table + "'");
			}
		}
	}
	for (size_t i = 0; i < plan.output.accums.size(); i++) {
		if (accum_kinds.find(plan.output.accums[i]) == accum_kinds.end()) {
			errors.push_back("output.accums[" + std::to_string(i) + "]: accumulator '" +
				plan.output.accums[i] + "' is never updated");
		}
	}
	return errors;
}

ResultTable Engine::RunPlan(const QueryPlan &plan) {
	std::vector<std::string> errors = ValidatePlan(plan);
	if (!errors.empty()) {
		std::string joined = "invalid plan: ";
		for (size_t i = 0; i < errors.size(); i++) {
			if (i > 0) {
				joined += "; ";
			}
			joined += errors[i];
		}
		throw LakeGraphError(ErrorKind::QueryError, joined);
	}

	const GraphSchema &gs = catalog_.schema;
	const VertexTypeDef *srcdef = gs.FindVertexType(plan.source_type);
	std::vector<std::string> ignored;
	std::vector<BoundPredicate> src_preds =
		BindPredicates(plan.source_where, SchemaOfTable(srcdef->table), "source.where", ignored);

	AccumulatorStore store;
	struct BoundAccum {
		AccumTarget target;
		uint32_t slot;
		bool literal_one;
		std::string column;
	};
	struct BoundHop {
		EdgeScanSpec spec;
		std::vector<BoundPredicate> edge_preds;
		std::vector<BoundPredicate> neighbor_preds;
		std::vector<BoundAccum> accums;
	};
	std::vector<BoundHop> hops;
	std::string cur_type = plan.source_type;
	for (const PlanHop &h : plan.hops) {
		const EdgeTypeDef *ed = gs.FindEdgeType(h.edge_type);
		const TableSchema *ets = SchemaOfTable(ed->table);
		BoundHop bh;
		bh.spec = EdgeScanSpec{h.edge_type, h.dir_out, h.frontier_source};
		bh.edge_preds = BindPredicates(h.where_edge, ets, "", ignored);
		std::string neighbor_type = h.dir_out ? ed->tgt_type : ed->src_type;
		const VertexTypeDef *nv = gs.FindVertexType(neighbor_type);
		bh.neighbor_preds = BindPredicates(h.where_neighbor, SchemaOfTable(nv->table), "", ignored);
		for (const PlanAccum &a : h.accums) {
			BoundAccum ba;
			ba.target = a.target;
			ba.slot = store.Declare(a.name, a.kind);
			ba.literal_one = a.expr == "1";
			ba.column = a.expr;
			bh.accums.push_back(std::move(ba));
		}
		hops.push_back(std::move(bh));
		cur_type = h.frontier_source ? ed->src_type : ed->tgt_type;
	}

	std::vector<std::string> source_columns;
	for (const BoundPredicate &p : src_preds) {
		source_columns.push_back(p.column);
	}
	if (hops.empty()) {
		for (const std::string &c : plan.output.columns) {
			source_columns.push_back(c);
		}
	}
	ActiveVertexSet frontier = VertexMap(AllOfType(plan.source_type), source_columns,
		[&](const RowView &v, AccumUpdater &) { return EvalPredicates(src_preds, v); });

	for (const BoundHop &bh : hops) {
		frontier = EdgeScan(frontier, bh.spec,
			[&](const RowView &src, const RowView &edge, const RowView &tgt, AccumUpdater &up) {
				if (!EvalPredicates(bh.edge_preds, edge)) {
					return false;
				}
				const RowView &neighbor = bh.spec.dir_out ? tgt : src;
				const RowView &scanside = bh.spec.dir_out ? src : tgt;
				if (!EvalPredicates(bh.neighbor_preds, neighbor)) {
					return false;
				}
				for (const BoundAccum &a : bh.accums) {
					const RowView &target = a.target == AccumTarget::Neighbor ? neighbor : scanside;
					if (target.dangling()) {
						continue;
					}
					Value v = a.literal_one ? Value(static_cast<int64_t>(1)) : edge.Get(a.column);
					up.Push(a.slot, target.packed(), std::move(v));
				}
				return true;
			},
			&store);
	}

	const VertexTypeDef *outdef = gs.FindVertexType(cur_type);
	const TableSchema *ots = outdef ? SchemaOfTable(outdef->table) : nullptr;
	ResultTable table;
	bool vertex_only = plan.output.columns.empty() && plan.output.accums.empty();
	if (vertex_only) {
		table.columns.push_back(ResultColumn{"vertex", -1});
	}
	for (const std::string &c : plan.output.columns) {
		int kind = -1;
		if (ots != nullptr) {
			int idx = ots->Find(c);
			kind = static_cast<int>(ots->columns[static_cast<size_t>(idx)].kind);
		}
		table.columns.push_back(ResultColumn{c, kind});
	}
	std::vector<uint32_t> accum_slots;
	for (const std::string &a : plan.output.accums) {
		accum_slots.push_back(static_cast<uint32_t>(store.FindSlot(a)));
		table.columns.push_back(ResultColumn{a, -1});
	}

	detail::ScanContext ctx(*this);
	uint64_t limit = plan.output.limit;
	frontier.ForEach([&](uint64_t packed) {
		if (limit > 0 && table.rows.size() >= limit) {
			return;
		}
		std::vector<Value> row;
		row.reserve(table.columns.size());
		if (vertex_only) {
			row.emplace_back(static_cast<int64_t>(packed));
		}
		RowView v(&ctx, packed, false);
		for (const std::string &c : plan.output.columns) {
			row.push_back(v.Get(c));
		}
		for (size_t i = 0; i < accum_slots.size(); i++) {
			std::optional<Value> val = store.Read(accum_slots[i], packed);
			row.push_back(val ? *val : DefaultAccumValue(store.KindOf(accum_slots[i])));
		}
		table.rows.push_back(std::move(row));
	});
	return table;
}

RawKey Engine::VertexKeyOf(uint64_t packed) {
	uint32_t file = VertexFileId(packed);
	if (file == 0) {
		throw LakeGraphError(ErrorKind::NotFound, "dangling vertex has no primary key");
	}
	const FileEntry &fe = catalog_.registry.Require(file);
	const VertexTypeDef *def = catalog_.schema.FindVertexByTable(fe.table);
	if (def == nullptr) {
		throw LakeGraphError(ErrorKind::Internal, "file " + std::to_string(file) + " is not a vertex table file");
	}
	detail::ScanContext ctx(*this);
	Value v = ctx.VertexValue(packed, def->key);
	if (std::holds_alternative<int64_t>(v)) {
		return RawKey(std::get<int64_t>(v));
	}
	if (std::holds_alternative<std::string>(v)) {
		return RawKey(std::get<std::string>(v));
	}
	throw LakeGraphError(ErrorKind::FormatError, "key column '" + def->key + "' is not INT64 or STRING");
}

uint64_t Engine::ResolveVertex(const std::string &vertex_type, const RawKey &key) {
	const VertexTypeDef *def = catalog_.schema.FindVertexType(vertex_type);
	if (def == nullptr) {
		throw LakeGraphError(ErrorKind::QueryError, "unknown vertex type '" + vertex_type + "'");
	}
	Value key_val = std::holds_alternative<int64_t>(key)
		? Value(std::get<int64_t>(key))
		: Value(std::get<std::string>(key));
	for (const FileEntry *f : VertexFilesOfType(vertex_type)) {
		const TableMeta &meta = metas_.Get(f->file_id);
		int col = meta.schema.Find(def->key);
		if (col < 0) {
			continue;
		}
		ColumnKind kind = meta.schema.columns[static_cast<size_t>(col)].kind;
		if (!ValueKindMatches(key_val, kind)) {
			throw LakeGraphError(ErrorKind::QueryError,
				"key literal does not match the " + std::string(ColumnKindName(kind)) +
				" key column of '" + vertex_type + "'");
		}
		uint64_t base = 0;
		for (size_t g = 0; g < meta.row_groups.size(); g++) {
			VertexHandle h = cache_.Vertex(f->file_id, static_cast<uint32_t>(g), def->key);
			uint32_t rows = static_cast<uint32_t>(meta.row_groups[g].row_count);
			for (uint32_t r = 0; r < rows; r++) {
				if (CompareValues(h->ValueAt(r), key_val, kind) == 0) {
					return PackVertexId(f->file_id, static_cast<uint32_t>(base + r));
				}
			}
			base += rows;
		}
	}
	std::string text = std::holds_alternative<int64_t>(key)
		? std::to_string(std::get<int64_t>(key))
		: std::get<std::string>(key);
	throw LakeGraphError(ErrorKind::NotFound, "no '" + vertex_type + "' vertex with key " + text);
}

} // namespace lakegraph
