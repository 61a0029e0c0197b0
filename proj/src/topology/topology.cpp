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

#include "topology/topology.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "common/bytes.hpp"
#include "common/error.hpp"
#include "common/threading.hpp"
#include "lakestore/encoding.hpp"
#include "lakestore/lgc.hpp"

namespace lakegraph {

namespace {

constexpr char kTopologyMagic[4] = {'L', 'G', 'T', '1'};
constexpr char kDanglingMagic[4] = {'L', 'G', 'D', '1'};
constexpr size_t kIdmInsertBatch = 4096;

size_t ResolveParallelism(size_t requested) {
	if (requested > 0) {
		return requested;
	}
	size_t hw = std::thread::hardware_concurrency();
	return hw > 0 ? hw : 4;
}

RawKey KeyAt(const ColumnVector &col, size_t i) {
	if (col.kind == ColumnKind::INT64) {
		return col.ints[i];
	}
	return col.strings[i];
}

std::string FormatRawKey(const RawKey &key) {
	if (std::holds_alternative<int64_t>(key)) {
		return std::to_string(std::get<int64_t>(key));
	}
	return "'" + std::get<std::string>(key) + "'";
}

void CheckKeyColumn(const FileEntry &entry, const TableMeta &meta, const std::string &column, int *index) {
	int idx = meta.schema.Find(column);
	if (idx < 0) {
		throw LakeGraphError(ErrorKind::ContractViolation,
		                     "key column '" + column + "' missing from file " + entry.path);
	}
	ColumnKind kind = meta.schema.columns[idx].kind;
	if (kind != ColumnKind::INT64 && kind != ColumnKind::STRING) {
		throw LakeGraphError(ErrorKind::ContractViolation,
		                     "key column '" + column + "' in file " + entry.path + " must be INT64 or STRING");
	}
	*index = idx;
}

void CheckRowCount(const FileEntry &entry, const TableMeta &meta) {
	if (meta.TotalRows() != entry.row_count) {
		throw LakeGraphError(ErrorKind::ContractViolation,
		                     "file " + entry.path + " holds " + std::to_string(meta.TotalRows()) +
		                     " rows but its manifest registered " + std::to_string(entry.row_count));
	}
}

// One column chunk to download and translate.
struct FetchTask {
	const FileEntry *entry = nullptr;
	const TableMeta *meta = nullptr;
	uint32_t group = 0;
	int column = -1;
	int side = -1; // 0 = edge src, 1 = edge tgt, -1 = vertex key
	size_t slot = 0; // index into phase-specific result storage
};

struct FetchDone {
	FetchTask task;
	Bytes bytes;
};

// Runs download tasks on a dedicated I/O group (one in-flight request per
// I/O thread, so at most io_depth downloads in flight) while worker threads
// consume completed buffers. Rethrows the first failure from either side.
void RunChunkPipeline(ObjectStore &store, const std::vector<FetchTask> &tasks, size_t io_depth, size_t workers,
                      const std::function<void(FetchDone &)> &consume) {
	if (tasks.empty()) {
		return;
	}
	io_depth = std::max<size_t>(1, io_depth);
	workers = std::max<size_t>(1, workers);

	BlockingQueue<FetchDone> done;
	std::atomic<size_t> next {0};
	std::atomic<size_t> io_live {io_depth};
	std::atomic<bool> stop {false};
	std::mutex err_mu;
	std::exception_ptr first_error;

	auto record_error = [&] {
		std::lock_guard<std::mutex> guard(err_mu);
		if (!first_error) {
			first_error = std::current_exception();
		}
		stop.store(true);
	};

	std::vector<std::thread> threads;
	threads.reserve(io_depth + workers);
	for (size_t t = 0; t < io_depth; t++) {
		threads.emplace_back([&] {
			while (!stop.load()) {
				size_t i = next.fetch_add(1);
				if (i >= tasks.size()) {
					break;
				}
				const FetchTask &task = tasks[i];
				try {
					const ColumnChunkMeta &chunk = task.meta->row_groups[task.group].columns[task.column];
					Bytes bytes = ReadColumnChunkBytes(store, task.entry->path, chunk);
					done.Push({task, std::move(bytes)});
				} catch (...) {
					record_error();
				}
			}
			if (io_live.fetch_sub(1) == 1) {
				done.Close();
			}
		});
	}
	for (size_t t = 0; t < workers; t++) {
		threads.emplace_back([&] {
			while (auto item = done.Pop()) {
				if (stop.load()) {
					continue; // drain without processing
				}
				try {
					consume(*item);
				} catch (...) {
					record_error();
				}
			}
		});
	}
	for (auto &th : threads) {
		th.join();
	}
	if (first_error) {
		std::rethrow_exception(first_error);
	}
}

void MeasurePhase(ObjectStore &store, PhaseIo &out, const std::function<void()> &fn) {
	StoreStats::Snapshot before = store.stats().Read();
	auto t0 = std::chrono::steady_clock::now();
	fn();
	auto t1 = std::chrono::steady_clock::now();
	StoreStats::Snapshot after = store.stats().Read();
	out.wall_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
	out.gets += after.get_count - before.get_count;
	out.bytes_read += after.bytes_read - before.bytes_read;
	out.puts += after.put_count - before.put_count;
	out.bytes_written += after.bytes_written - before.bytes_written;
}

std::string LocalArtifactPath(const std::string &cache_dir, const std::string &name) {
	return cache_dir + "/topology/" + name;
}

std::optional<Bytes> ReadLocalFile(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		return std::nullopt;
	}
	Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
	if (!in.good() && !in.eof()) {
		return std::nullopt;
	}
	return data;
}

void WriteLocalFile(const std::string &path, const Bytes &data) {
	std::filesystem::path p(path);
	std::error_code ec;
	std::filesystem::create_directories(p.parent_path(), ec);
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	out.write(reinterpret_cast<const char *>(data.data()), static_cast<std::streamsize>(data.size()));
	if (!out.good()) {
		throw LakeGraphError(ErrorKind::IoError, "cannot write local topology mirror " + path);
	}
}

} // namespace

VertexIdMapping::VertexIdMapping(const GraphSchema &schema, size_t shard_count)
	: shard_count_(std::max<size_t>(1, shard_count)) {
	for (const auto &v : schema.vertices) {
		TypeShards &ts = types_[v.type];
		ts.shards.reserve(shard_count_);
		for (size_t i = 0; i < shard_count_; i++) {
			ts.shards.push_back(std::make_unique<Shard>());
		}
	}
}

VertexIdMapping::Shard &VertexIdMapping::ShardFor(const std::string &type, const RawKey &key) const {
	auto it = types_.find(type);
	if (it == types_.end()) {
		throw LakeGraphError(ErrorKind::Internal, "unknown vertex type in id mapping: " + type);
	}
	size_t shard = RawKeyHash {}(key) % shard_count_;
	return *it->second.shards[shard];
}

bool VertexIdMapping::InsertBatch(const std::string &type, const std::vector<std::pair<RawKey, uint64_t>> &batch,
                                  RawKey *dup_key, uint64_t *existing, uint64_t *incoming) {
	// Group by shard first so each shard lock is taken once per batch.
	std::vector<std::vector<const std::pair<RawKey, uint64_t> *>> by_shard(shard_count_);
	for (const auto &item : batch) {
		by_shard[RawKeyHash {}(item.first) % shard_count_].push_back(&item);
	}
	auto it = types_.find(type);
	if (it == types_.end()) {
		throw LakeGraphError(ErrorKind::Internal, "unknown vertex type in id mapping: " + type);
	}
	for (size_t s = 0; s < shard_count_; s++) {
		if (by_shard[s].empty()) {
			continue;
		}
		Shard &shard = *it->second.shards[s];
		std::lock_guard<std::mutex> guard(shard.mu);
		for (const auto *item : by_shard[s]) {
			auto [pos, inserted] = shard.map.emplace(item->first, item->second);
			if (!inserted) {
				*dup_key = item->first;
				*existing = pos->second;
				*incoming = item->second;
				return false;
			}
		}
	}
	return true;
}

std::optional<uint64_t> VertexIdMapping::Lookup(const std::string &type, const RawKey &key) const {
	// Build and lookup phases never overlap, so reads take no lock.
	const Shard &shard = ShardFor(type, key);
	auto it = shard.map.find(key);
	if (it == shard.map.end()) {
		return std::nullopt;
	}
	return it->second;
}

uint64_t VertexIdMapping::entry_count() const {
	uint64_t n = 0;
	for (const auto &[type, ts] : types_) {
		for (const auto &shard : ts.shards) {
			n += shard->map.size();
		}
	}
	return n;
}

void VertexIdMapping::Release() {
	types_.clear();
	released_ = true;
}

uint64_t DanglingCounter::Assign(const std::string &type, const RawKey &key) {
	auto &per_type = by_type_[type];
	auto it = per_type.find(key);
	if (it == per_type.end()) {
		it = per_type.emplace(key, next_row_++).first;
	}
	return PackVertexId(0, it->second);
}

std::optional<uint64_t> DanglingCounter::Lookup(const std::string &type, const RawKey &key) const {
	auto t = by_type_.find(type);
	if (t == by_type_.end()) {
		return std::nullopt;
	}
	auto it = t->second.find(key);
	if (it == t->second.end()) {
		return std::nullopt;
	}
	return PackVertexId(0, it->second);
}

std::vector<uint64_t> DanglingCounter::TypedIds(const std::string &type) const {
	std::vector<uint64_t> ids;
	auto t = by_type_.find(type);
	if (t == by_type_.end()) {
		return ids;
	}
	ids.reserve(t->second.size());
	for (const auto &[key, row] : t->second) {
		ids.push_back(PackVertexId(0, row));
	}
	std::sort(ids.begin(), ids.end());
	return ids;
}

std::vector<std::string> DanglingCounter::Types() const {
	std::vector<std::string> types;
	for (const auto &[type, keys] : by_type_) {
		if (!keys.empty()) {
			types.push_back(type);
		}
	}
	return types;
}

Bytes DanglingCounter::Serialize(uint64_t version) const {
	Bytes out;
	ByteWriter w(out);
	w.raw(kDanglingMagic, 4);
	w.u64(version);
	w.u32(next_row_);
	w.u32(static_cast<uint32_t>(by_type_.size()));
	for (const auto &[type, keys] : by_type_) {
		w.str16(type);
		w.u64(keys.size());
		for (const auto &[key, row] : keys) {
			if (std::holds_alternative<int64_t>(key)) {
				w.u8(0);
				w.i64(std::get<int64_t>(key));
			} else {
				w.u8(1);
				w.str32(std::get<std::string>(key));
			}
			w.u32(row);
		}
	}
	w.raw(kDanglingMagic, 4);
	return out;
}

std::optional<DanglingCounter> DanglingCounter::Parse(const Bytes &data, uint64_t expected_version) {
	try {
		ByteReader r(data.data(), data.size());
		if (std::memcmp(r.Take(4), kDanglingMagic, 4) != 0) {
			return std::nullopt;
		}
		if (r.u64() != expected_version) {
			return std::nullopt;
		}
		DanglingCounter out;
		out.next_row_ = r.u32();
		uint32_t type_count = r.u32();
		for (uint32_t t = 0; t < type_count; t++) {
			std::string type = r.str16();
			uint64_t key_count = r.u64();
			auto &per_type = out.by_type_[type];
			for (uint64_t i = 0; i < key_count; i++) {
				uint8_t tag = r.u8();
				RawKey key;
				if (tag == 0) {
					key = r.i64();
				} else if (tag == 1) {
					key = r.str32();
				} else {
					return std::nullopt;
				}
				uint32_t row = r.u32();
				if (row >= out.next_row_) {
					return std::nullopt;
				}
				per_type.emplace(std::move(key), row);
			}
		}
		if (std::memcmp(r.Take(4), kDanglingMagic, 4) != 0 || !r.exhausted()) {
			return std::nullopt;
		}
		return out;
	} catch (const LakeGraphError &) {
		return std::nullopt;
	}
}

uint64_t TopologyArtifactVersion(uint64_t vertex_fingerprint, const std::string &token) {
	uint8_t fp[8];
	for (size_t i = 0; i < 8; i++) {
		fp[i] = static_cast<uint8_t>(vertex_fingerprint >> (8 * i));
	}
	return Fnv1a64(token.data(), token.size(), Fnv1a64(fp, sizeof(fp)));
}

Bytes SerializeEdgeList(const EdgeList &list, uint64_t version) {
	Bytes out;
	out.reserve(48 + list.entries.size() * 16 + list.portions.size() * 24);
	ByteWriter w(out);
	w.raw(kTopologyMagic, 4);
	w.u32(list.edge_file_id);
	w.u64(version);
	w.u64(list.entries.size());
	for (const auto &e : list.entries) {
		w.u64(e.src);
		w.u64(e.tgt);
	}
	w.u32(static_cast<uint32_t>(list.portions.size()));
	for (const auto &p : list.portions) {
		w.u32(p.group_start);
		w.u32(p.group_end);
		w.u64(p.min_src);
		w.u64(p.max_src);
	}
	w.raw(kTopologyMagic, 4);
	return out;
}

std::optional<EdgeList> ParseEdgeList(const Bytes &data, uint32_t expected_file_id, uint64_t expected_version,
                                      uint64_t expected_rows) {
	try {
		ByteReader r(data.data(), data.size());
		if (std::memcmp(r.Take(4), kTopologyMagic, 4) != 0) {
			return std::nullopt;
		}
		EdgeList list;
		list.edge_file_id = r.u32();
		if (list.edge_file_id != expected_file_id) {
			return std::nullopt;
		}
		if (r.u64() != expected_version) {
			return std::nullopt;
		}
		uint64_t entry_count = r.u64();
		if (entry_count != expected_rows || r.remaining() < entry_count * 16) {
			return std::nullopt;
		}
		list.entries.resize(entry_count);
		for (auto &e : list.entries) {
			e.src = r.u64();
			e.tgt = r.u64();
		}
		uint32_t portion_count = r.u32();
		if (r.remaining() < static_cast<uint64_t>(portion_count) * 24) {
			return std::nullopt;
		}
		list.portions.resize(portion_count);
		for (auto &p : list.portions) {
			p.group_start = r.u32();
			p.group_end = r.u32();
			p.min_src = r.u64();
			p.max_src = r.u64();
		}
		if (std::memcmp(r.Take(4), kTopologyMagic, 4) != 0 || !r.exhausted()) {
			return std::nullopt;
		}
		return list;
	} catch (const LakeGraphError &) {
		return std::nullopt;
	}
}

std::vector<const EdgeList *> Topology::ListsOfType(const std::string &edge_type) const {
	std::vector<const EdgeList *> out;
	for (const auto &[id, list] : lists) {
		if (list.edge_type == edge_type) {
			out.push_back(&list);
		}
	}
	return out;
}

uint64_t Topology::TotalEntries() const {
	uint64_t n = 0;
	for (const auto &[id, list] : lists) {
		n += list.entries.size();
	}
	return n;
}

std::string StartupReport::ToCsv() const {
	std::ostringstream out;
	out << "phase,wall_ms,gets,bytes_read,puts,bytes_written\n";
	auto row = [&](const char *name, const PhaseIo &p) {
		out << name << "," << p.wall_ms << "," << p.gets << "," << p.bytes_read << "," << p.puts << ","
		    << p.bytes_written << "\n";
	};
	row("connect", connect);
	row("idmBuild", idm_build);
	row("edgeListBuild", edge_build);
	row("persist", persist);
	out << "listsLoaded," << lists_loaded << ",,,,\n";
	out << "listsBuilt," << lists_built << ",,,,\n";
	out << "idmEntries," << idm_entries << ",,,,\n";
	out << "danglingCount," << dangling_count << ",,,,\n";
	return out.str();
}

namespace {

// Reads footers for the given files in parallel and validates row counts
// against the registry.
std::map<uint32_t, TableMeta> ReadFooters(ObjectStore &store, const std::vector<const FileEntry *> &files,
                                          size_t parallelism) {
	std::map<uint32_t, TableMeta> metas;
	for (const auto *f : files) {
		metas[f->file_id] = TableMeta {};
	}
	ThreadPool pool(std::min(parallelism, std::max<size_t>(1, files.size())));
	std::mutex mu;
	pool.RunAll(files.size(), [&](size_t i) {
		TableMeta meta = ReadFooter(store, files[i]->path);
		CheckRowCount(*files[i], meta);
		std::lock_guard<std::mutex> guard(mu);
		metas[files[i]->file_id] = std::move(meta);
	});
	return metas;
}

VertexIdMapping BuildVertexIdm(ObjectStore &store, const Catalog &catalog, size_t parallelism,
                               size_t pipeline_depth) {
	VertexIdMapping idm(catalog.schema, 4 * parallelism);
	auto files = catalog.registry.FilesOfKind(FileKind::Vertex);
	if (files.empty()) {
		return idm;
	}
	auto metas = ReadFooters(store, files, parallelism);

	std::vector<FetchTask> tasks;
	std::map<uint32_t, std::vector<uint64_t>> offsets;
	std::map<uint32_t, const VertexTypeDef *> defs;
	for (const auto *f : files) {
		const TableMeta &meta = metas[f->file_id];
		const VertexTypeDef *def = catalog.schema.FindVertexByTable(f->table);
		int key_col = -1;
		CheckKeyColumn(*f, meta, def->key, &key_col);
		offsets[f->file_id] = meta.RowOffsets();
		defs[f->file_id] = def;
		for (uint32_t g = 0; g < meta.row_groups.size(); g++) {
			tasks.push_back({f, &meta, g, key_col, -1, 0});
		}
	}

	RunChunkPipeline(store, tasks, pipeline_depth, parallelism, [&](FetchDone &item) {
		const FetchTask &task = item.task;
		const RowGroupMeta &group = task.meta->row_groups[task.group];
		const ColumnChunkMeta &chunk = group.columns[task.column];
		ColumnKind kind = task.meta->schema.columns[task.column].kind;
		ColumnVector col = DecodeChunk(item.bytes.data(), item.bytes.size(), kind, chunk.encoding, group.row_count);
		uint64_t base = offsets[task.entry->file_id][task.group];
		const std::string &type = defs[task.entry->file_id]->type;

		std::vector<std::pair<RawKey, uint64_t>> batch;
		batch.reserve(std::min<uint64_t>(group.row_count, kIdmInsertBatch));
		for (uint64_t i = 0; i < group.row_count; i++) {
			batch.emplace_back(KeyAt(col, i),
			                   PackVertexId(task.entry->file_id, static_cast<uint32_t>(base + i)));
			if (batch.size() == kIdmInsertBatch || i + 1 == group.row_count) {
				RawKey dup;
				uint64_t existing = 0;
				uint64_t incoming = 0;
				if (!idm.InsertBatch(type, batch, &dup, &existing, &incoming)) {
					const FileEntry &a = catalog.registry.Require(VertexFileId(existing));
					const FileEntry &b = catalog.registry.Require(VertexFileId(incoming));
					throw LakeGraphError(ErrorKind::ContractViolation,
					                     "duplicate key " + FormatRawKey(dup) + " in vertex type " + type + ": " +
					                     a.path + " row " + std::to_string(VertexRowIndex(existing)) + " and " +
					                     b.path + " row " + std::to_string(VertexRowIndex(incoming)));
				}
				batch.clear();
			}
		}
	});
	return idm;
}

// Unresolved foreign key occurrences of one chunk, kept until the
// deterministic allocation pass.
struct PendingDangling {
	std::vector<std::pair<uint32_t, RawKey>> rows; // (absolute row, raw key)
};

void BuildEdgeLists(ObjectStore &store, const Catalog &catalog, const VertexIdMapping &idm,
                    DanglingCounter &dangling, const std::vector<const FileEntry *> &files,
                    std::map<uint32_t, EdgeList> &out, size_t parallelism, size_t pipeline_depth) {
	if (files.empty()) {
		return;
	}
	auto metas = ReadFooters(store, files, parallelism);

	std::vector<FetchTask> tasks;
	std::map<uint32_t, std::vector<uint64_t>> offsets;
	std::map<uint32_t, const EdgeTypeDef *> defs;
	// slot -> pending danglings for one (file, group, side) chunk; slots are
	// preallocated so workers write without coordination.
	std::vector<PendingDangling> pending;

	for (const auto *f : files) {
		const TableMeta &meta = metas[f->file_id];
		const EdgeTypeDef *def = catalog.schema.FindEdgeByTable(f->table);
		int src_col = -1;
		int tgt_col = -1;
		CheckKeyColumn(*f, meta, def->src_key, &src_col);
		CheckKeyColumn(*f, meta, def->tgt_key, &tgt_col);
		offsets[f->file_id] = meta.RowOffsets();
		defs[f->file_id] = def;
		EdgeList &list = out[f->file_id];
		list.edge_file_id = f->file_id;
		list.edge_type = def->type;
		list.entries.assign(f->row_count, EdgeEntry {});
		for (uint32_t g = 0; g < meta.row_groups.size(); g++) {
			tasks.push_back({f, &meta, g, src_col, 0, pending.size()});
			pending.emplace_back();
			tasks.push_back({f, &meta, g, tgt_col, 1, pending.size()});
			pending.emplace_back();
		}
	}

	RunChunkPipeline(store, tasks, pipeline_depth, parallelism, [&](FetchDone &item) {
		const FetchTask &task = item.task;
		const RowGroupMeta &group = task.meta->row_groups[task.group];
		const ColumnChunkMeta &chunk = group.columns[task.column];
		ColumnKind kind = task.meta->schema.columns[task.column].kind;
		ColumnVector col = DecodeChunk(item.bytes.data(), item.bytes.size(), kind, chunk.encoding, group.row_count);
		uint64_t base = offsets[task.entry->file_id][task.group];
		const EdgeTypeDef *def = defs[task.entry->file_id];
		const std::string &endpoint_type = task.side == 0 ? def->src_type : def->tgt_type;
		EdgeList &list = out[task.entry->file_id];

		for (uint64_t i = 0; i < group.row_count; i++) {
			RawKey key = KeyAt(col, i);
			uint32_t row = static_cast<uint32_t>(base + i);
			if (auto id = idm.Lookup(endpoint_type, key)) {
				if (task.side == 0) {
					list.entries[row].src = *id;
				} else {
					list.entries[row].tgt = *id;
				}
			} else {
				pending[task.slot].rows.emplace_back(row, std::move(key));
			}
		}
	});

	// Allocate dangling ids in deterministic order: file id ascending, then
	// row, then src before tgt. Task layout above already interleaves
	// (group, src), (group, tgt) per file in order, and rows within one
	// chunk were appended ascending, so walking tasks pairwise visits each
	// row's src before its tgt.
	for (const auto *f : files) {
		std::vector<size_t> file_slots;
		for (size_t t = 0; t < tasks.size(); t++) {
			if (tasks[t].entry == f) {
				file_slots.push_back(tasks[t].slot);
			}
		}
		// Merge src/tgt slot streams per group so allocation follows
		// (row, side) order even though slots are per column.
		EdgeList &list = out[f->file_id];
		const EdgeTypeDef *def = defs[f->file_id];
		for (size_t i = 0; i + 1 < file_slots.size(); i += 2) {
			const auto &src_rows = pending[file_slots[i]].rows;
			const auto &tgt_rows = pending[file_slots[i + 1]].rows;
			size_t si = 0;
			size_t ti = 0;
			while (si < src_rows.size() || ti < tgt_rows.size()) {
				bool take_src = ti >= tgt_rows.size() ||
				                (si < src_rows.size() && src_rows[si].first <= tgt_rows[ti].first);
				if (take_src) {
					list.entries[src_rows[si].first].src = dangling.Assign(def->src_type, src_rows[si].second);
					si++;
				} else {
					list.entries[tgt_rows[ti].first].tgt = dangling.Assign(def->tgt_type, tgt_rows[ti].second);
					ti++;
				}
			}
		}
	}

	// Portion statistics per row group.
	ThreadPool pool(parallelism);
	for (const auto *f : files) {
		EdgeList &list = out[f->file_id];
		const auto &offs = offsets[f->file_id];
		size_t groups = metas[f->file_id].row_groups.size();
		list.portions.assign(groups, EdgePortion {});
		pool.RunAll(groups, [&](size_t g) {
			uint64_t lo = UINT64_MAX;
			uint64_t hi = 0;
			for (uint64_t i = offs[g]; i < offs[g + 1]; i++) {
				lo = std::min(lo, list.entries[i].src);
				hi = std::max(hi, list.entries[i].src);
			}
			list.portions[g] = {static_cast<uint32_t>(g), static_cast<uint32_t>(g + 1), lo, hi};
		});
	}
}

// Attempts to load one persisted edge list, preferring the local mirror.
// Returns true and fills *list on success; mirrors store copies locally.
bool LoadMaterializedList(ObjectStore &store, const StartupOptions &opts, const FileEntry &entry,
                          uint64_t version, EdgeList *list) {
	std::string name = std::to_string(entry.file_id) + ".lgt";
	if (!opts.cache_dir.empty()) {
		if (auto local = ReadLocalFile(LocalArtifactPath(opts.cache_dir, name))) {
			if (auto parsed = ParseEdgeList(*local, entry.file_id, version, entry.row_count)) {
				*list = std::move(*parsed);
				return true;
			}
		}
	}
	std::string store_path = TopologyStorePath(entry.file_id);
	if (store.Exists(store_path)) {
		Bytes raw = store.GetAll(store_path);
		if (auto parsed = ParseEdgeList(raw, entry.file_id, version, entry.row_count)) {
			*list = std::move(*parsed);
			if (!opts.cache_dir.empty()) {
				WriteLocalFile(LocalArtifactPath(opts.cache_dir, name), raw);
			}
			return true;
		}
	}
	return false;
}

std::optional<DanglingCounter> LoadDanglingRegistry(ObjectStore &store, const StartupOptions &opts,
                                                    uint64_t version) {
	if (!opts.cache_dir.empty()) {
		if (auto local = ReadLocalFile(LocalArtifactPath(opts.cache_dir, "dangling.lgd"))) {
			if (auto parsed = DanglingCounter::Parse(*local, version)) {
				return parsed;
			}
		}
	}
	if (store.Exists(kDanglingStorePath)) {
		Bytes raw = store.GetAll(kDanglingStorePath);
		if (auto parsed = DanglingCounter::Parse(raw, version)) {
			if (!opts.cache_dir.empty()) {
				WriteLocalFile(LocalArtifactPath(opts.cache_dir, "dangling.lgd"), raw);
			}
			return parsed;
		}
	}
	return std::nullopt;
}

bool ReferencesDangling(const EdgeList &list) {
	for (const auto &e : list.entries) {
		if (VertexFileId(e.src) == 0 || VertexFileId(e.tgt) == 0) {
			return true;
		}
	}
	return false;
}

// Brings topology in sync with the catalog: reuse in-memory lists where
// valid, load persisted artifacts where possible, rebuild the rest.
void EnsureTopology(ObjectStore &store, const Catalog &catalog, Topology &topology, const StartupOptions &opts,
                    StartupReport &report) {
	size_t parallelism = ResolveParallelism(opts.parallelism);
	uint64_t fp = catalog.registry.VertexSpaceFingerprint();

	if (topology.vertex_fingerprint != fp) {
		topology.lists.clear();
		topology.dangling = DanglingCounter {};
		topology.vertex_fingerprint = fp;
	}
	// Drop lists of retired files.
	for (auto it = topology.lists.begin(); it != topology.lists.end();) {
		if (!catalog.registry.Find(it->first)) {
			it = topology.lists.erase(it);
		} else {
			++it;
		}
	}

	auto edge_files = catalog.registry.FilesOfKind(FileKind::Edge);
	std::vector<const FileEntry *> to_build;
	bool dangling_loaded = false;

	MeasurePhase(store, report.edge_build, [&] {
		std::vector<const FileEntry *> missing;
		for (const auto *f : edge_files) {
			if (!topology.lists.count(f->file_id)) {
				missing.push_back(f);
			}
		}
		uint64_t dangling_version = TopologyArtifactVersion(fp, "::dangling");
		if (topology.lists.empty() && topology.dangling.total() == 0) {
			if (auto loaded = LoadDanglingRegistry(store, opts, dangling_version)) {
				topology.dangling = std::move(*loaded);
				dangling_loaded = true;
			}
		} else {
			dangling_loaded = true; // in-memory state is authoritative
		}
		for (const auto *f : missing) {
			EdgeList list;
			uint64_t version = TopologyArtifactVersion(fp, f->path);
			if (LoadMaterializedList(store, opts, *f, version, &list)) {
				list.edge_type = catalog.schema.FindEdgeByTable(f->table)->type;
				// A list that references dangling ids is only usable when the
				// dangling registry survived; otherwise ids could collide
				// with fresh assignments.
				if (!dangling_loaded && ReferencesDangling(list)) {
					to_build.push_back(f);
				} else {
					topology.lists.emplace(f->file_id, std::move(list));
					report.lists_loaded++;
				}
			} else {
				to_build.push_back(f);
			}
		}
	});

	if (!to_build.empty()) {
		std::optional<VertexIdMapping> idm;
		MeasurePhase(store, report.idm_build, [&] {
			idm = BuildVertexIdm(store, catalog, parallelism, opts.pipeline_depth);
			report.idm_entries = idm->entry_count();
		});
		MeasurePhase(store, report.edge_build, [&] {
			BuildEdgeLists(store, catalog, *idm, topology.dangling, to_build, topology.lists, parallelism,
			               opts.pipeline_depth);
			report.lists_built = to_build.size();
			idm->Release();
		});
	}

	report.dangling_count = topology.dangling.total();

	if (opts.materialize && !to_build.empty()) {
		MeasurePhase(store, report.persist, [&] {
			for (const auto *f : to_build) {
				const EdgeList &list = topology.lists.at(f->file_id);
				Bytes data = SerializeEdgeList(list, TopologyArtifactVersion(fp, f->path));
				store.Put(TopologyStorePath(f->file_id), data);
				if (!opts.cache_dir.empty()) {
					WriteLocalFile(LocalArtifactPath(opts.cache_dir, std::to_string(f->file_id) + ".lgt"), data);
				}
			}
			Bytes dangling_data = topology.dangling.Serialize(TopologyArtifactVersion(fp, "::dangling"));
			store.Put(kDanglingStorePath, dangling_data);
			if (!opts.cache_dir.empty()) {
				WriteLocalFile(LocalArtifactPath(opts.cache_dir, "dangling.lgd"), dangling_data);
			}
		});
	}
}

} // namespace

StartupResult StartupLoad(ObjectStore &store, const std::string &schema_path, const StartupOptions &opts) {
	StartupResult result;
	MeasurePhase(store, result.report.connect, [&] {
		result.catalog = Catalog::Load(store, schema_path);
		if (!result.catalog.loaded_from_persisted_registry) {
			// File ids must survive restarts or persisted topology would
			// never validate again.
			result.catalog.PersistRegistry(store);
		}
	});
	EnsureTopology(store, result.catalog, result.topology, opts, result.report);
	return result;
}

StartupReport RefreshTopology(ObjectStore &store, Catalog &catalog, Topology &topology,
                              const StartupOptions &opts) {
	StartupReport report;
	MeasurePhase(store, report.connect, [&] {
		ManifestDiff diff = catalog.DiffManifests(store);
		if (!diff.Empty()) {
			catalog.ApplyDiff(diff);
			catalog.PersistRegistry(store);
		}
	});
	EnsureTopology(store, catalog, topology, opts, report);
	return report;
}

} // namespace lakegraph
