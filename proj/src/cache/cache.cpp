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

#include "cache/cache.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "common/error.hpp"

namespace lakegraph {

namespace {

constexpr char kImageMagic[4] = {'L', 'G', 'V', 'C'};

std::optional<Bytes> ReadWholeFile(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		return std::nullopt;
	}
	in.seekg(0, std::ios::end);
	auto len = in.tellg();
	if (len < 0) {
		return std::nullopt;
	}
	Bytes out(static_cast<size_t>(len));
	in.seekg(0);
	in.read(reinterpret_cast<char *>(out.data()), static_cast<std::streamsize>(out.size()));
	if (!in) {
		return std::nullopt;
	}
	return out;
}

void WriteWholeFile(const std::string &path, const Bytes &data) {
	std::filesystem::path p(path);
	std::error_code ec;
	std::filesystem::create_directories(p.parent_path(), ec);
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out) {
		throw LakeGraphError(ErrorKind::IoError, "cannot write cache file " + path);
	}
	out.write(reinterpret_cast<const char *>(data.data()), static_cast<std::streamsize>(data.size()));
	if (!out) {
		throw LakeGraphError(ErrorKind::IoError, "short write to cache file " + path);
	}
}

void RemoveFileQuiet(const std::string &path) {
	std::error_code ec;
	std::filesystem::remove(path, ec);
}

uint32_t ClockPriority(bool is_vertex) {
	return is_vertex ? 3 : 1;
}

} // namespace

//===----------------------------------------------------------------------===//
// FileMetaCache
//===----------------------------------------------------------------------===//

const TableMeta &FileMetaCache::Get(uint32_t file_id) {
	std::lock_guard<std::mutex> lk(mu_);
	auto it = metas_.find(file_id);
	if (it != metas_.end()) {
		return *it->second;
	}
	const FileEntry &entry = registry_->Require(file_id);
	auto meta = std::make_unique<TableMeta>(ReadFooter(store_, entry.path));
	auto [pos, _] = metas_.emplace(file_id, std::move(meta));
	return *pos->second;
}

std::string FileMetaCache::PathOf(uint32_t file_id) const {
	std::lock_guard<std::mutex> lk(mu_);
	return registry_->Require(file_id).path;
}

FileKind FileMetaCache::KindOf(uint32_t file_id) const {
	std::lock_guard<std::mutex> lk(mu_);
	return registry_->Require(file_id).kind;
}

void FileMetaCache::Clear() {
	std::lock_guard<std::mutex> lk(mu_);
	metas_.clear();
}

void FileMetaCache::SetRegistry(const FileRegistry *registry) {
	std::lock_guard<std::mutex> lk(mu_);
	registry_ = registry;
}

//===----------------------------------------------------------------------===//
// VertexCacheUnit
//===----------------------------------------------------------------------===//

VertexCacheUnit::VertexCacheUnit(CacheKey key, ColumnKind kind, Encoding encoding, uint32_t row_count)
	: key_(std::move(key)), kind_(kind), encoding_(encoding), row_count_(row_count) {}

void VertexCacheUnit::AllocateArrays() {
	switch (kind_) {
	case ColumnKind::INT64:
	case ColumnKind::DATE32:
		ints_ = std::make_unique<int64_t[]>(row_count_);
		break;
	case ColumnKind::FLOAT64:
		doubles_ = std::make_unique<double[]>(row_count_);
		break;
	case ColumnKind::BOOL:
		bools_ = std::make_unique<uint8_t[]>(row_count_);
		break;
	case ColumnKind::STRING:
		str_slots_ = std::make_unique<StrSlot[]>(row_count_);
		break;
	}
}

uint64_t VertexCacheUnit::CurrentFootprint() const {
	uint64_t n = encoded_.size();
	bool allocated = ints_ || doubles_ || bools_ || str_slots_;
	if (allocated) {
		switch (kind_) {
		case ColumnKind::INT64:
		case ColumnKind::DATE32:
			n += static_cast<uint64_t>(row_count_) * sizeof(int64_t);
			break;
		case ColumnKind::FLOAT64:
			n += static_cast<uint64_t>(row_count_) * sizeof(double);
			break;
		case ColumnKind::BOOL:
			n += row_count_;
			break;
		case ColumnKind::STRING:
			n += static_cast<uint64_t>(row_count_) * sizeof(StrSlot);
			break;
		}
	}
	for (const auto &block : arenas_) {
		n += block.size();
	}
	return n;
}

void VertexCacheUnit::EnsureTill(uint32_t row) {
	if (row >= row_count_) {
		throw LakeGraphError(ErrorKind::InvalidArgument,
		                     "row " + std::to_string(row) + " out of range for chunk of " +
		                         std::to_string(row_count_) + " rows");
	}
	if (prefix_.load(std::memory_order_acquire) > row) {
		return;
	}
	std::lock_guard<std::mutex> lk(decode_mu_);
	uint32_t p = prefix_.load(std::memory_order_relaxed);
	if (row < p) {
		return;
	}
	auto charge = [&](int64_t delta) {
		if (manager_ != nullptr && delta != 0) {
			manager_->ChargeDelta(delta);
		}
		footprint_.fetch_add(static_cast<uint64_t>(delta));
	};
	if (!decoder_) {
		if (encoded_.empty()) {
			Bytes fetched = manager_->FetchEncodedByKey(key_);
			charge(static_cast<int64_t>(fetched.size()));
			encoded_ = std::move(fetched);
		}
		decoder_ = std::make_unique<ChunkDecoder>(encoded_.data(), encoded_.size(), kind_, encoding_, row_count_);
		if (p > 0) {
			decoder_->Skip(p);
		}
	}
	bool allocated = ints_ || doubles_ || bools_ || str_slots_;
	if (!allocated) {
		uint64_t before = CurrentFootprint();
		AllocateArrays();
		charge(static_cast<int64_t>(CurrentFootprint() - before));
	}
	uint32_t n = row + 1 - p;
	ColumnVector scratch(kind_);
	scratch.Reserve(n);
	try {
		decoder_->Decode(n, scratch);
	} catch (...) {
		decoder_.reset();
		throw;
	}
	switch (kind_) {
	case ColumnKind::INT64:
	case ColumnKind::DATE32:
		std::memcpy(ints_.get() + p, scratch.ints.data(), n * sizeof(int64_t));
		break;
	case ColumnKind::FLOAT64:
		std::memcpy(doubles_.get() + p, scratch.doubles.data(), n * sizeof(double));
		break;
	case ColumnKind::BOOL:
		std::memcpy(bools_.get() + p, scratch.bools.data(), n);
		break;
	case ColumnKind::STRING: {
		size_t total = 0;
		for (const auto &s : scratch.strings) {
			total += s.size();
		}
		Bytes block;
		block.reserve(total);
		for (uint32_t i = 0; i < n; i++) {
			const std::string &s = scratch.strings[i];
			str_slots_[p + i].offset_in_block = static_cast<uint32_t>(block.size());
			str_slots_[p + i].length = static_cast<uint32_t>(s.size());
			block.insert(block.end(), s.begin(), s.end());
		}
		charge(static_cast<int64_t>(block.size()));
		arenas_.push_back(std::move(block));
		const Bytes &stable = arenas_.back();
		for (uint32_t i = 0; i < n; i++) {
			str_slots_[p + i].ptr = reinterpret_cast<const char *>(stable.data()) + str_slots_[p + i].offset_in_block;
		}
		break;
	}
	}
	decode_calls_.fetch_add(1);
	decoded_values_.fetch_add(n);
	if (manager_ != nullptr) {
		manager_->RecordDecoded(key_, n);
	}
	if (p + n == row_count_) {
		charge(-static_cast<int64_t>(encoded_.size()));
		encoded_ = Bytes {};
		encoded_.shrink_to_fit();
		decoder_.reset();
	}
	prefix_.store(p + n, std::memory_order_release);
}

Value VertexCacheUnit::NaiveValueAt(uint32_t row) {
	if (row >= row_count_) {
		throw LakeGraphError(ErrorKind::InvalidArgument, "row out of range");
	}
	std::lock_guard<std::mutex> lk(decode_mu_);
	if (encoded_.empty()) {
		Bytes fetched = manager_->FetchEncodedByKey(key_);
		if (manager_ != nullptr) {
			manager_->ChargeDelta(static_cast<int64_t>(fetched.size()));
		}
		footprint_.fetch_add(fetched.size());
		encoded_ = std::move(fetched);
	}
	ChunkDecoder dec(encoded_.data(), encoded_.size(), kind_, encoding_, row_count_);
	ColumnVector scratch(kind_);
	scratch.Reserve(row + 1);
	dec.Decode(row + 1, scratch);
	decode_calls_.fetch_add(1);
	decoded_values_.fetch_add(row + 1);
	if (manager_ != nullptr) {
		manager_->RecordDecoded(key_, row + 1);
	}
	return scratch.At(row);
}

int64_t VertexCacheUnit::Int64At(uint32_t row) {
	if (naive_) {
		return std::get<int64_t>(NaiveValueAt(row));
	}
	EnsureTill(row);
	return ints_[row];
}

double VertexCacheUnit::DoubleAt(uint32_t row) {
	if (naive_) {
		return std::get<double>(NaiveValueAt(row));
	}
	EnsureTill(row);
	return doubles_[row];
}

bool VertexCacheUnit::BoolAt(uint32_t row) {
	if (naive_) {
		return std::get<bool>(NaiveValueAt(row));
	}
	EnsureTill(row);
	return bools_[row] != 0;
}

std::string_view VertexCacheUnit::StringAt(uint32_t row) {
	if (naive_) {
		throw LakeGraphError(ErrorKind::Unsupported, "string views unavailable in naive mode");
	}
	EnsureTill(row);
	const StrSlot &slot = str_slots_[row];
	return {slot.ptr, slot.length};
}

Value VertexCacheUnit::ValueAt(uint32_t row) {
	if (naive_) {
		return NaiveValueAt(row);
	}
	switch (kind_) {
	case ColumnKind::INT64:
	case ColumnKind::DATE32:
		return Int64At(row);
	case ColumnKind::FLOAT64:
		return DoubleAt(row);
	case ColumnKind::BOOL:
		return BoolAt(row);
	case ColumnKind::STRING:
		return std::string(StringAt(row));
	}
	throw LakeGraphError(ErrorKind::Internal, "unreachable column kind");
}

//===----------------------------------------------------------------------===//
// VertexHandle
//===----------------------------------------------------------------------===//

VertexHandle::VertexHandle(std::shared_ptr<VertexCacheUnit> unit, CacheManager *mgr)
	: unit_(std::move(unit)), mgr_(mgr) {}

VertexHandle::~VertexHandle() {
	if (unit_ && mgr_) {
		mgr_->Unpin(unit_.get());
	}
}

VertexHandle::VertexHandle(VertexHandle &&o) noexcept : unit_(std::move(o.unit_)), mgr_(o.mgr_) {
	o.unit_.reset();
	o.mgr_ = nullptr;
}

VertexHandle &VertexHandle::operator=(VertexHandle &&o) noexcept {
	if (this != &o) {
		if (unit_ && mgr_) {
			mgr_->Unpin(unit_.get());
		}
		unit_ = std::move(o.unit_);
		mgr_ = o.mgr_;
		o.unit_.reset();
		o.mgr_ = nullptr;
	}
	return *this;
}

//===----------------------------------------------------------------------===//
// EdgeReader
//===----------------------------------------------------------------------===//

EdgeReader::~EdgeReader() {
	if (unit_ && mgr_) {
		mgr_->UnpinEdge(unit_.get());
	}
}

void EdgeReader::Advance(uint32_t row) {
	if (row >= unit_->row_count_) {
		throw LakeGraphError(ErrorKind::InvalidArgument, "row out of range for edge chunk");
	}
	uint32_t target_start = row / window_size_ * window_size_;
	if (!decoder_) {
		decoder_ = std::make_unique<ChunkDecoder>(unit_->encoded_.data(), unit_->encoded_.size(), unit_->kind_,
		                                          unit_->encoding_, unit_->row_count_);
		decoder_pos_ = 0;
	}
	if (target_start > decoder_pos_) {
		decoder_->Skip(target_start - decoder_pos_);
		decoder_pos_ = target_start;
	}
	uint32_t n = std::min<uint32_t>(window_size_, unit_->row_count_ - target_start);
	window_.Clear();
	window_.kind = unit_->kind_;
	window_.Reserve(n);
	decoder_->Decode(n, window_);
	decoder_pos_ = target_start + n;
	window_start_ = target_start;
	window_end_ = target_start + n;
	decode_batches_++;
}

Value EdgeReader::Read(uint32_t row) {
	if (decoded_unit_) {
		return decoded_unit_->ValueAt(row);
	}
	if (!unit_) {
		throw LakeGraphError(ErrorKind::Internal, "edge reader not initialized");
	}
	if (row < window_start_ && window_end_ > 0) {
		throw LakeGraphError(ErrorKind::ContractViolation,
		                     "backward edge scan: row " + std::to_string(row) + " precedes window start " +
		                         std::to_string(window_start_));
	}
	if (row >= window_end_) {
		Advance(row);
	}
	return window_.At(row - window_start_);
}

int64_t EdgeReader::ReadInt64(uint32_t row) {
	if (decoded_unit_) {
		return decoded_unit_->Int64At(row);
	}
	if (!unit_) {
		throw LakeGraphError(ErrorKind::Internal, "edge reader not initialized");
	}
	if (row < window_start_ && window_end_ > 0) {
		throw LakeGraphError(ErrorKind::ContractViolation,
		                     "backward edge scan: row " + std::to_string(row) + " precedes window start " +
		                         std::to_string(window_start_));
	}
	if (row >= window_end_) {
		Advance(row);
	}
	return window_.ints[row - window_start_];
}

std::string_view EdgeReader::ReadString(uint32_t row) {
	if (decoded_unit_) {
		return decoded_unit_->StringAt(row);
	}
	if (!unit_) {
		throw LakeGraphError(ErrorKind::Internal, "edge reader not initialized");
	}
	if (row < window_start_ && window_end_ > 0) {
		throw LakeGraphError(ErrorKind::ContractViolation,
		                     "backward edge scan: row " + std::to_string(row) + " precedes window start " +
		                         std::to_string(window_start_));
	}
	if (row >= window_end_) {
		Advance(row);
	}
	return window_.strings[row - window_start_];
}

//===----------------------------------------------------------------------===//
// CacheManager
//===----------------------------------------------------------------------===//

CacheManager::CacheManager(ObjectStore &store, FileMetaCache &metas, CacheConfig cfg)
	: store_(store), metas_(metas), cfg_(std::move(cfg)) {
	if (!cfg_.disk_dir.empty()) {
		std::error_code ec;
		std::filesystem::create_directories(cfg_.disk_dir, ec);
	}
	if (cfg_.prefetch_enabled && cfg_.prefetch_threads > 0) {
		for (size_t i = 0; i < cfg_.prefetch_threads; i++) {
			prefetch_pool_.emplace_back([this] { PrefetchWorker(); });
		}
	}
}

CacheManager::~CacheManager() {
	{
		std::lock_guard<std::mutex> lk(prefetch_mu_);
		shutdown_ = true;
	}
	prefetch_cv_.notify_all();
	for (auto &t : prefetch_pool_) {
		t.join();
	}
}

CacheManager::ChunkInfo CacheManager::ResolveChunk(const CacheKey &key) {
	const TableMeta &meta = metas_.Get(key.file_id);
	std::string path = metas_.PathOf(key.file_id);
	int col = meta.schema.Find(key.column);
	if (col < 0) {
		throw LakeGraphError(ErrorKind::NotFound,
		                     "column '" + key.column + "' missing from file " + path);
	}
	if (key.group >= meta.row_groups.size()) {
		throw LakeGraphError(ErrorKind::InvalidArgument,
		                     "row group " + std::to_string(key.group) + " out of range for " + path);
	}
	const RowGroupMeta &g = meta.row_groups[key.group];
	ChunkInfo info;
	info.kind = meta.schema.columns[static_cast<size_t>(col)].kind;
	info.encoding = g.columns[static_cast<size_t>(col)].encoding;
	info.row_count = static_cast<uint32_t>(g.row_count);
	info.chunk = g.columns[static_cast<size_t>(col)];
	info.path = std::move(path);
	return info;
}

Bytes CacheManager::FetchEncoded(const CacheKey &key, const ChunkInfo &info) {
	(void)key;
	Bytes b = ReadColumnChunkBytes(store_, info.path, info.chunk);
	stats_store_fetches_.fetch_add(1);
	return b;
}

Bytes CacheManager::FetchEncodedByKey(const CacheKey &key) {
	return FetchEncoded(key, ResolveChunk(key));
}

std::shared_ptr<VertexCacheUnit> CacheManager::AcquireVertexUnit(const CacheKey &key) {
	{
		std::unique_lock<std::mutex> lk(mu_);
		for (;;) {
			auto it = by_key_.find(key);
			if (it != by_key_.end()) {
				ClockEntry *e = it->second;
				if (!e->vertex) {
					throw LakeGraphError(ErrorKind::ContractViolation,
					                     "chunk is resident as an edge unit: " + key.column);
				}
				e->usage = ClockPriority(true);
				e->vertex->pins_.fetch_add(1);
				stats_memory_hits_.fetch_add(1);
				return e->vertex;
			}
			if (inflight_.count(key) == 0) {
				inflight_.insert(key);
				break;
			}
			inflight_cv_.wait(lk);
		}
	}
	std::shared_ptr<VertexCacheUnit> unit;
	bool from_disk = false;
	try {
		ChunkInfo info = ResolveChunk(key);
		unit = TryReloadImage(key, info);
		if (unit) {
			from_disk = true;
		} else {
			Bytes encoded = FetchEncoded(key, info);
			unit = std::make_shared<VertexCacheUnit>(key, info.kind, info.encoding, info.row_count);
			unit->encoded_ = std::move(encoded);
		}
		unit->manager_ = this;
		unit->naive_ = cfg_.naive_vertex;
		unit->footprint_.store(unit->CurrentFootprint());
	} catch (...) {
		std::lock_guard<std::mutex> lk(mu_);
		inflight_.erase(key);
		inflight_cv_.notify_all();
		throw;
	}
	std::lock_guard<std::mutex> lk(mu_);
	inflight_.erase(key);
	inflight_cv_.notify_all();
	unit->pins_.fetch_add(1);
	ClockEntry entry;
	entry.key = key;
	entry.is_vertex = true;
	entry.usage = ClockPriority(true);
	entry.vertex = unit;
	try {
		AdmitLocked(std::move(entry));
	} catch (...) {
		unit->pins_.fetch_sub(1);
		throw;
	}
	if (from_disk) {
		stats_disk_hits_.fetch_add(1);
	}
	return unit;
}

std::shared_ptr<EdgeCacheUnit> CacheManager::AcquireEdgeUnit(const CacheKey &key) {
	{
		std::unique_lock<std::mutex> lk(mu_);
		for (;;) {
			auto it = by_key_.find(key);
			if (it != by_key_.end()) {
				ClockEntry *e = it->second;
				if (!e->edge) {
					throw LakeGraphError(ErrorKind::ContractViolation,
					                     "chunk is resident as a vertex unit: " + key.column);
				}
				e->usage = ClockPriority(false);
				e->edge->pins_.fetch_add(1);
				stats_memory_hits_.fetch_add(1);
				return e->edge;
			}
			if (inflight_.count(key) == 0) {
				inflight_.insert(key);
				break;
			}
			inflight_cv_.wait(lk);
		}
	}
	std::shared_ptr<EdgeCacheUnit> unit;
	try {
		ChunkInfo info = ResolveChunk(key);
		std::optional<Bytes> raw = DiskReadRaw(key);
		bool from_disk = raw.has_value();
		if (!raw) {
			raw = FetchEncoded(key, info);
			std::lock_guard<std::mutex> lk(mu_);
			DiskInsertLocked(key, false, *raw);
		} else {
			stats_disk_hits_.fetch_add(1);
		}
		(void)from_disk;
		unit = std::make_shared<EdgeCacheUnit>(key, info.kind, info.encoding, info.row_count);
		unit->encoded_ = std::move(*raw);
	} catch (...) {
		std::lock_guard<std::mutex> lk(mu_);
		inflight_.erase(key);
		inflight_cv_.notify_all();
		throw;
	}
	std::lock_guard<std::mutex> lk(mu_);
	inflight_.erase(key);
	inflight_cv_.notify_all();
	unit->pins_.fetch_add(1);
	ClockEntry entry;
	entry.key = key;
	entry.is_vertex = false;
	entry.usage = ClockPriority(false);
	entry.edge = unit;
	try {
		AdmitLocked(std::move(entry));
	} catch (...) {
		unit->pins_.fetch_sub(1);
		throw;
	}
	return unit;
}

VertexHandle CacheManager::Vertex(uint32_t file_id, uint32_t group, const std::string &column) {
	CacheKey key {file_id, group, column};
	return {AcquireVertexUnit(key), this};
}

EdgeReader CacheManager::Edge(uint32_t file_id, uint32_t group, const std::string &column) {
	CacheKey key {file_id, group, column};
	EdgeReader reader;
	reader.mgr_ = this;
	reader.window_size_ = cfg_.edge_window == 0 ? 1 : cfg_.edge_window;
	if (cfg_.edge_decoded_array) {
		reader.decoded_unit_ = Vertex(file_id, group, column);
		return reader;
	}
	reader.unit_ = AcquireEdgeUnit(key);
	return reader;
}

void CacheManager::Unpin(VertexCacheUnit *unit) {
	unit->pins_.fetch_sub(1);
}

void CacheManager::UnpinEdge(EdgeCacheUnit *unit) {
	unit->pins_.fetch_sub(1);
}

void CacheManager::ChargeDelta(int64_t delta) {
	std::lock_guard<std::mutex> lk(mu_);
	if (delta >= 0) {
		EvictUntilFitsLocked(static_cast<uint64_t>(delta));
		memory_used_ += static_cast<uint64_t>(delta);
	} else {
		uint64_t dec = static_cast<uint64_t>(-delta);
		memory_used_ -= std::min(memory_used_, dec);
	}
}

void CacheManager::AdmitLocked(ClockEntry entry) {
	uint64_t cost = entry.Cost();
	EvictUntilFitsLocked(cost);
	// The new unit goes just behind the hand: last in circular sweep order.
	if (hand_ == ring_.end()) {
		hand_ = ring_.begin();
	}
	auto it = ring_.insert(hand_ == ring_.end() ? ring_.end() : hand_, std::move(entry));
	if (hand_ == ring_.end()) {
		hand_ = it;
	}
	by_key_[it->key] = &*it;
	memory_used_ += cost;
}

void CacheManager::EvictUntilFitsLocked(uint64_t needed) {
	size_t visited_without_eviction = 0;
	while (memory_used_ + needed > cfg_.memory_budget) {
		if (ring_.empty()) {
			throw LakeGraphError(ErrorKind::CapacityError,
			                     "memory budget " + std::to_string(cfg_.memory_budget) +
			                         " cannot hold " + std::to_string(needed) + " more bytes");
		}
		if (visited_without_eviction > 4 * ring_.size() + 8) {
			throw LakeGraphError(ErrorKind::CapacityError,
			                     "cache admission failed: all resident units are pinned");
		}
		if (hand_ == ring_.end()) {
			hand_ = ring_.begin();
		}
		auto cur = hand_;
		if (cur->usage > 0) {
			cur->usage--;
		}
		if (cur->usage == 0 && !cur->Pinned()) {
			++hand_;
			EvictEntryLocked(cur);
			visited_without_eviction = 0;
		} else {
			++hand_;
			visited_without_eviction++;
		}
	}
}

void CacheManager::EvictEntryLocked(std::list<ClockEntry>::iterator it) {
	if (hand_ == it) {
		++hand_;
	}
	uint64_t cost = it->Cost();
	if (it->vertex && it->vertex->prefix() > 0 && !cfg_.disk_dir.empty()) {
		FlushVertexImageLocked(*it->vertex);
	}
	by_key_.erase(it->key);
	memory_used_ -= std::min(memory_used_, cost);
	stats_memory_evictions_.fetch_add(1);
	ring_.erase(it);
}

void CacheManager::FlushVertexImageLocked(VertexCacheUnit &unit) {
	uint32_t prefix = unit.prefix();
	Bytes image;
	ByteWriter w(image);
	w.raw(kImageMagic, 4);
	w.u32(unit.key_.file_id);
	w.u32(unit.key_.group);
	w.str16(unit.key_.column);
	w.u8(static_cast<uint8_t>(unit.kind_));
	w.u32(unit.row_count_);
	w.u32(prefix);
	switch (unit.kind_) {
	case ColumnKind::INT64:
	case ColumnKind::DATE32:
		for (uint32_t i = 0; i < prefix; i++) {
			w.i64(unit.ints_[i]);
		}
		break;
	case ColumnKind::FLOAT64:
		for (uint32_t i = 0; i < prefix; i++) {
			w.f64(unit.doubles_[i]);
		}
		break;
	case ColumnKind::BOOL:
		w.raw(unit.bools_.get(), prefix);
		break;
	case ColumnKind::STRING: {
		// Slots are renormalized into a single arena block.
		uint32_t offset = 0;
		for (uint32_t i = 0; i < prefix; i++) {
			w.u32(0);
			w.u32(offset);
			w.u32(unit.str_slots_[i].length);
			offset += unit.str_slots_[i].length;
		}
		w.u32(1);
		w.u32(offset);
		for (uint32_t i = 0; i < prefix; i++) {
			w.raw(unit.str_slots_[i].ptr, unit.str_slots_[i].length);
		}
		break;
	}
	}
	uint64_t checksum = Fnv1a64(image.data() + 4, image.size() - 4);
	w.u64(checksum);
	DiskInsertLocked(unit.key_, true, image);
	stats_flushed_images_.fetch_add(1);
}

std::string CacheManager::DiskPath(const CacheKey &key, bool is_image) const {
	std::string p = cfg_.disk_dir + "/cache/" + std::to_string(key.file_id) + "/" + std::to_string(key.group) +
	                "/" + key.column;
	if (is_image) {
		p += ".lgvc";
	}
	return p;
}

void CacheManager::DiskInsertLocked(const CacheKey &key, bool is_image, const Bytes &data) {
	if (cfg_.disk_dir.empty() || data.size() > cfg_.disk_budget) {
		return;
	}
	DiskEraseLocked(key, is_image);
	DiskEvictUntilFitsLocked(data.size());
	std::string path = DiskPath(key, is_image);
	WriteWholeFile(path, data);
	if (disk_hand_ == disk_ring_.end()) {
		disk_hand_ = disk_ring_.begin();
	}
	auto it = disk_ring_.insert(disk_hand_ == disk_ring_.end() ? disk_ring_.end() : disk_hand_,
	                            DiskEntry {key, is_image, std::move(path), data.size(), 1});
	if (disk_hand_ == disk_ring_.end()) {
		disk_hand_ = it;
	}
	disk_by_key_[{key, is_image}] = it;
	disk_used_ += data.size();
}

void CacheManager::DiskEvictUntilFitsLocked(uint64_t needed) {
	while (disk_used_ + needed > cfg_.disk_budget) {
		if (disk_ring_.empty()) {
			break;
		}
		if (disk_hand_ == disk_ring_.end()) {
			disk_hand_ = disk_ring_.begin();
		}
		auto cur = disk_hand_;
		if (cur->usage > 0) {
			cur->usage--;
		}
		if (cur->usage == 0) {
			++disk_hand_;
			RemoveFileQuiet(cur->path);
			disk_used_ -= std::min(disk_used_, cur->bytes);
			disk_by_key_.erase({cur->key, cur->is_image});
			stats_disk_evictions_.fetch_add(1);
			disk_ring_.erase(cur);
		} else {
			++disk_hand_;
		}
	}
}

void CacheManager::DiskEraseLocked(const CacheKey &key, bool is_image) {
	auto it = disk_by_key_.find({key, is_image});
	if (it == disk_by_key_.end()) {
		return;
	}
	auto ring_it = it->second;
	if (disk_hand_ == ring_it) {
		++disk_hand_;
	}
	RemoveFileQuiet(ring_it->path);
	disk_used_ -= std::min(disk_used_, ring_it->bytes);
	disk_by_key_.erase(it);
	disk_ring_.erase(ring_it);
}

std::optional<Bytes> CacheManager::DiskReadRaw(const CacheKey &key) {
	std::string path;
	{
		std::lock_guard<std::mutex> lk(mu_);
		auto it = disk_by_key_.find({key, false});
		if (it == disk_by_key_.end()) {
			return std::nullopt;
		}
		it->second->usage = 1;
		path = it->second->path;
	}
	std::optional<Bytes> data = ReadWholeFile(path);
	if (!data) {
		std::lock_guard<std::mutex> lk(mu_);
		DiskEraseLocked(key, false);
		return std::nullopt;
	}
	return data;
}

std::shared_ptr<VertexCacheUnit> CacheManager::TryReloadImage(const CacheKey &key, const ChunkInfo &info) {
	std::string path;
	{
		std::lock_guard<std::mutex> lk(mu_);
		auto it = disk_by_key_.find({key, true});
		if (it == disk_by_key_.end()) {
			return nullptr;
		}
		it->second->usage = 1;
		path = it->second->path;
	}
	auto corrupt = [&]() -> std::shared_ptr<VertexCacheUnit> {
		stats_corrupt_images_.fetch_add(1);
		std::lock_guard<std::mutex> lk(mu_);
		DiskEraseLocked(key, true);
		return nullptr;
	};
	std::optional<Bytes> data = ReadWholeFile(path);
	if (!data) {
		return corrupt();
	}
	try {
		const Bytes &img = *data;
		if (img.size() < 12 || std::memcmp(img.data(), kImageMagic, 4) != 0) {
			return corrupt();
		}
		uint64_t stored_sum;
		std::memcpy(&stored_sum, img.data() + img.size() - 8, 8);
		uint64_t computed = Fnv1a64(img.data() + 4, img.size() - 12);
		if (stored_sum != computed) {
			return corrupt();
		}
		ByteReader r(img.data(), img.size() - 8);
		r.Skip(4);
		uint32_t file_id = r.u32();
		uint32_t group = r.u32();
		std::string column = r.str16();
		auto kind = static_cast<ColumnKind>(r.u8());
		uint32_t row_count = r.u32();
		uint32_t prefix = r.u32();
		if (file_id != key.file_id || group != key.group || column != key.column || kind != info.kind ||
		    row_count != info.row_count || prefix > row_count) {
			return corrupt();
		}
		auto unit = std::make_shared<VertexCacheUnit>(key, info.kind, info.encoding, info.row_count);
		unit->AllocateArrays();
		switch (kind) {
		case ColumnKind::INT64:
		case ColumnKind::DATE32:
			for (uint32_t i = 0; i < prefix; i++) {
				unit->ints_[i] = r.i64();
			}
			break;
		case ColumnKind::FLOAT64:
			for (uint32_t i = 0; i < prefix; i++) {
				unit->doubles_[i] = r.f64();
			}
			break;
		case ColumnKind::BOOL:
			std::memcpy(unit->bools_.get(), r.Take(prefix), prefix);
			break;
		case ColumnKind::STRING: {
			struct RawSlot {
				uint32_t block;
				uint32_t offset;
				uint32_t length;
			};
			std::vector<RawSlot> slots(prefix);
			for (uint32_t i = 0; i < prefix; i++) {
				slots[i].block = r.u32();
				slots[i].offset = r.u32();
				slots[i].length = r.u32();
			}
			uint32_t block_count = r.u32();
			for (uint32_t b = 0; b < block_count; b++) {
				uint32_t len = r.u32();
				const uint8_t *src = r.Take(len);
				unit->arenas_.emplace_back(src, src + len);
			}
			for (uint32_t i = 0; i < prefix; i++) {
				if (slots[i].block >= unit->arenas_.size()) {
					return corrupt();
				}
				const Bytes &block = unit->arenas_[slots[i].block];
				if (static_cast<uint64_t>(slots[i].offset) + slots[i].length > block.size()) {
					return corrupt();
				}
				unit->str_slots_[i].ptr = reinterpret_cast<const char *>(block.data()) + slots[i].offset;
				unit->str_slots_[i].offset_in_block = slots[i].offset;
				unit->str_slots_[i].length = slots[i].length;
			}
			break;
		}
		}
		if (!r.exhausted()) {
			return corrupt();
		}
		unit->prefix_.store(prefix, std::memory_order_release);
		return unit;
	} catch (const LakeGraphError &) {
		return corrupt();
	}
}

void CacheManager::RecordDecoded(const CacheKey &key, uint64_t values) {
	std::lock_guard<std::mutex> lk(mu_);
	lineage_decoded_[key] += values;
}

void CacheManager::ClearMemory() {
	std::lock_guard<std::mutex> lk(mu_);
	for (auto it = ring_.begin(); it != ring_.end();) {
		auto next = std::next(it);
		if (!it->Pinned()) {
			EvictEntryLocked(it);
		}
		it = next;
	}
}

void CacheManager::ClearAll() {
	ClearMemory();
	std::lock_guard<std::mutex> lk(mu_);
	for (auto &entry : disk_ring_) {
		RemoveFileQuiet(entry.path);
	}
	disk_ring_.clear();
	disk_by_key_.clear();
	disk_hand_ = disk_ring_.end();
	disk_used_ = 0;
}

uint64_t CacheManager::memory_used() const {
	std::lock_guard<std::mutex> lk(mu_);
	return memory_used_;
}

uint64_t CacheManager::disk_used() const {
	std::lock_guard<std::mutex> lk(mu_);
	return disk_used_;
}

CacheStats CacheManager::stats() const {
	CacheStats s;
	s.memory_hits = stats_memory_hits_.load();
	s.disk_hits = stats_disk_hits_.load();
	s.store_fetches = stats_store_fetches_.load();
	s.memory_evictions = stats_memory_evictions_.load();
	s.disk_evictions = stats_disk_evictions_.load();
	s.flushed_images = stats_flushed_images_.load();
	s.corrupt_images = stats_corrupt_images_.load();
	s.prefetch_issued = stats_prefetch_issued_.load();
	s.prefetch_coalesced = stats_prefetch_coalesced_.load();
	return s;
}

std::vector<ResidencyEntry> CacheManager::MemoryResidency() const {
	std::lock_guard<std::mutex> lk(mu_);
	std::vector<ResidencyEntry> out;
	out.reserve(ring_.size());
	if (ring_.empty()) {
		return out;
	}
	std::list<ClockEntry>::const_iterator it = hand_;
	if (it == ring_.end()) {
		it = ring_.begin();
	}
	for (size_t i = 0; i < ring_.size(); i++) {
		out.push_back({it->key, it->is_vertex, it->usage, it->Cost(), it->Pinned()});
		++it;
		if (it == ring_.end()) {
			it = ring_.begin();
		}
	}
	return out;
}

uint64_t CacheManager::LineageDecoded(const CacheKey &key) const {
	std::lock_guard<std::mutex> lk(mu_);
	auto it = lineage_decoded_.find(key);
	return it == lineage_decoded_.end() ? 0 : it->second;
}

//===----------------------------------------------------------------------===//
// Prefetch
//===----------------------------------------------------------------------===//

void CacheManager::PrefetchRange(uint32_t file_id, uint64_t min_row, uint64_t max_row,
                                 const std::vector<std::string> &columns) {
	if (!cfg_.prefetch_enabled || prefetch_pool_.empty() || columns.empty() || min_row > max_row) {
		return;
	}
	{
		std::lock_guard<std::mutex> lk(prefetch_mu_);
		if (shutdown_) {
			return;
		}
		prefetch_queue_.push_back(RangeTask {file_id, min_row, max_row, columns});
	}
	prefetch_cv_.notify_one();
}

void CacheManager::DrainPrefetch() {
	std::unique_lock<std::mutex> lk(prefetch_mu_);
	prefetch_idle_cv_.wait(lk, [this] { return prefetch_queue_.empty() && prefetch_active_ == 0; });
}

void CacheManager::PrefetchWorker() {
	for (;;) {
		RangeTask task;
		{
			std::unique_lock<std::mutex> lk(prefetch_mu_);
			prefetch_cv_.wait(lk, [this] { return shutdown_ || !prefetch_queue_.empty(); });
			if (prefetch_queue_.empty()) {
				if (shutdown_) {
					return;
				}
				continue;
			}
			task = std::move(prefetch_queue_.front());
			prefetch_queue_.pop_front();
			prefetch_active_++;
		}
		try {
			RunPrefetchTask(task);
		} catch (...) {
			// Prefetch is advisory; the demand path reports real failures.
		}
		{
			std::lock_guard<std::mutex> lk(prefetch_mu_);
			prefetch_active_--;
			if (prefetch_queue_.empty() && prefetch_active_ == 0) {
				prefetch_idle_cv_.notify_all();
			}
		}
	}
}

void CacheManager::RunPrefetchTask(const RangeTask &task) {
	const TableMeta &meta = metas_.Get(task.file_id);
	bool is_vertex_file = metas_.KindOf(task.file_id) == FileKind::Vertex;
	std::vector<uint64_t> offsets = meta.RowOffsets();
	for (size_t g = 0; g + 1 < offsets.size(); g++) {
		if (offsets[g] > task.max_row || offsets[g + 1] <= task.min_row) {
			continue;
		}
		for (const auto &col : task.columns) {
			CacheKey key {task.file_id, static_cast<uint32_t>(g), col};
			{
				std::lock_guard<std::mutex> lk(mu_);
				if (by_key_.count(key) > 0 || inflight_.count(key) > 0) {
					stats_prefetch_coalesced_.fetch_add(1);
					continue;
				}
			}
			stats_prefetch_issued_.fetch_add(1);
			if (is_vertex_file || cfg_.edge_decoded_array) {
				VertexHandle h = Vertex(task.file_id, key.group, col);
			} else {
				EdgeReader r = Edge(task.file_id, key.group, col);
			}
		}
	}
}

//===----------------------------------------------------------------------===//
// Portion pruning
//===----------------------------------------------------------------------===//

std::vector<const EdgePortion *> PruneEdgePortions(
	const EdgeList &list, const std::map<uint32_t, std::pair<uint64_t, uint64_t>> &frontier_ranges) {
	std::vector<const EdgePortion *> survivors;
	for (const auto &portion : list.portions) {
		for (const auto &[file_id, range] : frontier_ranges) {
			(void)file_id;
			if (portion.min_src <= range.second && portion.max_src >= range.first) {
				survivors.push_back(&portion);
				break;
			}
		}
	}
	return survivors;
}

} // namespace lakegraph
