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
#include <vector>

#include "topology/topology.hpp"

namespace lakegraph {

// Frontier of active vertices: one dense bitmap per vertex file plus an
// active count and min/max active row, maintained incrementally on insert.
// Dangling ids (fileId 0) are never representable and inserts of them are
// dropped.
class ActiveVertexSet {
public:
	struct FileBits {
		std::vector<uint64_t> words;
		uint32_t row_count = 0;
		uint64_t active = 0;
		uint32_t min_row = UINT32_MAX;
		uint32_t max_row = 0;
	};

	// Declares a vertex file so its bitmap capacity is known.
	void Register(uint32_t file_id, uint32_t row_count) {
		FileBits &fb = files_[file_id];
		fb.row_count = row_count;
		fb.words.assign((row_count + 63) / 64, 0);
	}

	// Declares a vertex file with every row active.
	void RegisterAll(uint32_t file_id, uint32_t row_count) {
		Register(file_id, row_count);
		if (row_count == 0) {
			return;
		}
		FileBits &fb = files_[file_id];
		fb.words.assign(fb.words.size(), ~0ull);
		uint32_t tail = row_count & 63;
		if (tail != 0) {
			fb.words.back() = (1ull << tail) - 1;
		}
		fb.active = row_count;
		fb.min_row = 0;
		fb.max_row = row_count - 1;
	}

	// Inserts one vertex; returns true when the bit was newly set. Unknown
	// files and dangling ids are dropped.
	bool Insert(uint64_t packed) {
		uint32_t file = VertexFileId(packed);
		uint32_t row = VertexRowIndex(packed);
		auto it = files_.find(file);
		if (it == files_.end() || row >= it->second.row_count) {
			return false;
		}
		FileBits &fb = it->second;
		uint64_t &word = fb.words[row >> 6];
		uint64_t mask = 1ull << (row & 63);
		if (word & mask) {
			return false;
		}
		word |= mask;
		fb.active++;
		fb.min_row = std::min(fb.min_row, row);
		fb.max_row = std::max(fb.max_row, row);
		return true;
	}

	bool Contains(uint64_t packed) const {
		uint32_t file = VertexFileId(packed);
		uint32_t row = VertexRowIndex(packed);
		auto it = files_.find(file);
		if (it == files_.end() || row >= it->second.row_count) {
			return false;
		}
		return (it->second.words[row >> 6] >> (row & 63)) & 1;
	}

	uint64_t Count() const {
		uint64_t n = 0;
		for (const auto &[id, fb] : files_) {
			(void)id;
			n += fb.active;
		}
		return n;
	}

	bool Empty() const { return Count() == 0; }

	// Packed-id ranges of active rows per file, for prefetch and pruning.
	std::map<uint32_t, std::pair<uint64_t, uint64_t>> ActiveRanges() const {
		std::map<uint32_t, std::pair<uint64_t, uint64_t>> out;
		for (const auto &[id, fb] : files_) {
			if (fb.active > 0) {
				out[id] = {PackVertexId(id, fb.min_row), PackVertexId(id, fb.max_row)};
			}
		}
		return out;
	}

	const std::map<uint32_t, FileBits> &files() const { return files_; }
	FileBits *FindFile(uint32_t file_id) {
		auto it = files_.find(file_id);
		return it == files_.end() ? nullptr : &it->second;
	}
	const FileBits *FindFile(uint32_t file_id) const {
		auto it = files_.find(file_id);
		return it == files_.end() ? nullptr : &it->second;
	}

	// Visits active rows of one file in ascending row order.
	static void ForEachRow(const FileBits &fb, const std::function<void(uint32_t)> &fn) {
		for (size_t w = 0; w < fb.words.size(); w++) {
			uint64_t word = fb.words[w];
			while (word != 0) {
				uint32_t bit = static_cast<uint32_t>(__builtin_ctzll(word));
				fn(static_cast<uint32_t>(w * 64 + bit));
				word &= word - 1;
			}
		}
	}

	// Visits all active vertices in ascending packed-id order.
	void ForEach(const std::function<void(uint64_t)> &fn) const {
		for (const auto &[id, fb] : files_) {
			ForEachRow(fb, [&](uint32_t row) { fn(PackVertexId(id, row)); });
		}
	}

private:
	std::map<uint32_t, FileBits> files_;
};

} // namespace lakegraph
