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
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "common/value.hpp"

namespace lakegraph {

enum class AccumKind : uint8_t {
	SUM = 0,
	MIN = 1,
	MAX = 2,
	COUNT = 3,
	OR = 4,
	MAPCOUNT = 5,
};

const char *AccumKindName(AccumKind kind);
AccumKind AccumKindFromName(const std::string &name);

// One buffered accumulator update. Updates are collected per task during a
// superstep and applied single-threaded at the barrier, in task order, so the
// merge sequence does not depend on scheduling.
struct AccumUpdate {
	uint32_t slot;
	uint64_t vertex;
	Value value;
};

class AccumUpdater {
public:
	void Push(uint32_t slot, uint64_t vertex, Value value) {
		updates_.push_back(AccumUpdate{slot, vertex, std::move(value)});
	}
	std::vector<AccumUpdate> &updates() { return updates_; }
	const std::vector<AccumUpdate> &updates() const { return updates_; }

private:
	std::vector<AccumUpdate> updates_;
};

// Named per-vertex accumulator slots. Reads observe the state as of the last
// barrier; new updates only become visible once applied there.
class AccumulatorStore {
public:
	using MapCount = std::map<RawKey, uint64_t>;
	using Entry = std::variant<int64_t, double, bool, MapCount>;

	// Distinct keys one MAPCOUNT cell may hold before overflow is reported.
	static constexpr size_t kMapCountKeyLimit = 65536;

	uint32_t Declare(const std::string &name, AccumKind kind);
	int FindSlot(const std::string &name) const;
	size_t SlotCount() const { return slots_.size(); }
	AccumKind KindOf(uint32_t slot) const;
	const std::string &NameOf(uint32_t slot) const;

	// Scalar read; returns nullopt when the vertex has no entry. MAPCOUNT
	// cells are read through ReadMap instead.
	std::optional<Value> Read(uint32_t slot, uint64_t vertex) const;
	const MapCount *ReadMap(uint32_t slot, uint64_t vertex) const;

	void Visit(uint32_t slot, const std::function<void(uint64_t, const Entry &)> &fn) const;
	size_t EntryCount(uint32_t slot) const;

	// Barrier-side merge of one update. Single-threaded by contract.
	void Apply(uint32_t slot, uint64_t vertex, const Value &update);
	void ApplyAll(const std::vector<AccumUpdate> &updates);

	void Clear(uint32_t slot);
	void ClearAll();

private:
	struct Slot {
		std::string name;
		AccumKind kind;
		std::unordered_map<uint64_t, Entry> cells;
	};

	std::vector<Slot> slots_;
	std::unordered_map<std::string, uint32_t> by_name_;
};

// Canonical text form of a MAPCOUNT cell: "key:count" pairs joined by ';'
// in ascending key order.
std::string FormatMapCount(const AccumulatorStore::MapCount &m);

} // namespace lakegraph
