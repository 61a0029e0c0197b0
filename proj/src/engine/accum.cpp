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

#include "engine/accum.hpp"

#include <sstream>

#include "common/error.hpp"

namespace lakegraph {

const char *AccumKindName(AccumKind kind) {
	switch (kind) {
	case AccumKind::SUM: return "sum";
	case AccumKind::MIN: return "min";
	case AccumKind::MAX: return "max";
	case AccumKind::COUNT: return "count";
	case AccumKind::OR: return "or";
	case AccumKind::MAPCOUNT: return "mapcount";
	}
	return "?";
}

AccumKind AccumKindFromName(const std::string &name) {
	if (name == "sum") return AccumKind::SUM;
	if (name == "min") return AccumKind::MIN;
	if (name == "max") return AccumKind::MAX;
	if (name == "count") return AccumKind::COUNT;
	if (name == "or") return AccumKind::OR;
	if (name == "mapcount") return AccumKind::MAPCOUNT;
	throw LakeGraphError(ErrorKind::InvalidArgument, "unknown accumulator kind '" + name + "'");
}

uint32_t AccumulatorStore::Declare(const std::string &name, AccumKind kind) {
	auto it = by_name_.find(name);
	if (it != by_name_.end()) {
		if (slots_[it->second].kind != kind) {
			throw LakeGraphError(ErrorKind::InvalidArgument,
				"accumulator '" + name + "' redeclared with a different kind");
		}
		return it->second;
	}
	uint32_t idx = static_cast<uint32_t>(slots_.size());
	slots_.push_back(Slot{name, kind, {}});
	by_name_.emplace(name, idx);
	return idx;
}

int AccumulatorStore::FindSlot(const std::string &name) const {
	auto it = by_name_.find(name);
	return it == by_name_.end() ? -1 : static_cast<int>(it->second);
}

AccumKind AccumulatorStore::KindOf(uint32_t slot) const {
	return slots_.at(slot).kind;
}

const std::string &AccumulatorStore::NameOf(uint32_t slot) const {
	return slots_.at(slot).name;
}

std::optional<Value> AccumulatorStore::Read(uint32_t slot, uint64_t vertex) const {
	const Slot &s = slots_.at(slot);
	auto it = s.cells.find(vertex);
	if (it == s.cells.end()) {
		return std::nullopt;
	}
	const Entry &e = it->second;
	if (std::holds_alternative<int64_t>(e)) return Value(std::get<int64_t>(e));
	if (std::holds_alternative<double>(e)) return Value(std::get<double>(e));
	if (std::holds_alternative<bool>(e)) return Value(std::get<bool>(e));
	return Value(FormatMapCount(std::get<MapCount>(e)));
}

const AccumulatorStore::MapCount *AccumulatorStore::ReadMap(uint32_t slot, uint64_t vertex) const {
	const Slot &s = slots_.at(slot);
	auto it = s.cells.find(vertex);
	if (it == s.cells.end() || !std::holds_alternative<MapCount>(it->second)) {
		return nullptr;
	}
	return &std::get<MapCount>(it->second);
}

void AccumulatorStore::Visit(uint32_t slot,
	const std::function<void(uint64_t, const Entry &)> &fn) const {
	for (const auto &[vertex, entry] : slots_.at(slot).cells) {
		fn(vertex, entry);
	}
}

size_t AccumulatorStore::EntryCount(uint32_t slot) const {
	return slots_.at(slot).cells.size();
}

namespace {

bool IsNumeric(const Value &v) {
	return std::holds_alternative<int64_t>(v) || std::holds_alternative<double>(v);
}

double AsDouble(const Value &v) {
	return std::holds_alternative<double>(v) ? std::get<double>(v)
		: static_cast<double>(std::get<int64_t>(v));
}

// Orders two scalar updates of a MIN/MAX slot. Mixed int/double pairs are
// compared as doubles; otherwise both sides must hold the same alternative.
int OrderScalars(const AccumulatorStore::Entry &a, const Value &b, const std::string &slot) {
	if (std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b)) {
		int64_t x = std::get<int64_t>(a), y = std::get<int64_t>(b);
		return x < y ? -1 : (x > y ? 1 : 0);
	}
	bool a_num = std::holds_alternative<int64_t>(a) || std::holds_alternative<double>(a);
	if (a_num && IsNumeric(b)) {
		double x = std::holds_alternative<double>(a) ? std::get<double>(a)
			: static_cast<double>(std::get<int64_t>(a));
		double y = AsDouble(b);
		return x < y ? -1 : (x > y ? 1 : 0);
	}
	if (std::holds_alternative<bool>(a) && std::holds_alternative<bool>(b)) {
		int x = std::get<bool>(a) ? 1 : 0, y = std::get<bool>(b) ? 1 : 0;
		return x - y;
	}
	throw LakeGraphError(ErrorKind::QueryError,
		"accumulator '" + slot + "' received updates of incompatible types");
}

AccumulatorStore::Entry ScalarEntry(const Value &v, const std::string &slot) {
	if (std::holds_alternative<int64_t>(v)) return std::get<int64_t>(v);
	if (std::holds_alternative<double>(v)) return std::get<double>(v);
	if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
	throw LakeGraphError(ErrorKind::QueryError,
		"accumulator '" + slot + "' cannot hold a string value");
}

RawKey MapKeyOf(const Value &v, const std::string &slot) {
	if (std::holds_alternative<int64_t>(v)) return RawKey(std::get<int64_t>(v));
	if (std::holds_alternative<std::string>(v)) return RawKey(std::get<std::string>(v));
	if (std::holds_alternative<bool>(v)) return RawKey(static_cast<int64_t>(std::get<bool>(v)));
	throw LakeGraphError(ErrorKind::QueryError,
		"mapcount accumulator '" + slot + "' requires integer or string keys");
}

} // namespace

void AccumulatorStore::Apply(uint32_t slot, uint64_t vertex, const Value &update) {
	Slot &s = slots_.at(slot);
	switch (s.kind) {
	case AccumKind::SUM: {
		if (!IsNumeric(update)) {
			throw LakeGraphError(ErrorKind::QueryError,
				"sum accumulator '" + s.name + "' requires numeric updates");
		}
		auto it = s.cells.find(vertex);
		if (it == s.cells.end()) {
			s.cells.emplace(vertex, ScalarEntry(update, s.name));
			break;
		}
		Entry &e = it->second;
		if (std::holds_alternative<int64_t>(e) && std::holds_alternative<int64_t>(update)) {
			std::get<int64_t>(e) += std::get<int64_t>(update);
		} else {
			double cur = std::holds_alternative<double>(e) ? std::get<double>(e)
				: static_cast<double>(std::get<int64_t>(e));
			e = cur + AsDouble(update);
		}
		break;
	}
	case AccumKind::MIN:
	case AccumKind::MAX: {
		auto it = s.cells.find(vertex);
		if (it == s.cells.end()) {
			s.cells.emplace(vertex, ScalarEntry(update, s.name));
			break;
		}
		int ord = OrderScalars(it->second, update, s.name);
		bool replace = s.kind == AccumKind::MIN ? ord > 0 : ord < 0;
		if (replace) {
			it->second = ScalarEntry(update, s.name);
		}
		break;
	}
	case AccumKind::COUNT: {
		auto it = s.cells.find(vertex);
		if (it == s.cells.end()) {
			s.cells.emplace(vertex, static_cast<int64_t>(1));
		} else {
			std::get<int64_t>(it->second) += 1;
		}
		break;
	}
	case AccumKind::OR: {
		if (!std::holds_alternative<bool>(update)) {
			throw LakeGraphError(ErrorKind::QueryError,
				"or accumulator '" + s.name + "' requires boolean updates");
		}
		auto it = s.cells.find(vertex);
		if (it == s.cells.end()) {
			s.cells.emplace(vertex, std::get<bool>(update));
		} else {
			it->second = std::get<bool>(it->second) || std::get<bool>(update);
		}
		break;
	}
	case AccumKind::MAPCOUNT: {
		RawKey key = MapKeyOf(update, s.name);
		auto it = s.cells.find(vertex);
		if (it == s.cells.end()) {
			it = s.cells.emplace(vertex, MapCount{}).first;
		}
		MapCount &m = std::get<MapCount>(it->second);
		auto mk = m.find(key);
		if (mk == m.end()) {
			if (m.size() >= kMapCountKeyLimit) {
				throw LakeGraphError(ErrorKind::QueryError,
					"mapcount accumulator '" + s.name + "' exceeded " +
					std::to_string(kMapCountKeyLimit) + " distinct keys");
			}
			m.emplace(std::move(key), 1);
		} else {
			mk->second++;
		}
		break;
	}
	}
}

void AccumulatorStore::ApplyAll(const std::vector<AccumUpdate> &updates) {
	for (const AccumUpdate &u : updates) {
		Apply(u.slot, u.vertex, u.value);
	}
}

void AccumulatorStore::Clear(uint32_t slot) {
	slots_.at(slot).cells.clear();
}

void AccumulatorStore::ClearAll() {
	for (Slot &s : slots_) {
		s.cells.clear();
	}
}

std::string FormatMapCount(const AccumulatorStore::MapCount &m) {
	std::ostringstream out;
	bool first = true;
	for (const auto &[key, count] : m) {
		if (!first) {
			out << ';';
		}
		first = false;
		if (std::holds_alternative<int64_t>(key)) {
			out << std::get<int64_t>(key);
		} else {
			out << std::get<std::string>(key);
		}
		out << ':' << count;
	}
	return out.str();
}

} // namespace lakegraph
