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

#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include "common/bytes.hpp"

namespace lakegraph {

// Thread-safe request/byte counters. bytesRead covers exactly the byte
// ranges served by get; size/exists probes serve no ranges and are
// tracked separately.
struct StoreStats {
	std::atomic<uint64_t> get_count {0};
	std::atomic<uint64_t> put_count {0};
	std::atomic<uint64_t> bytes_read {0};
	std::atomic<uint64_t> bytes_written {0};
	std::atomic<uint64_t> head_count {0};

	struct Snapshot {
		uint64_t get_count;
		uint64_t put_count;
		uint64_t bytes_read;
		uint64_t bytes_written;
		uint64_t head_count;
	};

	Snapshot Read() const {
		return {get_count.load(), put_count.load(), bytes_read.load(), bytes_written.load(), head_count.load()};
	}
	void Reset() {
		get_count = 0;
		put_count = 0;
		bytes_read = 0;
		bytes_written = 0;
		head_count = 0;
	}
};

// Flat-namespace immutable object storage with ranged reads.
class ObjectStore {
public:
	virtual ~ObjectStore() = default;

	// Reads exactly [offset, offset+len) of the object; short objects are an error.
	virtual Bytes Get(const std::string &path, uint64_t offset, uint64_t len) = 0;
	virtual void Put(const std::string &path, const uint8_t *data, size_t len) = 0;
	virtual std::vector<std::string> List(const std::string &prefix) = 0;
	virtual void Delete(const std::string &path) = 0;
	virtual uint64_t Size(const std::string &path) = 0;
	virtual bool Exists(const std::string &path) = 0;

	void Put(const std::string &path, const Bytes &bytes) { Put(path, bytes.data(), bytes.size()); }
	Bytes GetAll(const std::string &path) { return Get(path, 0, Size(path)); }

	StoreStats &stats() { return stats_; }
	const StoreStats &stats() const { return stats_; }

protected:
	StoreStats stats_;
};

// Directory-backed store. Object paths map to files under the root.
class LocalStore : public ObjectStore {
public:
	explicit LocalStore(std::string root);

	using ObjectStore::Put;
	Bytes Get(const std::string &path, uint64_t offset, uint64_t len) override;
	void Put(const std::string &path, const uint8_t *data, size_t len) override;
	std::vector<std::string> List(const std::string &prefix) override;
	void Delete(const std::string &path) override;
	uint64_t Size(const std::string &path) override;
	bool Exists(const std::string &path) override;

	const std::string &root() const { return root_; }

private:
	std::string Resolve(const std::string &path) const;

	std::string root_;
};

// Wraps another store and injects per-get delay: baseLatency plus
// len/throughput. Sleeps run on the calling thread so concurrent gets overlap.
class LatencyStore : public ObjectStore {
public:
	LatencyStore(std::shared_ptr<ObjectStore> inner, double base_latency_ms, double throughput_mbps);

	using ObjectStore::Put;
	Bytes Get(const std::string &path, uint64_t offset, uint64_t len) override;
	void Put(const std::string &path, const uint8_t *data, size_t len) override;
	std::vector<std::string> List(const std::string &prefix) override;
	void Delete(const std::string &path) override;
	uint64_t Size(const std::string &path) override;
	bool Exists(const std::string &path) override;

private:
	std::shared_ptr<ObjectStore> inner_;
	double base_latency_ms_;
	double throughput_mbps_;
};

} // namespace lakegraph
