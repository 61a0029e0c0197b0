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
#include <filesystem>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "lakestore/object_store.hpp"

namespace lakegraph::testing {

// Unique scratch directory removed on destruction.
class TempDir {
public:
	explicit TempDir(const std::string &tag = "lg") {
		static std::atomic<uint64_t> counter {0};
		auto base = std::filesystem::temp_directory_path();
		path_ = (base / (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1))))
		            .string();
		std::filesystem::create_directories(path_);
	}
	~TempDir() {
		std::error_code ec;
		std::filesystem::remove_all(path_, ec);
	}
	TempDir(const TempDir &) = delete;
	TempDir &operator=(const TempDir &) = delete;

	const std::string &path() const { return path_; }
	std::string Sub(const std::string &name) const { return path_ + "/" + name; }

private:
	std::string path_;
};

// Store wrapper that records every ranged get, so tests can assert which
// byte ranges of which objects were touched.
class RecordingStore : public ObjectStore {
public:
	struct GetRecord {
		std::string path;
		uint64_t offset;
		uint64_t len;
	};

	explicit RecordingStore(std::shared_ptr<ObjectStore> inner) : inner_(std::move(inner)) {}

	using ObjectStore::Put;
	Bytes Get(const std::string &path, uint64_t offset, uint64_t len) override {
		{
			std::lock_guard<std::mutex> guard(mu_);
			gets_.push_back({path, offset, len});
		}
		Bytes out = inner_->Get(path, offset, len);
		stats_.get_count++;
		stats_.bytes_read += out.size();
		return out;
	}
	void Put(const std::string &path, const uint8_t *data, size_t len) override {
		inner_->Put(path, data, len);
		stats_.put_count++;
		stats_.bytes_written += len;
	}
	std::vector<std::string> List(const std::string &prefix) override { return inner_->List(prefix); }
	void Delete(const std::string &path) override { inner_->Delete(path); }
	uint64_t Size(const std::string &path) override {
		stats_.head_count++;
		return inner_->Size(path);
	}
	bool Exists(const std::string &path) override { return inner_->Exists(path); }

	std::vector<GetRecord> gets() const {
		std::lock_guard<std::mutex> guard(mu_);
		return gets_;
	}
	void ClearRecords() {
		std::lock_guard<std::mutex> guard(mu_);
		gets_.clear();
	}

private:
	std::shared_ptr<ObjectStore> inner_;
	mutable std::mutex mu_;
	std::vector<GetRecord> gets_;
};

inline std::string RandomString(std::mt19937_64 &rng, size_t min_len, size_t max_len) {
	static const char alphabet[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
	size_t len = min_len + static_cast<size_t>(rng() % (max_len - min_len + 1));
	std::string s;
	s.reserve(len);
	for (size_t i = 0; i < len; i++) {
		s.push_back(alphabet[rng() % (sizeof(alphabet) - 1)]);
	}
	return s;
}

} // namespace lakegraph::testing
