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

#include "lakestore/object_store.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "common/error.hpp"

namespace fs = std::filesystem;

namespace lakegraph {

namespace {

void ValidateObjectPath(const std::string &path) {
	if (path.empty() || path.front() == '/' || path.find("..") != std::string::npos) {
		throw LakeGraphError(ErrorKind::InvalidArgument, "invalid object path: " + path);
	}
}

} // namespace

LocalStore::LocalStore(std::string root) : root_(std::move(root)) {
	fs::create_directories(root_);
}

std::string LocalStore::Resolve(const std::string &path) const {
	ValidateObjectPath(path);
	return root_ + "/" + path;
}

Bytes LocalStore::Get(const std::string &path, uint64_t offset, uint64_t len) {
	std::string full = Resolve(path);
	std::FILE *f = std::fopen(full.c_str(), "rb");
	if (!f) {
		throw LakeGraphError(ErrorKind::NotFound, "object not found: " + path);
	}
	Bytes out(len);
	size_t got = 0;
	if (std::fseek(f, static_cast<long>(offset), SEEK_SET) == 0 && len > 0) {
		got = std::fread(out.data(), 1, len, f);
	}
	std::fclose(f);
	if (got != len) {
		throw LakeGraphError(ErrorKind::IoError, "short read on " + path + ": requested [" + std::to_string(offset) +
		                     ", +" + std::to_string(len) + "), got " + std::to_string(got));
	}
	stats_.get_count.fetch_add(1);
	stats_.bytes_read.fetch_add(len);
	return out;
}

void LocalStore::Put(const std::string &path, const uint8_t *data, size_t len) {
	std::string full = Resolve(path);
	fs::path p(full);
	if (p.has_parent_path()) {
		fs::create_directories(p.parent_path());
	}
	// Write to a temp name then rename so readers never observe partial objects.
	std::string tmp = full + ".tmp";
	std::FILE *f = std::fopen(tmp.c_str(), "wb");
	if (!f) {
		throw LakeGraphError(ErrorKind::IoError, "cannot open for write: " + path);
	}
	size_t wrote = len ? std::fwrite(data, 1, len, f) : 0;
	std::fclose(f);
	if (wrote != len) {
		std::remove(tmp.c_str());
		throw LakeGraphError(ErrorKind::IoError, "short write on " + path);
	}
	std::error_code ec;
	fs::rename(tmp, full, ec);
	if (ec) {
		throw LakeGraphError(ErrorKind::IoError, "rename failed for " + path + ": " + ec.message());
	}
	stats_.put_count.fetch_add(1);
	stats_.bytes_written.fetch_add(len);
}

std::vector<std::string> LocalStore::List(const std::string &prefix) {
	std::vector<std::string> out;
	if (!fs::exists(root_)) {
		return out;
	}
	for (const auto &entry : fs::recursive_directory_iterator(root_)) {
		if (!entry.is_regular_file()) {
			continue;
		}
		std::string rel = fs::relative(entry.path(), root_).generic_string();
		if (rel.size() >= 4 && rel.substr(rel.size() - 4) == ".tmp") {
			continue;
		}
		if (rel.rfind(prefix, 0) == 0) {
			out.push_back(rel);
		}
	}
	std::sort(out.begin(), out.end());
	return out;
}

void LocalStore::Delete(const std::string &path) {
	std::string full = Resolve(path);
	std::error_code ec;
	if (!fs::remove(full, ec) || ec) {
		throw LakeGraphError(ErrorKind::NotFound, "cannot delete object: " + path);
	}
}

uint64_t LocalStore::Size(const std::string &path) {
	std::string full = Resolve(path);
	std::error_code ec;
	auto size = fs::file_size(full, ec);
	if (ec) {
		throw LakeGraphError(ErrorKind::NotFound, "object not found: " + path);
	}
	stats_.head_count.fetch_add(1);
	return size;
}

bool LocalStore::Exists(const std::string &path) {
	return fs::exists(Resolve(path));
}

LatencyStore::LatencyStore(std::shared_ptr<ObjectStore> inner, double base_latency_ms, double throughput_mbps)
    : inner_(std::move(inner)), base_latency_ms_(base_latency_ms), throughput_mbps_(throughput_mbps) {}

Bytes LatencyStore::Get(const std::string &path, uint64_t offset, uint64_t len) {
	double delay_ms = base_latency_ms_;
	if (throughput_mbps_ > 0) {
		delay_ms += static_cast<double>(len) / (throughput_mbps_ * 1e6) * 1e3;
	}
	if (delay_ms > 0) {
		std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay_ms));
	}
	Bytes out = inner_->Get(path, offset, len);
	stats_.get_count.fetch_add(1);
	stats_.bytes_read.fetch_add(len);
	return out;
}

void LatencyStore::Put(const std::string &path, const uint8_t *data, size_t len) {
	inner_->Put(path, data, len);
	stats_.put_count.fetch_add(1);
	stats_.bytes_written.fetch_add(len);
}

std::vector<std::string> LatencyStore::List(const std::string &prefix) {
	return inner_->List(prefix);
}

void LatencyStore::Delete(const std::string &path) {
	inner_->Delete(path);
}

uint64_t LatencyStore::Size(const std::string &path) {
	stats_.head_count.fetch_add(1);
	return inner_->Size(path);
}

bool LatencyStore::Exists(const std::string &path) {
	return inner_->Exists(path);
}

} // namespace lakegraph
