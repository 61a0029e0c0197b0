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

#include <condition_variable>
#include <deque>
#include <exception>
#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace lakegraph {

// Fixed-size pool. Task exceptions propagate through the returned futures;
// RunAll rethrows the first failure after every task has finished.
class ThreadPool {
public:
	explicit ThreadPool(size_t threads) {
		if (threads == 0) {
			threads = 1;
		}
		for (size_t i = 0; i < threads; i++) {
			workers_.emplace_back([this] { WorkerLoop(); });
		}
	}

	~ThreadPool() {
		{
			std::lock_guard<std::mutex> guard(mutex_);
			stop_ = true;
		}
		cv_.notify_all();
		for (auto &w : workers_) {
			w.join();
		}
	}

	size_t thread_count() const { return workers_.size(); }

	std::future<void> Submit(std::function<void()> fn) {
		auto task = std::make_shared<std::packaged_task<void()>>(std::move(fn));
		auto fut = task->get_future();
		{
			std::lock_guard<std::mutex> guard(mutex_);
			queue_.emplace_back([task] { (*task)(); });
		}
		cv_.notify_one();
		return fut;
	}

	// Runs fn(i) for i in [0, n) across the pool and waits for completion.
	void RunAll(size_t n, const std::function<void(size_t)> &fn) {
		std::vector<std::future<void>> futures;
		futures.reserve(n);
		for (size_t i = 0; i < n; i++) {
			futures.push_back(Submit([&fn, i] { fn(i); }));
		}
		std::exception_ptr first;
		for (auto &f : futures) {
			try {
				f.get();
			} catch (...) {
				if (!first) {
					first = std::current_exception();
				}
			}
		}
		if (first) {
			std::rethrow_exception(first);
		}
	}

private:
	void WorkerLoop() {
		for (;;) {
			std::function<void()> task;
			{
				std::unique_lock<std::mutex> lock(mutex_);
				cv_.wait(lock, [this] { return stop_ || !queue_.empty(); });
				if (queue_.empty()) {
					if (stop_) {
						return;
					}
					continue;
				}
				task = std::move(queue_.front());
				queue_.pop_front();
			}
			task();
		}
	}

	std::vector<std::thread> workers_;
	std::deque<std::function<void()>> queue_;
	std::mutex mutex_;
	std::condition_variable cv_;
	bool stop_ = false;
};

// MPMC queue used to hand completed downloads to compute workers.
template <typename T>
class BlockingQueue {
public:
	void Push(T item) {
		{
			std::lock_guard<std::mutex> guard(mutex_);
			items_.push_back(std::move(item));
		}
		cv_.notify_one();
	}

	// Returns nullopt once closed and drained.
	std::optional<T> Pop() {
		std::unique_lock<std::mutex> lock(mutex_);
		cv_.wait(lock, [this] { return closed_ || !items_.empty(); });
		if (items_.empty()) {
			return std::nullopt;
		}
		T item = std::move(items_.front());
		items_.pop_front();
		return item;
	}

	void Close() {
		{
			std::lock_guard<std::mutex> guard(mutex_);
			closed_ = true;
		}
		cv_.notify_all();
	}

private:
	std::deque<T> items_;
	std::mutex mutex_;
	std::condition_variable cv_;
	bool closed_ = false;
};

} // namespace lakegraph
