// Copyright 2026 The stylemix Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
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

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace stylemix {

/// Runs fn(i) for i in [0, count) on `workers` threads pulling from a shared
/// counter. Work items must write only to their own output slots, which makes
/// results independent of the worker count. The first exception thrown by any
/// item is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          if (failed.load(std::memory_order_relaxed)) return;
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

/// Structured key=value log lines on stderr, one event per line:
///   level=info event=stylize.progress done=12 total=90 failed=0
class Logger {
 public:
  explicit Logger(LogLevel level = LogLevel::Info, std::ostream* out = &std::cerr)
      : level_(level), out_(out) {}

  class Line {
   public:
    Line(const Logger* logger, LogLevel level, std::string_view event) : logger_(logger) {
      if (enabled())
        buf_ << "level=" << (level == LogLevel::Debug ? "debug" : "info") << " event=" << event;
    }
    Line(const Line&) = delete;
    Line& operator=(const Line&) = delete;
    ~Line() {
      if (!enabled()) return;
      std::lock_guard lock(logger_->mutex_);
      *logger_->out_ << buf_.str() << '\n';
    }
    template <typename T>
    Line& kv(std::string_view key, const T& value) {
      if (enabled()) {
        std::ostringstream v;
        v << value;
        const std::string s = v.str();
        buf_ << ' ' << key << '=';
        if (s.find_first_of(" \t\"=") != std::string::npos)
          buf_ << std::quoted(s);
        else
          buf_ << s;
      }
      return *this;
    }

   private:
    bool enabled() const { return logger_ != nullptr; }
    const Logger* logger_;
    std::ostringstream buf_;
  };

  Line info(std::string_view event) const { return line(LogLevel::Info, event); }
  Line debug(std::string_view event) const { return line(LogLevel::Debug, event); }

 private:
  Line line(LogLevel level, std::string_view event) const {
    return Line(static_cast<int>(level) <= static_cast<int>(level_) ? this : nullptr, level, event);
  }

  LogLevel level_;
  std::ostream* out_;
  mutable std::mutex mutex_;
};

}  // namespace stylemix
