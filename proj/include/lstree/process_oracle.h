/*
 * Copyright 2026 The lstree Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LSTREE_PROCESS_ORACLE_H_
#define LSTREE_PROCESS_ORACLE_H_

#include <sys/types.h>

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lstree/oracle.h"

namespace lstree {

// Model living in a child process that speaks the line-delimited JSON
// protocol on its stdin/stdout:
//
//   -> {"type":"hello","version":1}
//   <- {"type":"hello","version":1,"model":"<name>"}
//   -> {"type":"eval","id":7,"tokens":[...],"keep":[1,0,...],"class_index":null}
//   <- {"type":"score","id":7,"score":-0.31}   or
//   <- {"type":"error","id":7,"message":"..."}
//   -> {"type":"bye"}
//
// A score reply to a request with a null class_index may carry the
// "class_index" the model picked; ResolveClass relies on it.
// Replies can arrive in any order and are matched by id. A crashed or
// silent process is restarted up to `max_restarts` times per batch.
class ProcessOracle : public Oracle {
 public:
  struct Options {
    std::chrono::milliseconds timeout{30000};
    int max_restarts = 2;
  };

  explicit ProcessOracle(std::string command) : ProcessOracle(std::move(command), Options{}) {}
  ProcessOracle(std::string command, Options options);
  ~ProcessOracle() override;

  ProcessOracle(const ProcessOracle&) = delete;
  ProcessOracle& operator=(const ProcessOracle&) = delete;

  std::string name() const override { return model_name_; }
  std::optional<int> ResolveClass(std::span<const std::string> tokens) override;

  // Number of times the child process was (re)started.
  int launches() const { return launches_; }

 protected:
  std::vector<double> DoEvaluateBatch(std::span<const ModelQuery> queries,
                                      std::optional<int> class_index) override;

 private:
  struct Reply {
    std::optional<double> score;
    std::optional<int> class_index;
    std::optional<std::string> error;
  };

  std::string command_;
  Options options_;
  std::string model_name_ = "external";
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
  std::int64_t next_id_ = 0;
  int launches_ = 0;

  void Launch();
  void Shutdown(bool polite);
  // Sends `requests` and collects one reply per id. Throws OracleError on
  // process failure; per-request errors are returned as replies.
  std::vector<Reply> Exchange(const std::vector<std::string>& requests, const std::vector<std::int64_t>& ids);
  std::vector<Reply> ExchangeWithRestart(std::span<const ModelQuery> queries, std::optional<int> class_index);
  std::optional<std::string> ReadLine(std::chrono::steady_clock::time_point deadline);
};

}  // namespace lstree

#endif  // LSTREE_PROCESS_ORACLE_H_
