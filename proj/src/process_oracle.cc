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

#include "lstree/process_oracle.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>
#include <unordered_map>

#include "json.hpp"

namespace lstree {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

int RemainingMs(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left < 0 ? 0 : static_cast<int>(left);
}

void WriteAll(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n > 0) {
      done += static_cast<std::size_t>(n);
    } else if (n < 0 && (errno == EAGAIN || errno == EINTR)) {
      pollfd p{fd, POLLOUT, 0};
      ::poll(&p, 1, 100);
    } else {
      return;
    }
  }
}

std::string EvalRequest(std::int64_t id, const ModelQuery& q, std::optional<int> class_index) {
  json keep = json::array();
  for (bool k : q.keep) keep.push_back(k ? 1 : 0);
  json msg = {{"type", "eval"},
              {"id", id},
              {"tokens", std::vector<std::string>(q.tokens.begin(), q.tokens.end())},
              {"keep", std::move(keep)},
              {"class_index", class_index ? json(*class_index) : json(nullptr)}};
  return msg.dump() + "\n";
}

}  // namespace

ProcessOracle::ProcessOracle(std::string command, Options options)
    : command_(std::move(command)), options_(options) {
  Launch();
}

ProcessOracle::~ProcessOracle() { Shutdown(true); }

void ProcessOracle::Launch() {
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0) {
    throw OracleError(std::string("cannot create pipes: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw OracleError(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::fcntl(to_child_, F_SETFL, ::fcntl(to_child_, F_GETFL) | O_NONBLOCK);
  read_buffer_.clear();
  ++launches_;

  WriteAll(to_child_, json({{"type", "hello"}, {"version", 1}}).dump() + "\n");
  const auto line = ReadLine(Clock::now() + options_.timeout);
  if (!line) {
    Shutdown(false);
    throw OracleError("model process '" + command_ + "' did not answer the handshake");
  }
  json reply = json::parse(*line, nullptr, false);
  if (reply.is_discarded() || reply.value("type", "") != "hello" || reply.value("version", 0) != 1) {
    Shutdown(false);
    throw OracleError("model process sent a bad handshake: " + *line);
  }
  model_name_ = reply.value("model", std::string("external"));
}

void ProcessOracle::Shutdown(bool polite) {
  if (pid_ < 0) return;
  if (polite && to_child_ >= 0) WriteAll(to_child_, json({{"type", "bye"}}).dump() + "\n");
  if (to_child_ >= 0) ::close(to_child_);
  to_child_ = -1;

  const auto deadline = Clock::now() + std::chrono::milliseconds(polite ? 2000 : 0);
  int status = 0;
  while (::waitpid(pid_, &status, WNOHANG) == 0) {
    if (Clock::now() >= deadline) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (from_child_ >= 0) ::close(from_child_);
  from_child_ = -1;
  pid_ = -1;
}

std::optional<std::string> ProcessOracle::ReadLine(Clock::time_point deadline) {
  while (true) {
    if (auto nl = read_buffer_.find('\n'); nl != std::string::npos) {
      std::string line = read_buffer_.substr(0, nl);
      read_buffer_.erase(0, nl + 1);
      return line;
    }
    pollfd p{from_child_, POLLIN, 0};
    const int ready = ::poll(&p, 1, RemainingMs(deadline));
    if (ready == 0) return std::nullopt;
    if (ready < 0) {
      if (errno == EINTR) continue;
      return std::nullopt;
    }
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n <= 0) return std::nullopt;
    read_buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<ProcessOracle::Reply> ProcessOracle::Exchange(const std::vector<std::string>& requests,
                                                          const std::vector<std::int64_t>& ids) {
  if (pid_ < 0) throw OracleError("model process is not running");
  std::string out;
  for (const auto& r : requests) out += r;
  std::size_t written = 0;

  std::unordered_map<std::int64_t, std::size_t> slot_of;
  for (std::size_t k = 0; k < ids.size(); ++k) slot_of[ids[k]] = k;
  std::vector<Reply> replies(ids.size());
  std::size_t pending = ids.size();

  auto deadline = Clock::now() + options_.timeout;
  while (pending > 0) {
    std::size_t nl;
    while (pending > 0 && (nl = read_buffer_.find('\n')) != std::string::npos) {
      const std::string line = read_buffer_.substr(0, nl);
      read_buffer_.erase(0, nl + 1);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      json msg = json::parse(line, nullptr, false);
      if (msg.is_discarded() || !msg.is_object()) throw OracleError("model process sent malformed reply: " + line);
      const std::string type = msg.value("type", "");
      if (type == "bye") throw OracleError("model process said bye mid-batch");
      if (!msg.contains("id") || !msg["id"].is_number_integer()) continue;
      auto it = slot_of.find(msg["id"].get<std::int64_t>());
      if (it == slot_of.end()) continue;
      Reply& reply = replies[it->second];
      if (reply.score || reply.error) continue;
      if (type == "score" && msg.contains("score") && msg["score"].is_number()) {
        reply.score = msg["score"].get<double>();
        if (msg.contains("class_index") && msg["class_index"].is_number_integer()) {
          reply.class_index = msg["class_index"].get<int>();
        }
      } else if (type == "error") {
        reply.error = msg.value("message", std::string("unspecified model error"));
      } else {
        reply.error = "unexpected reply: " + line;
      }
      --pending;
    }
    if (pending == 0) break;

    pollfd fds[2] = {{from_child_, POLLIN, 0}, {to_child_, POLLOUT, 0}};
    const nfds_t nfds = written < out.size() ? 2 : 1;
    const int ready = ::poll(fds, nfds, RemainingMs(deadline));
    if (ready == 0) throw OracleError("model process timed out");
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw OracleError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n = ::write(to_child_, out.data() + written, out.size() - written);
      if (n > 0) {
        written += static_cast<std::size_t>(n);
      } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
        throw OracleError("model process closed its input");
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char chunk[4096];
      const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
      if (n == 0) throw OracleError("model process exited");
      if (n < 0 && errno != EAGAIN && errno != EINTR) throw OracleError("read from model process failed");
      if (n > 0) {
        read_buffer_.append(chunk, static_cast<std::size_t>(n));
        deadline = Clock::now() + options_.timeout;
      }
    }
  }
  return replies;
}

std::vector<ProcessOracle::Reply> ProcessOracle::ExchangeWithRestart(std::span<const ModelQuery> queries,
                                                                     std::optional<int> class_index) {
  for (int attempt = 0;; ++attempt) {
    std::vector<std::string> requests;
    std::vector<std::int64_t> ids;
    for (const auto& q : queries) {
      ids.push_back(next_id_++);
      requests.push_back(EvalRequest(ids.back(), q, class_index));
    }
    try {
      if (pid_ < 0) Launch();
      return Exchange(requests, ids);
    } catch (const OracleError& e) {
      Shutdown(false);
      if (attempt >= options_.max_restarts) {
        throw OracleError(std::string(e.what()) + " (after " + std::to_string(attempt) + " restarts)", ids.front());
      }
    }
  }
}

std::vector<double> ProcessOracle::DoEvaluateBatch(std::span<const ModelQuery> queries,
                                                   std::optional<int> class_index) {
  if (queries.empty()) return {};
  auto replies = ExchangeWithRestart(queries, class_index);
  // Ids of the successful attempt are the last queries.size() handed out.
  const std::int64_t base_id = next_id_ - static_cast<std::int64_t>(queries.size());
  std::vector<double> scores;
  scores.reserve(replies.size());
  for (std::size_t k = 0; k < replies.size(); ++k) {
    if (replies[k].error) {
      throw OracleError("model error on request " + std::to_string(base_id + static_cast<std::int64_t>(k)) + ": " +
                            *replies[k].error,
                        base_id + static_cast<std::int64_t>(k), k);
    }
    scores.push_back(*replies[k].score);
  }
  return scores;
}

std::optional<int> ProcessOracle::ResolveClass(std::span<const std::string> tokens) {
  ModelQuery full{tokens, std::vector<bool>(tokens.size(), true)};
  auto replies = ExchangeWithRestart(std::span<const ModelQuery>(&full, 1), std::nullopt);
  if (replies.front().error) {
    throw OracleError("model error while resolving class: " + *replies.front().error, next_id_ - 1, 0);
  }
  return replies.front().class_index;
}

}  // namespace lstree
