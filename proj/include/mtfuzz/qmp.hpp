// Copyright 2026 The mtfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// QMP client: line-delimited JSON over a stream socket. Covers the trace
// start/stop commands and the snapshot save/load sequences
// (stop -> snapshot-save|snapshot-load -> poll query-jobs -> cont).
//
// Commands are serialized canonically: keys in insertion order, ": " and
// ", " separators, one LF-terminated line per command.

#ifndef MTFUZZ_QMP_HPP_
#define MTFUZZ_QMP_HPP_

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mtfuzz/backend.hpp"
#include "mtfuzz/error.hpp"

namespace mtfuzz::qmp {

using Json = nlohmann::ordered_json;

class ConnectionError : public Error {
 public:
  using Error::Error;
};

// The server answered with {"error": {...}}.
class CommandError : public Error {
 public:
  CommandError(std::string error_class, std::string desc)
      : Error(error_class + ": " + desc),
        error_class_(std::move(error_class)),
        desc_(std::move(desc)) {}
  const std::string& error_class() const { return error_class_; }
  const std::string& desc() const { return desc_; }

 private:
  std::string error_class_;
  std::string desc_;
};

// Canonical one-line JSON: {"a": 1, "b": [1, 2]}.
inline void write_canonical(const Json& j, std::string& out) {
  if (j.is_object()) {
    out += '{';
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ", ";
      first = false;
      out += Json(it.key()).dump();
      out += ": ";
      write_canonical(it.value(), out);
    }
    out += '}';
  } else if (j.is_array()) {
    out += '[';
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ", ";
      write_canonical(j[i], out);
    }
    out += ']';
  } else {
    out += j.dump();
  }
}

inline std::string canonical(const Json& j) {
  std::string out;
  write_canonical(j, out);
  return out;
}

struct Command {
  std::string execute;
  std::optional<Json> arguments;

  std::string serialize() const {
    Json j;
    j["execute"] = execute;
    if (arguments) j["arguments"] = *arguments;
    return canonical(j) + "\n";
  }
};

inline Command trace_start_command(std::string_view filename) {
  if (filename.empty()) throw ValidationError("mtcfuzz-trace-start: empty filename");
  return {"mtcfuzz-trace-start", Json{{"filename", std::string(filename)}}};
}

inline Command trace_stop_command() { return {"mtcfuzz-trace-stop", std::nullopt}; }

inline std::string build_trace_start(std::string_view filename) {
  return trace_start_command(filename).serialize();
}

inline std::string build_trace_stop() { return trace_stop_command().serialize(); }

// Bidirectional line transport.
class Transport {
 public:
  virtual ~Transport() = default;
  // `line` excludes the terminator; implementations append LF.
  virtual void send_line(std::string_view line) = 0;
  // Throws ConnectionError on EOF, I/O error or timeout.
  virtual std::string recv_line(std::chrono::milliseconds timeout) = 0;
};

class UnixSocketTransport : public Transport {
 public:
  explicit UnixSocketTransport(const std::string& path) {
    sockaddr_un addr{};
    if (path.size() >= sizeof(addr.sun_path)) {
      throw ConnectionError("socket path too long: " + path);
    }
    fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (fd_ < 0) throw ConnectionError(std::string("socket: ") + std::strerror(errno));
    addr.sun_family = AF_UNIX;
    std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      int err = errno;
      ::close(fd_);
      fd_ = -1;
      throw ConnectionError("connect " + path + ": " + std::strerror(err));
    }
  }
  ~UnixSocketTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }
  UnixSocketTransport(const UnixSocketTransport&) = delete;
  UnixSocketTransport& operator=(const UnixSocketTransport&) = delete;

  void send_line(std::string_view line) override {
    std::string buf(line);
    buf += '\n';
    std::size_t off = 0;
    while (off < buf.size()) {
      ssize_t n = ::send(fd_, buf.data() + off, buf.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ConnectionError(std::string("send: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string recv_line(std::chrono::milliseconds timeout) override {
    auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw ConnectionError("timed out waiting for QMP reply");
      pollfd pfd{fd_, POLLIN, 0};
      int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (rc < 0 && errno == EINTR) continue;
      if (rc < 0) throw ConnectionError(std::string("poll: ") + std::strerror(errno));
      if (rc == 0) continue;
      char chunk[4096];
      ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
      if (n < 0 && errno == EINTR) continue;
      if (n < 0) throw ConnectionError(std::string("recv: ") + std::strerror(errno));
      if (n == 0) throw ConnectionError("QMP peer closed the connection");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_ = -1;
  std::string buffer_;
};

struct SessionOptions {
  std::string snapshot_drive_id = "snapshot0";
  std::string tag = std::string(kSnapshotTag);
  std::chrono::milliseconds command_timeout{5000};
  std::chrono::milliseconds job_poll_interval{10};
  std::chrono::milliseconds job_timeout{30000};
};

// Outcome of a snapshot sequence. Logical failures land here; transport
// failures in the middle of a sequence throw ConnectionError.
struct Status {
  bool ok = false;
  std::string message;

  explicit operator bool() const { return ok; }
  static Status success() { return {true, {}}; }
  static Status failure(std::string msg) { return {false, std::move(msg)}; }
};

using Connector = std::function<std::unique_ptr<Transport>()>;

inline Connector unix_socket_connector(std::string path) {
  return [path = std::move(path)] {
    return std::make_unique<UnixSocketTransport>(path);
  };
}

// A QMP endpoint. The session survives reconnects: the resolved block node
// name and the job-id counter persist across connect/disconnect cycles.
class Session {
 public:
  explicit Session(Connector connector, SessionOptions options = {})
      : connector_(std::move(connector)), options_(std::move(options)) {}

  // Opens the transport, reads the greeting and negotiates capabilities.
  bool connect() {
    disconnect();
    try {
      transport_ = connector_();
      Json greeting = read_message();
      if (!greeting.contains("QMP")) {
        throw ConnectionError("unexpected QMP greeting: " + canonical(greeting));
      }
      negotiated_ = true;  // qmp_capabilities is the one pre-negotiation command
      execute({"qmp_capabilities", std::nullopt});
    } catch (const Error&) {
      disconnect();
      return false;
    }
    return true;
  }

  void disconnect() {
    transport_.reset();
    negotiated_ = false;
  }

  bool connected() const { return transport_ != nullptr && negotiated_; }

  // Sends one command and returns its "return" payload. Asynchronous events
  // arriving in between are skipped.
  Json execute(const Command& cmd) {
    if (!connected()) throw ConnectionError("QMP session not negotiated");
    std::string line = cmd.serialize();
    line.pop_back();
    transport_->send_line(line);
    for (;;) {
      Json reply = read_message();
      if (reply.contains("event")) continue;
      if (reply.contains("error")) {
        const Json& e = reply["error"];
        throw CommandError(e.value("class", std::string("GenericError")),
                           e.value("desc", std::string()));
      }
      if (reply.contains("return")) return reply["return"];
      throw ConnectionError("malformed QMP reply: " + canonical(reply));
    }
  }

  // query-block, then the entry whose device id is the snapshot drive. The
  // node name is its inserted node-name when present, else the device id.
  std::optional<std::string> find_block_device() {
    Json blocks = execute({"query-block", std::nullopt});
    if (!blocks.is_array()) return std::nullopt;
    for (const auto& b : blocks) {
      if (b.value("device", std::string()) != options_.snapshot_drive_id) continue;
      if (b.contains("inserted") && b["inserted"].contains("node-name")) {
        return b["inserted"]["node-name"].get<std::string>();
      }
      return options_.snapshot_drive_id;
    }
    return std::nullopt;
  }

  std::string generate_job_id(std::string_view prefix) {
    return std::string(prefix) + "-" + std::to_string(++job_counter_);
  }

  // Polls query-jobs until the job concludes or disappears (auto-dismissed).
  Status await_job(const std::string& job_id) {
    auto deadline = std::chrono::steady_clock::now() + options_.job_timeout;
    for (;;) {
      Json jobs = execute({"query-jobs", std::nullopt});
      const Json* mine = nullptr;
      if (jobs.is_array()) {
        for (const auto& j : jobs) {
          if (j.value("id", std::string()) == job_id) mine = &j;
        }
      }
      if (mine == nullptr) return Status::success();
      std::string status = mine->value("status", std::string());
      if (status == "concluded" || status == "null") {
        if (mine->contains("error")) {
          return Status::failure((*mine)["error"].get<std::string>());
        }
        return Status::success();
      }
      if (std::chrono::steady_clock::now() >= deadline) {
        return Status::failure("timed out waiting for job " + job_id);
      }
      std::this_thread::sleep_for(options_.job_poll_interval);
    }
  }

  const std::optional<std::string>& node_name() const { return node_name_; }
  const SessionOptions& options() const { return options_; }

  // Resolves (once) and returns the snapshot node.
  const std::optional<std::string>& resolve_node() {
    if (!node_name_) node_name_ = find_block_device();
    return node_name_;
  }

 private:
  Json read_message() {
    std::string line = transport_->recv_line(options_.command_timeout);
    try {
      return Json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw ConnectionError("non-JSON line from QMP peer: " + line);
    }
  }

  Connector connector_;
  SessionOptions options_;
  std::unique_ptr<Transport> transport_;
  bool negotiated_ = false;
  std::optional<std::string> node_name_;
  std::uint64_t job_counter_ = 0;
};

namespace detail {

enum class SnapshotKind { kSave, kLoad };

inline Status run_snapshot_job(Session& s, SnapshotKind kind,
                               const std::optional<std::string>& rootfs_device) {
  if (!s.connected() && !s.connect()) return Status::failure("cannot connect to QMP");
  struct Disconnect {
    Session& s;
    ~Disconnect() { s.disconnect(); }
  } disconnect_on_exit{s};

  const std::optional<std::string>& node = s.resolve_node();
  if (!node) {
    return Status::failure("block device '" + s.options().snapshot_drive_id +
                           "' not found");
  }
  s.execute({"stop", std::nullopt});
  Json devices = Json::array({*node});
  if (kind == SnapshotKind::kSave && rootfs_device) devices.push_back(*rootfs_device);
  bool save = kind == SnapshotKind::kSave;
  std::string job_id = s.generate_job_id(save ? "save" : "load");
  Json args;
  args["job-id"] = job_id;
  args["tag"] = s.options().tag;
  args["vmstate"] = *node;
  args["devices"] = devices;

  Status st;
  try {
    s.execute({save ? "snapshot-save" : "snapshot-load", args});
    st = s.await_job(job_id);
  } catch (const CommandError& e) {
    st = Status::failure(e.desc());
  }
  // The VM is resumed whatever happened to the job.
  s.execute({"cont", std::nullopt});
  return st;
}

}  // namespace detail

inline Status snapshot_save(Session& s,
                            const std::optional<std::string>& rootfs_device = std::nullopt) {
  return detail::run_snapshot_job(s, detail::SnapshotKind::kSave, rootfs_device);
}

inline Status snapshot_load(Session& s) {
  return detail::run_snapshot_job(s, detail::SnapshotKind::kLoad, std::nullopt);
}

inline Status trace_start(Session& s, std::string_view filename) {
  try {
    s.execute(trace_start_command(filename));
  } catch (const CommandError& e) {
    return Status::failure(e.desc());
  }
  return Status::success();
}

inline Status trace_stop(Session& s) {
  try {
    s.execute(trace_stop_command());
  } catch (const CommandError& e) {
    return Status::failure(e.desc());
  }
  return Status::success();
}

}  // namespace mtfuzz::qmp

#endif  // MTFUZZ_QMP_HPP_
