#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "madphys/harness/config.hpp"
#include "madphys/harness/episode.hpp"

namespace madphys::harness {

/// Newline-delimited duplex channel over a pair of file descriptors.
class LineChannel {
 public:
  LineChannel(int read_fd, int write_fd, bool owns = true);
  ~LineChannel();
  LineChannel(const LineChannel&) = delete;
  LineChannel& operator=(const LineChannel&) = delete;

  /// Next line without its terminator; std::nullopt on EOF or error.
  std::optional<std::string> read_line();
  /// Writes `line` plus '\n'; false when the peer is gone.
  bool write_line(std::string_view line);
  void close();

 private:
  int read_fd_;
  int write_fd_;
  bool owns_;
  std::string buffer_;
};

/// Agent adapter that forwards envelopes over a channel.
class ChannelAgent : public Agent {
 public:
  explicit ChannelAgent(LineChannel& channel) : channel_(channel) {}
  std::optional<std::string> respond(const nlohmann::json& envelope) override;
  void finish(const nlohmann::json& result) override;

 private:
  LineChannel& channel_;
};

/// Runs every episode of `config` (ICL episodes in sequence) over one channel.
std::vector<EpisodeRecord> serve_channel(LineChannel& channel, const EpisodeConfig& config,
                                         const std::string& id_prefix);

/// Multi-connection server: one thread and one isolated episode per
/// connection; connection k uses seed config.seed + k.
class EpisodeServer {
 public:
  using RecordSink = std::function<void(const std::vector<EpisodeRecord>&)>;

  explicit EpisodeServer(EpisodeConfig config, RecordSink sink = nullptr);
  ~EpisodeServer();
  EpisodeServer(const EpisodeServer&) = delete;
  EpisodeServer& operator=(const EpisodeServer&) = delete;

  /// Binds 127.0.0.1:port (0 picks a free port); returns the bound port.
  int listen_tcp(int port);
  /// Binds a Unix-domain socket at `path` (replacing a stale file).
  void listen_unix(const std::string& path);

  /// Accepts connections until stop() or `max_connections` (0 = unbounded)
  /// have been accepted, then waits for their episodes to finish.
  void serve(int max_connections = 0);
  void stop();

  /// Records of every finished connection, in completion order.
  std::vector<EpisodeRecord> records() const;

 private:
  void handle_connection(int fd, int index);

  EpisodeConfig config_;
  RecordSink sink_;
  int listen_fd_ = -1;
  std::string unix_path_;
  std::atomic<bool> stopping_{false};
  mutable std::mutex mutex_;
  std::vector<EpisodeRecord> records_;
  std::vector<std::thread> workers_;
};

/// Blocking client used by tests and scripted agents.
class WireClient {
 public:
  /// Throws TransportError when the endpoint is unreachable.
  static WireClient connect_tcp(const std::string& host, int port);
  static WireClient connect_unix(const std::string& path);

  WireClient(WireClient&&) noexcept = default;

  /// Next envelope from the server; throws TransportError on EOF.
  nlohmann::json receive();
  void send(std::string_view message);
  /// send() then receive().
  nlohmann::json act(const nlohmann::json& action);

 private:
  explicit WireClient(int fd);
  std::unique_ptr<LineChannel> channel_;
};

}  // namespace madphys::harness
