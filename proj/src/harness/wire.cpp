#include "madphys/harness/wire.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>

#include "madphys/core/error.hpp"

namespace madphys::harness {

using nlohmann::json;

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw TransportError(what + ": " + std::strerror(errno));
}

void ignore_sigpipe() {
  static const bool once = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

}  // namespace

LineChannel::LineChannel(int read_fd, int write_fd, bool owns) : read_fd_(read_fd), write_fd_(write_fd), owns_(owns) {
  ignore_sigpipe();
}

LineChannel::~LineChannel() { close(); }

void LineChannel::close() {
  if (owns_) {
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  }
  read_fd_ = write_fd_ = -1;
}

std::optional<std::string> LineChannel::read_line() {
  for (;;) {
    if (const auto pos = buffer_.find('\n'); pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (read_fd_ < 0) return std::nullopt;
    char chunk[4096];
    const ssize_t got = ::read(read_fd_, chunk, sizeof chunk);
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) {
      if (buffer_.empty()) return std::nullopt;
      std::string line = std::move(buffer_);
      buffer_.clear();
      return line;
    }
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

bool LineChannel::write_line(std::string_view line) {
  if (write_fd_ < 0) return false;
  std::string data(line);
  data.push_back('\n');
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::write(write_fd_, data.data() + sent, data.size() - sent);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

std::optional<std::string> ChannelAgent::respond(const json& envelope) {
  if (!channel_.write_line(envelope.dump())) return std::nullopt;
  return channel_.read_line();
}

void ChannelAgent::finish(const json& result) { channel_.write_line(result.dump()); }

std::vector<EpisodeRecord> serve_channel(LineChannel& channel, const EpisodeConfig& config,
                                         const std::string& id_prefix) {
  ChannelAgent agent(channel);
  return run_trials(config, agent, id_prefix);
}

EpisodeServer::EpisodeServer(EpisodeConfig config, RecordSink sink)
    : config_(std::move(config)), sink_(std::move(sink)) {
  config_.validate();
  ignore_sigpipe();
}

EpisodeServer::~EpisodeServer() {
  stop();
  for (auto& w : workers_)
    if (w.joinable()) w.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
  if (!unix_path_.empty()) ::unlink(unix_path_.c_str());
}

int EpisodeServer::listen_tcp(int port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw_errno("socket");
  const int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) throw_errno("bind");
  if (::listen(listen_fd_, 16) < 0) throw_errno("listen");
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

void EpisodeServer::listen_unix(const std::string& path) {
  sockaddr_un addr{};
  if (path.size() >= sizeof addr.sun_path) throw ConfigError("socket path too long: " + path);
  listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw_errno("socket");
  ::unlink(path.c_str());
  addr.sun_family = AF_UNIX;
  std::strncpy(addr.sun_path, path.c_str(), sizeof addr.sun_path - 1);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) throw_errno("bind");
  if (::listen(listen_fd_, 16) < 0) throw_errno("listen");
  unix_path_ = path;
}

void EpisodeServer::serve(int max_connections) {
  if (listen_fd_ < 0) throw ConfigError("EpisodeServer::serve called before listen");
  int accepted = 0;
  while (!stopping_ && (max_connections <= 0 || accepted < max_connections)) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, 100);
    if (ready < 0 && errno != EINTR) throw_errno("poll");
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      throw_errno("accept");
    }
    workers_.emplace_back(&EpisodeServer::handle_connection, this, fd, accepted++);
  }
  for (auto& w : workers_)
    if (w.joinable()) w.join();
}

void EpisodeServer::stop() { stopping_ = true; }

std::vector<EpisodeRecord> EpisodeServer::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

void EpisodeServer::handle_connection(int fd, int index) {
  LineChannel channel(fd, fd);
  EpisodeConfig config = config_;
  config.seed = config_.seed + static_cast<std::uint64_t>(index);
  std::vector<EpisodeRecord> records;
  try {
    records = serve_channel(channel, config, "session-" + std::to_string(index));
  } catch (const std::exception& e) {
    channel.write_line(envelope("error", {{"code", "internal"}, {"message", e.what()}}).dump());
    return;
  }
  channel.close();
  std::lock_guard lock(mutex_);
  if (sink_) sink_(records);
  records_.insert(records_.end(), records.begin(), records.end());
}

WireClient::WireClient(int fd) : channel_(std::make_unique<LineChannel>(fd, fd)) {}

WireClient WireClient::connect_tcp(const std::string& host, int port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw_errno("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw TransportError("invalid address: " + host);
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    const int err = errno;
    ::close(fd);
    errno = err;
    throw_errno("connect " + host + ":" + std::to_string(port));
  }
  return WireClient(fd);
}

WireClient WireClient::connect_unix(const std::string& path) {
  sockaddr_un addr{};
  if (path.size() >= sizeof addr.sun_path) throw TransportError("socket path too long: " + path);
  const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) throw_errno("socket");
  addr.sun_family = AF_UNIX;
  std::strncpy(addr.sun_path, path.c_str(), sizeof addr.sun_path - 1);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    const int err = errno;
    ::close(fd);
    errno = err;
    throw_errno("connect " + path);
  }
  return WireClient(fd);
}

json WireClient::receive() {
  auto line = channel_->read_line();
  if (!line) throw TransportError("server closed the connection");
  return json::parse(*line);
}

void WireClient::send(std::string_view message) {
  if (!channel_->write_line(message)) throw TransportError("server closed the connection");
}

json WireClient::act(const json& action) {
  send(action.dump());
  return receive();
}

}  // namespace madphys::harness
