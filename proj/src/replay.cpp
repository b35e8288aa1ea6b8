/* Copyright 2026 The civic Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "civic/replay.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <exception>
#include <thread>
#include <vector>

#include "civic/error.hpp"

namespace civic::replay {

namespace {

class UdpSocket {
 public:
  UdpSocket() : fd_(::socket(AF_INET, SOCK_DGRAM, 0)) {
    if (fd_ < 0) throw ReplayError(std::string("socket: ") + std::strerror(errno));
    int size = 4 << 20;
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &size, sizeof(size));
    ::setsockopt(fd_, SOL_SOCKET, SO_SNDBUF, &size, sizeof(size));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      ::close(fd_);
      throw ReplayError(std::string("bind: ") + std::strerror(errno));
    }
    socklen_t len = sizeof(address_);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&address_), &len);
  }
  ~UdpSocket() { ::close(fd_); }
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;

  void set_timeout(std::chrono::milliseconds t) {
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(t.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((t.count() % 1000) * 1000);
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  }

  void send_to(const UdpSocket& dst, std::span<const std::uint8_t> bytes) {
    const ssize_t n = ::sendto(fd_, bytes.data(), bytes.size(), 0,
                               reinterpret_cast<const sockaddr*>(&dst.address_), sizeof(dst.address_));
    if (n != static_cast<ssize_t>(bytes.size())) {
      throw ReplayError(std::string("sendto: ") + std::strerror(errno));
    }
  }

  /// Empty result on timeout.
  std::optional<wire::Bytes> receive() {
    wire::Bytes buf(2048);
    const ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) return std::nullopt;
      throw ReplayError(std::string("recv: ") + std::strerror(errno));
    }
    buf.resize(static_cast<std::size_t>(n));
    return buf;
  }

 private:
  int fd_;
  sockaddr_in address_{};
};

trace::Trace socket_replay(const trace::Trace& input, const validator::ValidatorSpec& spec,
                           const SocketOptions& options) {
  const std::size_t count = input.records.size();
  UdpSocket sender;
  UdpSocket switch_port;
  UdpSocket capture;
  switch_port.set_timeout(options.receive_timeout);
  capture.set_timeout(options.receive_timeout);

  std::vector<wire::Bytes> captured;
  std::exception_ptr switch_error;
  std::exception_ptr capture_error;

  // Switch: label and forward whatever arrives.
  std::thread switch_thread([&] {
    try {
      validator::Validator v(spec);
      for (std::size_t handled = 0; handled < count;) {
        auto pkt = switch_port.receive();
        if (!pkt) return;  // sender finished or lost packets; capture reports it
        ++handled;
        if (auto out = v.on_packet(*pkt)) switch_port.send_to(capture, *out);
      }
    } catch (...) {
      switch_error = std::current_exception();
    }
  });

  std::thread capture_thread([&] {
    try {
      while (captured.size() < count) {
        auto pkt = capture.receive();
        if (!pkt) return;
        captured.push_back(std::move(*pkt));
      }
    } catch (...) {
      capture_error = std::current_exception();
    }
  });

  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t t0 = count ? input.records.front().message.timestamp_us : 0;
  try {
    for (const trace::TraceRecord& r : input.records) {
      if (!options.fast) {
        std::this_thread::sleep_until(
            start + std::chrono::microseconds(r.message.timestamp_us - t0));
      }
      sender.send_to(switch_port, wire::encode(r.message));
    }
  } catch (...) {
    switch_thread.join();
    capture_thread.join();
    throw;
  }
  switch_thread.join();
  capture_thread.join();
  if (switch_error) std::rethrow_exception(switch_error);
  if (capture_error) std::rethrow_exception(capture_error);
  if (captured.size() != count) {
    throw ReplayError("socket replay lost packets: sent " + std::to_string(count) + ", captured " +
                      std::to_string(captured.size()));
  }

  trace::Trace out = input;
  for (std::size_t i = 0; i < count; ++i) {
    const auto [base, label] = wire::strip_label(captured[i]);
    if (wire::decode(base) != input.records[i].message) {
      throw ReplayError("socket replay reordered or corrupted packet " + std::to_string(i));
    }
    out.records[i].label = label;
  }
  return out;
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::InProcess ? "in-process" : "socket"; }

Mode parse_mode(std::string_view name) {
  if (name == "in-process") return Mode::InProcess;
  if (name == "socket" || name == "socket-replay") return Mode::Socket;
  throw ConfigError("unknown replay mode '" + std::string(name) + "'");
}

trace::Trace replay_through(const trace::Trace& input, validator::Validator& v) {
  trace::Trace out = input;
  for (trace::TraceRecord& r : out.records) {
    const auto labeled = v.on_packet(wire::encode(r.message));
    if (!labeled) throw ReplayError("validator dropped record " + std::to_string(r.message.seq));
    r.label = wire::decode_label(*labeled);
  }
  return out;
}

trace::Trace replay(const trace::Trace& trace, const validator::ValidatorSpec& spec, Mode mode,
                    const SocketOptions& options) {
  if (trace.header.scenario != spec.scenario) {
    throw ReplayError("validator spec scenario does not match trace '" + trace.header.run_id + "'");
  }
  if (mode == Mode::Socket) return socket_replay(trace, spec, options);
  validator::Validator v(spec);
  return replay_through(trace, v);
}

}  // namespace civic::replay
