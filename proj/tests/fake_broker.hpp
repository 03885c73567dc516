#pragma once

// Single-client MQTT broker stand-in for tests: answers CONNECT and
// SUBSCRIBE, publishes a fixed list of messages, then waits for the client to
// disconnect.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "echolevel/io/mqtt.hpp"

namespace fixture {

class FakeBroker {
 public:
  explicit FakeBroker(std::vector<echolevel::io::mqtt::Message> messages) : messages_(std::move(messages)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 1) != 0) {
      throw std::runtime_error("fake broker cannot listen");
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this] { serve(); });
  }

  ~FakeBroker() {
    thread_.join();
    ::close(listen_fd_);
  }

  std::uint16_t port() const { return port_; }
  // Packet types received from the client, in order. Valid after destruction
  // has joined the thread, or once the client has disconnected.
  const std::vector<std::uint8_t>& received() const { return received_; }
  const std::string& subscribed_filter() const { return filter_; }
  const std::string& client_id() const { return client_id_; }

 private:
  void serve() {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) return;
    std::string buffer;
    namespace mqtt = echolevel::io::mqtt;
    auto next = [&]() -> std::optional<mqtt::Packet> {
      while (true) {
        if (auto p = mqtt::take_packet(buffer)) return p;
        char chunk[4096];
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n <= 0) return std::nullopt;
        buffer.append(chunk, static_cast<std::size_t>(n));
      }
    };
    auto send = [&](const std::string& bytes) { ::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL); };
    while (auto p = next()) {
      received_.push_back(p->type);
      if (p->type == mqtt::kConnect) {
        // Body: "MQTT" string (6), level, flags, keepalive (2), client id.
        client_id_ = p->body.substr(12);
        send(std::string("\x20\x02\x00\x00", 4));
      } else if (p->type == mqtt::kSubscribe) {
        const std::size_t len = (static_cast<unsigned char>(p->body[2]) << 8) | static_cast<unsigned char>(p->body[3]);
        filter_ = p->body.substr(4, len);
        // A retained message ahead of the SUBACK must be ignored by the client.
        send(mqtt::encode_publish("retained/old", "{}"));
        send(std::string("\x90\x03", 2) + p->body.substr(0, 2) + std::string(1, '\0'));
        for (const auto& m : messages_) send(mqtt::encode_publish(m.topic, m.payload));
      } else if (p->type == mqtt::kPingreq) {
        send(std::string("\xD0\x00", 2));
      } else if (p->type == mqtt::kDisconnect) {
        break;
      }
    }
    ::close(fd);
  }

  std::vector<echolevel::io::mqtt::Message> messages_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::thread thread_;
  std::vector<std::uint8_t> received_;
  std::string filter_;
  std::string client_id_;
};

}  // namespace fixture
