#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace echolevel::io::mqtt {

// Minimal MQTT 3.1.1 client: CONNECT, SUBSCRIBE, PUBLISH and PINGREQ at QoS 0.

enum PacketType : std::uint8_t {
  kConnect = 1,
  kConnack = 2,
  kPublish = 3,
  kSubscribe = 8,
  kSuback = 9,
  kPingreq = 12,
  kPingresp = 13,
  kDisconnect = 14,
};

struct Packet {
  std::uint8_t type = 0;
  std::uint8_t flags = 0;
  std::string body;
};

struct Message {
  std::string topic;
  std::string payload;
};

std::string encode_remaining_length(std::size_t length);

std::string encode_connect(const std::string& client_id, std::uint16_t keepalive_seconds);
std::string encode_subscribe(std::uint16_t packet_id, const std::string& topic_filter);
std::string encode_publish(const std::string& topic, std::string_view payload);
std::string encode_pingreq();
std::string encode_disconnect();

/// Removes and returns one complete packet from the front of `buffer`, or
/// nothing if more bytes are needed. Throws IoError on a malformed header.
std::optional<Packet> take_packet(std::string& buffer);

Message decode_publish(const Packet& packet);

struct BrokerAddress {
  std::string host;
  std::uint16_t port = 1883;
};

/// Accepts "host", "host:port" and "mqtt://host[:port]".
BrokerAddress parse_broker_address(const std::string& text);

/// Blocking client over a TCP socket. Not thread-safe.
class Client {
 public:
  Client() = default;
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  void connect(const BrokerAddress& address, const std::string& client_id, std::uint16_t keepalive_seconds = 30);
  void subscribe(const std::string& topic_filter);
  void publish(const std::string& topic, std::string_view payload);

  /// Waits up to `timeout` for the next PUBLISH, answering keepalive on the
  /// way. Returns nothing on timeout; throws IoError when the broker closes.
  std::optional<Message> next_message(std::chrono::milliseconds timeout);

  void disconnect();
  bool connected() const { return fd_ >= 0; }

 private:
  void send_all(const std::string& bytes);
  Packet read_packet(std::chrono::milliseconds timeout);
  bool fill(std::chrono::milliseconds timeout);

  int fd_ = -1;
  std::string buffer_;
  std::uint16_t next_packet_id_ = 1;
  std::uint16_t keepalive_seconds_ = 30;
  std::chrono::steady_clock::time_point last_send_{};
};

}  // namespace echolevel::io::mqtt
