#include "echolevel/io/mqtt.hpp"

#include <cerrno>
#include <cstring>

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "echolevel/error.hpp"

namespace echolevel::io::mqtt {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v >> 8);
  out += static_cast<char>(v & 0xFF);
}

void put_string(std::string& out, std::string_view s) {
  if (s.size() > 0xFFFF) throw InputError("MQTT string longer than 65535 bytes");
  put_u16(out, static_cast<std::uint16_t>(s.size()));
  out += s;
}

std::string packet(std::uint8_t first_byte, const std::string& body) {
  return static_cast<char>(first_byte) + encode_remaining_length(body.size()) + body;
}

std::uint16_t get_u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>((static_cast<unsigned char>(b[at]) << 8) | static_cast<unsigned char>(b[at + 1]));
}

}  // namespace

std::string encode_remaining_length(std::size_t length) {
  if (length > 268'435'455) throw InputError("MQTT packet too large");
  std::string out;
  do {
    auto byte = static_cast<std::uint8_t>(length % 128);
    length /= 128;
    if (length > 0) byte |= 0x80;
    out += static_cast<char>(byte);
  } while (length > 0);
  return out;
}

std::string encode_connect(const std::string& client_id, std::uint16_t keepalive_seconds) {
  std::string body;
  put_string(body, "MQTT");
  body += static_cast<char>(4);     // protocol level 3.1.1
  body += static_cast<char>(0x02);  // clean session
  put_u16(body, keepalive_seconds);
  put_string(body, client_id);
  return packet(kConnect << 4, body);
}

std::string encode_subscribe(std::uint16_t packet_id, const std::string& topic_filter) {
  std::string body;
  put_u16(body, packet_id);
  put_string(body, topic_filter);
  body += static_cast<char>(0);  // QoS 0
  return packet(static_cast<std::uint8_t>((kSubscribe << 4) | 0x02), body);
}

std::string encode_publish(const std::string& topic, std::string_view payload) {
  std::string body;
  put_string(body, topic);
  body += payload;
  return packet(kPublish << 4, body);
}

std::string encode_pingreq() { return packet(kPingreq << 4, ""); }
std::string encode_disconnect() { return packet(kDisconnect << 4, ""); }

std::optional<Packet> take_packet(std::string& buffer) {
  if (buffer.size() < 2) return std::nullopt;
  std::size_t length = 0;
  std::size_t multiplier = 1;
  std::size_t at = 1;
  while (true) {
    if (at >= buffer.size()) return std::nullopt;
    if (at > 4) throw IoError("malformed MQTT remaining length");
    const auto byte = static_cast<unsigned char>(buffer[at++]);
    length += (byte & 0x7F) * multiplier;
    multiplier *= 128;
    if (!(byte & 0x80)) break;
  }
  if (buffer.size() < at + length) return std::nullopt;
  Packet p;
  p.type = static_cast<std::uint8_t>(static_cast<unsigned char>(buffer[0]) >> 4);
  p.flags = static_cast<std::uint8_t>(buffer[0] & 0x0F);
  p.body = buffer.substr(at, length);
  buffer.erase(0, at + length);
  return p;
}

Message decode_publish(const Packet& p) {
  if (p.type != kPublish) throw IoError("expected a PUBLISH packet");
  if (p.body.size() < 2) throw IoError("truncated PUBLISH packet");
  const std::size_t topic_len = get_u16(p.body, 0);
  std::size_t at = 2 + topic_len;
  if ((p.flags >> 1) & 0x03) at += 2;  // packet id for QoS 1/2
  if (at > p.body.size()) throw IoError("truncated PUBLISH packet");
  return {p.body.substr(2, topic_len), p.body.substr(at)};
}

BrokerAddress parse_broker_address(const std::string& text) {
  std::string rest = text;
  if (rest.rfind("mqtt://", 0) == 0) rest = rest.substr(7);
  while (!rest.empty() && rest.back() == '/') rest.pop_back();
  if (rest.empty()) throw ConfigError("broker address is empty");
  BrokerAddress addr;
  const auto colon = rest.rfind(':');
  if (colon == std::string::npos) {
    addr.host = rest;
    return addr;
  }
  addr.host = rest.substr(0, colon);
  const std::string port = rest.substr(colon + 1);
  unsigned long value = 0;
  try {
    std::size_t used = 0;
    value = std::stoul(port, &used);
    if (used != port.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ConfigError("broker port '" + port + "' is not a number");
  }
  if (value == 0 || value > 65535 || addr.host.empty()) throw ConfigError("broker address '" + text + "' is invalid");
  addr.port = static_cast<std::uint16_t>(value);
  return addr;
}

Client::~Client() {
  if (fd_ >= 0) ::close(fd_);
}

void Client::connect(const BrokerAddress& address, const std::string& client_id, std::uint16_t keepalive_seconds) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string port = std::to_string(address.port);
  if (const int rc = ::getaddrinfo(address.host.c_str(), port.c_str(), &hints, &found); rc != 0) {
    throw IoError("cannot resolve broker '" + address.host + "': " + ::gai_strerror(rc));
  }
  for (addrinfo* ai = found; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  ::freeaddrinfo(found);
  if (fd_ < 0) throw IoError("cannot connect to broker " + address.host + ":" + port);

  keepalive_seconds_ = keepalive_seconds;
  send_all(encode_connect(client_id, keepalive_seconds));
  const Packet ack = read_packet(std::chrono::seconds(10));
  if (ack.type != kConnack || ack.body.size() < 2) throw IoError("broker did not answer CONNECT with CONNACK");
  if (ack.body[1] != 0) {
    throw IoError("broker refused the connection (return code " + std::to_string(static_cast<int>(ack.body[1])) + ")");
  }
}

void Client::subscribe(const std::string& topic_filter) {
  const std::uint16_t id = next_packet_id_++;
  if (next_packet_id_ == 0) next_packet_id_ = 1;
  send_all(encode_subscribe(id, topic_filter));
  while (true) {
    const Packet p = read_packet(std::chrono::seconds(10));
    if (p.type == kPublish) {
      // Retained messages may arrive before the SUBACK; they are dropped.
      continue;
    }
    if (p.type != kSuback || p.body.size() < 3 || get_u16(p.body, 0) != id) {
      throw IoError("broker did not answer SUBSCRIBE with SUBACK");
    }
    if (static_cast<unsigned char>(p.body[2]) == 0x80) throw IoError("broker rejected subscription '" + topic_filter + "'");
    return;
  }
}

void Client::publish(const std::string& topic, std::string_view payload) { send_all(encode_publish(topic, payload)); }

std::optional<Message> Client::next_message(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    while (auto p = take_packet(buffer_)) {
      if (p->type == kPublish) return decode_publish(*p);
      // PINGRESP and anything else unexpected at QoS 0 are ignored.
    }
    const auto now = std::chrono::steady_clock::now();
    if (keepalive_seconds_ > 0 && now - last_send_ >= std::chrono::seconds(keepalive_seconds_) / 2) {
      send_all(encode_pingreq());
    }
    if (now >= deadline) return std::nullopt;
    auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
    if (keepalive_seconds_ > 0) wait = std::min<std::chrono::milliseconds>(wait, std::chrono::seconds(1));
    fill(wait);
  }
}

void Client::disconnect() {
  if (fd_ < 0) return;
  try {
    send_all(encode_disconnect());
  } catch (const IoError&) {
  }
  ::close(fd_);
  fd_ = -1;
}

void Client::send_all(const std::string& bytes) {
  if (fd_ < 0) throw IoError("not connected to a broker");
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("send to broker failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
  last_send_ = std::chrono::steady_clock::now();
}

bool Client::fill(std::chrono::milliseconds timeout) {
  pollfd pfd{fd_, POLLIN, 0};
  const int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (ready < 0) {
    if (errno == EINTR) return false;
    throw IoError(std::string("poll failed: ") + std::strerror(errno));
  }
  if (ready == 0) return false;
  char chunk[4096];
  const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
  if (n < 0) {
    if (errno == EINTR) return false;
    throw IoError(std::string("receive from broker failed: ") + std::strerror(errno));
  }
  if (n == 0) throw IoError("broker closed the connection");
  buffer_.append(chunk, static_cast<std::size_t>(n));
  return true;
}

Packet Client::read_packet(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    if (auto p = take_packet(buffer_)) return *p;
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) throw IoError("timed out waiting for the broker");
    fill(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now));
  }
}

}  // namespace echolevel::io::mqtt
