#include "gridlayers/serve.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <openssl/evp.h>
#include <openssl/sha.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <istream>
#include <ostream>

#include "gridlayers/error.hpp"

namespace gridlayers {
namespace {

constexpr std::string_view kWebSocketGuid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";

class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  int fd() const { return fd_; }

 private:
  int fd_;
};

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

bool receive_some(int fd, std::string& buffer) {
  std::array<char, 4096> chunk{};
  const ssize_t n = ::recv(fd, chunk.data(), chunk.size(), 0);
  if (n <= 0) return false;
  buffer.append(chunk.data(), static_cast<std::size_t>(n));
  return true;
}

std::string header_value(std::string_view request, std::string_view name) {
  std::size_t pos = 0;
  while (pos < request.size()) {
    std::size_t eol = request.find("\r\n", pos);
    if (eol == std::string_view::npos) eol = request.size();
    const std::string_view line = request.substr(pos, eol - pos);
    const std::size_t colon = line.find(':');
    if (colon != std::string_view::npos && colon == name.size() &&
        std::equal(name.begin(), name.end(), line.begin(),
                   [](char a, char b) { return std::tolower(static_cast<unsigned char>(a)) ==
                                               std::tolower(static_cast<unsigned char>(b)); })) {
      std::string_view v = line.substr(colon + 1);
      while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
      while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
      return std::string(v);
    }
    pos = eol + 2;
  }
  return {};
}

void serve_ndjson(Session& session, int fd, std::string buffer) {
  for (;;) {
    std::size_t eol;
    while ((eol = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, eol);
      buffer.erase(0, eol + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      for (const auto& reply : session.handle_line(line))
        if (!send_all(fd, reply + "\n")) return;
    }
    if (!receive_some(fd, buffer)) break;
  }
  for (const auto& reply : session.flush()) send_all(fd, reply + "\n");
}

void serve_websocket(Session& session, int fd, std::string buffer) {
  std::size_t end;
  while ((end = buffer.find("\r\n\r\n")) == std::string::npos)
    if (!receive_some(fd, buffer)) return;
  const std::string request = buffer.substr(0, end + 2);
  buffer.erase(0, end + 4);
  const std::string key = header_value(request, "Sec-WebSocket-Key");
  if (key.empty()) {
    send_all(fd, "HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\nConnection: close\r\n\r\n");
    return;
  }
  const std::string response = "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                               "Sec-WebSocket-Accept: " +
                               websocket_accept_key(key) + "\r\n\r\n";
  if (!send_all(fd, response)) return;

  std::string message;
  for (;;) {
    while (auto frame = decode_websocket_frame(buffer)) {
      buffer.erase(0, frame->consumed);
      switch (frame->opcode) {
        case 0x8:
          send_all(fd, encode_websocket_frame(frame->payload.substr(0, 2), 0x8));
          for (const auto& reply : session.flush()) send_all(fd, encode_websocket_frame(reply));
          return;
        case 0x9:
          send_all(fd, encode_websocket_frame(frame->payload, 0xA));
          continue;
        case 0xA:
          continue;
        default:
          break;
      }
      message += frame->payload;
      if (!frame->fin) continue;
      std::string_view rest = message;
      while (!rest.empty()) {
        const std::size_t eol = rest.find('\n');
        std::string_view line = rest.substr(0, eol);
        rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        for (const auto& reply : session.handle_line(line))
          if (!send_all(fd, encode_websocket_frame(reply))) return;
      }
      message.clear();
    }
    if (!receive_some(fd, buffer)) break;
  }
}

}  // namespace

std::uint64_t serve_stream(Session& session, std::istream& in, std::ostream& out) {
  std::uint64_t handled = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++handled;
    for (const auto& reply : session.handle_line(line)) out << reply << '\n';
    out.flush();
  }
  for (const auto& reply : session.flush()) out << reply << '\n';
  out.flush();
  return handled;
}

std::string websocket_accept_key(std::string_view client_key) {
  const std::string input = std::string(client_key) + std::string(kWebSocketGuid);
  std::array<unsigned char, SHA_DIGEST_LENGTH> digest{};
  SHA1(reinterpret_cast<const unsigned char*>(input.data()), input.size(), digest.data());
  std::array<unsigned char, 4 * ((SHA_DIGEST_LENGTH + 2) / 3) + 1> encoded{};
  const int n = EVP_EncodeBlock(encoded.data(), digest.data(), SHA_DIGEST_LENGTH);
  return std::string(reinterpret_cast<const char*>(encoded.data()), static_cast<std::size_t>(n));
}

std::string encode_websocket_frame(std::string_view payload, std::uint8_t opcode) {
  std::string out;
  out.push_back(static_cast<char>(0x80 | (opcode & 0x0F)));
  const std::size_t n = payload.size();
  if (n < 126) {
    out.push_back(static_cast<char>(n));
  } else if (n <= 0xFFFF) {
    out.push_back(static_cast<char>(126));
    out.push_back(static_cast<char>((n >> 8) & 0xFF));
    out.push_back(static_cast<char>(n & 0xFF));
  } else {
    out.push_back(static_cast<char>(127));
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((n >> shift) & 0xFF));
  }
  out.append(payload);
  return out;
}

std::optional<WebSocketFrame> decode_websocket_frame(std::string_view buffer) {
  if (buffer.size() < 2) return std::nullopt;
  const auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(buffer[i]); };
  WebSocketFrame frame;
  frame.fin = (byte(0) & 0x80) != 0;
  frame.opcode = byte(0) & 0x0F;
  const bool masked = (byte(1) & 0x80) != 0;
  std::uint64_t length = byte(1) & 0x7F;
  std::size_t pos = 2;
  if (length == 126) {
    if (buffer.size() < 4) return std::nullopt;
    length = (static_cast<std::uint64_t>(byte(2)) << 8) | byte(3);
    pos = 4;
  } else if (length == 127) {
    if (buffer.size() < 10) return std::nullopt;
    length = 0;
    for (std::size_t i = 2; i < 10; ++i) length = (length << 8) | byte(i);
    pos = 10;
  }
  std::array<std::uint8_t, 4> mask{};
  if (masked) {
    if (buffer.size() < pos + 4) return std::nullopt;
    for (std::size_t i = 0; i < 4; ++i) mask[i] = byte(pos + i);
    pos += 4;
  }
  if (buffer.size() - pos < length) return std::nullopt;
  frame.payload.assign(buffer.substr(pos, static_cast<std::size_t>(length)));
  if (masked)
    for (std::size_t i = 0; i < frame.payload.size(); ++i)
      frame.payload[i] = static_cast<char>(static_cast<std::uint8_t>(frame.payload[i]) ^ mask[i % 4]);
  frame.consumed = pos + static_cast<std::size_t>(length);
  return frame;
}

void serve_tcp(const std::function<Session()>& make_session, const ServeOptions& options) {
  Socket listener(::socket(AF_INET, SOCK_STREAM, 0));
  if (listener.fd() < 0) throw Error(ErrorCode::Io, std::string("socket: ") + std::strerror(errno));
  const int yes = 1;
  ::setsockopt(listener.fd(), SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(options.port));
  if (::inet_pton(AF_INET, options.host.c_str(), &addr.sin_addr) != 1)
    throw Error(ErrorCode::Io, "bad listen address '" + options.host + "'");
  if (::bind(listener.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
    throw Error(ErrorCode::Io, "cannot bind port " + std::to_string(options.port) + ": " + std::strerror(errno));
  if (::listen(listener.fd(), 4) != 0) throw Error(ErrorCode::Io, std::string("listen: ") + std::strerror(errno));
  socklen_t len = sizeof addr;
  ::getsockname(listener.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  if (options.on_listening) options.on_listening(ntohs(addr.sin_port));

  for (int served = 0; options.max_clients == 0 || served < options.max_clients; ++served) {
    Socket client(::accept(listener.fd(), nullptr, nullptr));
    if (client.fd() < 0) continue;
    Session session = make_session();
    std::string buffer;
    while (buffer.size() < 4 && buffer.find('\n') == std::string::npos && receive_some(client.fd(), buffer)) {
    }
    if (buffer.rfind("GET ", 0) == 0) serve_websocket(session, client.fd(), std::move(buffer));
    else serve_ndjson(session, client.fd(), std::move(buffer));
  }
}

}  // namespace gridlayers
