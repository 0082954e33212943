#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "gridlayers/session.hpp"

namespace gridlayers {

/// Runs a session over line streams until the input ends. Returns the
/// number of inbound lines handled.
std::uint64_t serve_stream(Session& session, std::istream& in, std::ostream& out);

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks an ephemeral port
  /// Clients to serve before returning; 0 serves forever.
  int max_clients = 0;
  /// Called once the socket listens, with the bound port.
  std::function<void(int)> on_listening;
};

/// Listens on TCP and serves one client at a time, each with a fresh
/// session from `make_session`. A client whose first bytes are an HTTP GET
/// is upgraded to a websocket carrying one message per text frame;
/// otherwise the connection speaks raw NDJSON. Throws Error(Io) when the
/// socket cannot be bound.
void serve_tcp(const std::function<Session()>& make_session, const ServeOptions& options);

/// Sec-WebSocket-Accept value for a client key.
std::string websocket_accept_key(std::string_view client_key);

/// Encodes one unmasked server frame.
std::string encode_websocket_frame(std::string_view payload, std::uint8_t opcode = 0x1);

struct WebSocketFrame {
  std::uint8_t opcode = 0;
  bool fin = true;
  std::string payload;
  std::size_t consumed = 0;  // bytes of the buffer this frame occupied
};

/// Decodes the first complete frame in `buffer` (masked or not); nullopt
/// when more bytes are needed.
std::optional<WebSocketFrame> decode_websocket_frame(std::string_view buffer);

}  // namespace gridlayers
