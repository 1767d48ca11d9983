#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "plcsim/runtime/command.hpp"
#include "plcsim/runtime/snapshot.hpp"

namespace plcsim::gateway {

/// The only write path into a runtime, typically bound to Runtime::enqueue.
using CommandProducer = std::function<EnqueueResult(CommandBody, CommandSource)>;

struct GatewayOptions {
  std::string host = "127.0.0.1";
  /// 0 picks a free port; see Gateway::port().
  std::uint16_t port = 0;
  /// Status cadence in ticks. State and mode changes are sent immediately.
  int status_every = 5;
  /// Messages a client may have in flight before it is dropped.
  std::size_t max_queued = 512;
  /// Longer input lines are a protocol violation.
  std::size_t max_line = 64 * 1024;
  /// Time a new client has to start a WebSocket upgrade before it is served
  /// plain NDJSON.
  int detect_ms = 150;
};

/// "host:port" or ":port" or "port". Throws std::invalid_argument.
GatewayOptions parse_endpoint(const std::string& text, GatewayOptions base = {});

/// Serves the v1 wire protocol as newline-delimited JSON over TCP. A client
/// whose first bytes are "GET " is upgraded to WebSocket with one message per
/// text frame. Runs one I/O thread of its own.
class Gateway {
 public:
  Gateway(CommandProducer producer, GatewayOptions options = {});
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Binds and starts the I/O thread. Throws std::system_error.
  void start();
  void stop();

  [[nodiscard]] std::uint16_t port() const;
  [[nodiscard]] std::size_t client_count() const;

  /// Called from the scan thread after every scan. Never blocks on clients.
  void publish(const Snapshot& snapshot);
  void publish(std::shared_ptr<const Snapshot> snapshot);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace plcsim::gateway
