#include "plcsim/gateway/gateway.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "plcsim/gateway/wire.hpp"

namespace plcsim::gateway {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = boost::beast::http;
namespace ws = boost::beast::websocket;
using tcp = asio::ip::tcp;
using boost::system::error_code;

GatewayOptions parse_endpoint(const std::string& text, GatewayOptions base) {
  std::string host = base.host;
  std::string port = text;
  if (const auto colon = text.rfind(':'); colon != std::string::npos) {
    if (colon > 0) host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  unsigned value = 0;
  const auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (port.empty() || ec != std::errc() || end != port.data() + port.size() || value > 65535) {
    throw std::invalid_argument("bad endpoint '" + text + "': expected host:port");
  }
  base.host = host;
  base.port = static_cast<std::uint16_t>(value);
  return base;
}

namespace {

using Line = std::shared_ptr<const std::string>;

class Hub;

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(Hub& hub, std::size_t max_queued) : hub_(hub), max_queued_(max_queued) {}
  virtual ~Session() = default;

  virtual void start(std::string leftover) = 0;

  void deliver(Line line);
  void close();
  [[nodiscard]] bool closed() const { return closed_; }
  bool greeted = false;

 protected:
  virtual void write_front() = 0;
  virtual void shutdown_transport() = 0;
  void on_written(const error_code& ec);
  void on_line(std::string_view line);

  Hub& hub_;
  std::deque<Line> out_;
  bool closed_ = false;

 private:
  std::size_t max_queued_;
  bool writing_ = false;
};

class Hub {
 public:
  Hub(asio::io_context& io, CommandProducer producer, const GatewayOptions& options)
      : io_(io), producer_(std::move(producer)), options_(options) {}

  void add(const std::shared_ptr<Session>& s) {
    sessions_.insert(s);
    ++count_;
    if (latest_) greet(*s);
  }

  void remove(const std::shared_ptr<Session>& s) {
    if (sessions_.erase(s)) --count_;
  }

  void on_command(const std::shared_ptr<Session>& s, std::string_view line) {
    wire::WireCommand wc;
    try {
      wc = wire::decode_command(line);
    } catch (const wire::InvalidCommand& e) {
      reply(*s, wire::AckMessage{e.command_id, false, std::string("invalid command: ") + e.what()});
      return;
    } catch (const wire::ProtocolError&) {
      s->close();
      return;
    }
    if (!wire::allowed_on_wire(wc.command)) {
      reply(*s, wire::AckMessage{wc.command_id, false,
                                 "not allowed on the wire: " + std::string(command_kind(wc.command))});
      return;
    }
    const auto res = producer_(wc.command, CommandSource::HMI);
    if (!res.accepted) {
      reply(*s, wire::AckMessage{wc.command_id, false, res.reason});
      return;
    }
    pending_[res.id] = {s, wc.command_id};
  }

  void on_snapshot(const std::shared_ptr<const Snapshot>& snap) {
    for (const auto& c : snap->commands) {
      const auto it = pending_.find(c.id);
      if (it == pending_.end()) continue;
      if (auto s = it->second.first.lock()) {
        std::optional<std::string> reason;
        if (!c.accepted || !c.reason.empty()) reason = c.reason;
        reply(*s, wire::AckMessage{it->second.second, c.accepted, reason});
      }
      pending_.erase(it);
    }

    const bool errors_changed = !latest_ || latest_->errors != snap->errors;
    const bool status_due = !latest_ || snap->tick % options_.status_every == 0 ||
                            latest_->machine_state != snap->machine_state || latest_->mode != snap->mode;
    latest_ = snap;
    Line errors;
    Line status;
    if (errors_changed) errors = encode(wire::errors_from(*snap));
    if (status_due) status = encode(wire::status_from(*snap));

    for (const auto& s : std::vector<std::shared_ptr<Session>>(sessions_.begin(), sessions_.end())) {
      if (!s->greeted) {
        greet(*s);
        continue;
      }
      if (errors) s->deliver(errors);
      if (status) s->deliver(status);
    }
  }

  void close_all() {
    for (const auto& s : std::vector<std::shared_ptr<Session>>(sessions_.begin(), sessions_.end())) s->close();
    sessions_.clear();
    count_ = 0;
  }

  [[nodiscard]] std::size_t count() const { return count_; }
  [[nodiscard]] const GatewayOptions& options() const { return options_; }
  asio::io_context& io() { return io_; }

 private:
  static Line encode(const wire::Message& m) { return std::make_shared<const std::string>(wire::encode(m)); }

  void greet(Session& s) {
    s.greeted = true;
    s.deliver(encode(wire::status_from(*latest_)));
    s.deliver(encode(wire::errors_from(*latest_)));
  }

  void reply(Session& s, wire::AckMessage ack) { s.deliver(encode(ack)); }

  asio::io_context& io_;
  CommandProducer producer_;
  GatewayOptions options_;
  std::set<std::shared_ptr<Session>> sessions_;
  std::atomic<std::size_t> count_{0};
  std::shared_ptr<const Snapshot> latest_;
  std::map<std::uint64_t, std::pair<std::weak_ptr<Session>, std::uint64_t>> pending_;
};

void Session::deliver(Line line) {
  if (closed_) return;
  if (out_.size() >= max_queued_) {
    close();
    return;
  }
  out_.push_back(std::move(line));
  if (!writing_) {
    writing_ = true;
    write_front();
  }
}

void Session::on_written(const error_code& ec) {
  if (ec || closed_) {
    writing_ = false;
    close();
    return;
  }
  out_.pop_front();
  if (out_.empty() || closed_) {
    writing_ = false;
    return;
  }
  write_front();
}

void Session::close() {
  if (closed_) return;
  closed_ = true;
  shutdown_transport();
  hub_.remove(shared_from_this());
}

void Session::on_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.empty()) return;
  hub_.on_command(shared_from_this(), line);
}

class TcpSession final : public Session {
 public:
  TcpSession(Hub& hub, tcp::socket socket)
      : Session(hub, hub.options().max_queued), socket_(std::move(socket)) {}

  void start(std::string leftover) override {
    pending_ = std::move(leftover);
    if (!consume()) return;
    read();
  }

 private:
  void read() {
    socket_.async_read_some(asio::buffer(chunk_),
                            [self = std::static_pointer_cast<TcpSession>(shared_from_this())](error_code ec,
                                                                                              std::size_t n) {
                              if (ec || self->closed()) {
                                self->close();
                                return;
                              }
                              self->pending_.append(self->chunk_.data(), n);
                              if (self->consume()) self->read();
                            });
  }

  /// False once the session is closed.
  bool consume() {
    std::size_t start = 0;
    for (auto nl = pending_.find('\n'); nl != std::string::npos; nl = pending_.find('\n', start)) {
      on_line(std::string_view(pending_).substr(start, nl - start));
      if (closed()) return false;
      start = nl + 1;
    }
    pending_.erase(0, start);
    if (pending_.size() > hub_.options().max_line) {
      close();
      return false;
    }
    return true;
  }

  void write_front() override {
    const std::array<asio::const_buffer, 2> bufs{asio::buffer(*out_.front()), asio::buffer("\n", 1)};
    asio::async_write(socket_, bufs, [self = shared_from_this()](error_code ec, std::size_t) {
      static_cast<TcpSession&>(*self).on_written(ec);
    });
  }

  void shutdown_transport() override {
    error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
  }

  tcp::socket socket_;
  std::array<char, 4096> chunk_{};
  std::string pending_;
};

class WsSession final : public Session {
 public:
  WsSession(Hub& hub, tcp::socket socket) : Session(hub, hub.options().max_queued), ws_(std::move(socket)) {}

  /// `leftover` holds the start of the HTTP upgrade request.
  void start(std::string leftover) override {
    auto buf = asio::buffer_copy(buffer_.prepare(leftover.size()), asio::buffer(leftover));
    buffer_.commit(buf);
    http::async_read(ws_.next_layer(), buffer_, request_,
                     [self = std::static_pointer_cast<WsSession>(shared_from_this())](error_code ec, std::size_t) {
                       if (ec || self->closed()) {
                         self->close();
                         return;
                       }
                       if (!ws::is_upgrade(self->request_)) {
                         self->close();
                         return;
                       }
                       self->ws_.text(true);
                       self->ws_.read_message_max(self->hub_.options().max_line);
                       self->ws_.async_accept(self->request_, [self](error_code ec2) {
                         if (ec2) {
                           self->close();
                           return;
                         }
                         self->accepted_ = true;
                         if (!self->out_.empty()) self->write_front();
                         self->read();
                       });
                     });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = std::static_pointer_cast<WsSession>(shared_from_this())](error_code ec,
                                                                                               std::size_t) {
      if (ec || self->closed()) {
        self->close();
        return;
      }
      const std::string frame = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      std::size_t start = 0;
      while (start <= frame.size()) {
        const auto nl = frame.find('\n', start);
        const auto end = nl == std::string::npos ? frame.size() : nl;
        self->on_line(std::string_view(frame).substr(start, end - start));
        if (self->closed()) return;
        if (nl == std::string::npos) break;
        start = nl + 1;
      }
      self->read();
    });
  }

  void write_front() override {
    if (!accepted_) return;
    ws_.async_write(asio::buffer(*out_.front()), [self = shared_from_this()](error_code ec, std::size_t) {
      static_cast<WsSession&>(*self).on_written(ec);
    });
  }

  void shutdown_transport() override {
    error_code ignored;
    beast::get_lowest_layer(ws_).shutdown(tcp::socket::shutdown_both, ignored);
    beast::get_lowest_layer(ws_).close(ignored);
  }

  ws::stream<tcp::socket> ws_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  bool accepted_ = false;
};

/// Reads until the transport can be told apart, then hands the socket over.
/// A client that stays silent for detect_ms is a plain NDJSON listener.
class Detector : public std::enable_shared_from_this<Detector> {
 public:
  Detector(Hub& hub, tcp::socket socket) : hub_(hub), socket_(std::move(socket)), timer_(hub.io()) {}

  void run() {
    timer_.expires_after(std::chrono::milliseconds(hub_.options().detect_ms));
    timer_.async_wait([self = shared_from_this()](error_code ec) {
      if (!ec && !self->done_) self->hand_over(false);
    });
    read();
  }

 private:
  void read() {
    socket_.async_read_some(asio::buffer(chunk_), [self = shared_from_this()](error_code ec, std::size_t n) {
      if (self->done_) return;
      if (ec) {
        self->done_ = true;
        self->timer_.cancel();
        return;
      }
      self->seen_.append(self->chunk_.data(), n);
      self->decide();
    });
  }

  void decide() {
    static constexpr std::string_view kGet = "GET ";
    const auto n = std::min(seen_.size(), kGet.size());
    const bool could_be_get = std::string_view(seen_).substr(0, n) == kGet.substr(0, n);
    if (could_be_get && seen_.size() < kGet.size()) {
      read();
      return;
    }
    hand_over(could_be_get);
  }

  void hand_over(bool websocket) {
    done_ = true;
    timer_.cancel();
    error_code ignored;
    socket_.cancel(ignored);
    std::shared_ptr<Session> s;
    if (websocket) {
      s = std::make_shared<WsSession>(hub_, std::move(socket_));
    } else {
      s = std::make_shared<TcpSession>(hub_, std::move(socket_));
    }
    hub_.add(s);
    s->start(std::move(seen_));
  }

  Hub& hub_;
  tcp::socket socket_;
  asio::steady_timer timer_;
  std::array<char, 1024> chunk_{};
  std::string seen_;
  bool done_ = false;
};

}  // namespace

struct Gateway::Impl {
  Impl(CommandProducer producer, GatewayOptions options)
      : hub(io, std::move(producer), options), acceptor(io), options(std::move(options)) {}

  void accept() {
    acceptor.async_accept([this](error_code ec, tcp::socket socket) {
      if (ec) return;
      error_code ignored;
      socket.set_option(tcp::no_delay(true), ignored);
      std::make_shared<Detector>(hub, std::move(socket))->run();
      accept();
    });
  }

  asio::io_context io;
  Hub hub;
  tcp::acceptor acceptor;
  GatewayOptions options;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
  std::thread thread;
  std::uint16_t port = 0;
  bool running = false;
};

Gateway::Gateway(CommandProducer producer, GatewayOptions options)
    : impl_(std::make_unique<Impl>(std::move(producer), std::move(options))) {}

Gateway::~Gateway() { stop(); }

void Gateway::start() {
  if (impl_->running) return;
  auto& d = *impl_;
  const tcp::endpoint ep(asio::ip::make_address(d.options.host), d.options.port);
  d.acceptor.open(ep.protocol());
  d.acceptor.set_option(tcp::acceptor::reuse_address(true));
  d.acceptor.bind(ep);
  d.acceptor.listen();
  d.port = d.acceptor.local_endpoint().port();
  d.work.emplace(asio::make_work_guard(d.io));
  d.accept();
  d.running = true;
  d.thread = std::thread([&d] { d.io.run(); });
}

void Gateway::stop() {
  if (!impl_ || !impl_->running) return;
  auto& d = *impl_;
  asio::post(d.io, [&d] {
    error_code ignored;
    d.acceptor.close(ignored);
    d.hub.close_all();
    d.work.reset();
    d.io.stop();
  });
  d.thread.join();
  d.running = false;
}

std::uint16_t Gateway::port() const { return impl_->port; }

std::size_t Gateway::client_count() const { return impl_->hub.count(); }

void Gateway::publish(const Snapshot& snapshot) { publish(std::make_shared<const Snapshot>(snapshot)); }

void Gateway::publish(std::shared_ptr<const Snapshot> snapshot) {
  if (!impl_->running) return;
  asio::post(impl_->io, [this, snap = std::move(snapshot)] { impl_->hub.on_snapshot(snap); });
}

}  // namespace plcsim::gateway
