#include "citygen/server.hpp"

#include <algorithm>
#include <cmath>
#include <csignal>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/asio/signal_set.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "citygen/batch.hpp"

namespace citygen {

using nlohmann::json;

namespace {

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, std::optional<std::int64_t> id) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      throw CommandError(id, "unexpected field '" + it.key() + "'");
    }
  }
}

}  // namespace

Command parse_command(const std::string& text, const SimParams& reference) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::parse_error&) {
    throw CommandError(std::nullopt, "message is not valid JSON");
  }
  if (!msg.is_object()) throw CommandError(std::nullopt, "message must be a JSON object");

  const json* id = find(msg, "id");
  if (!id || !id->is_number_integer()) throw CommandError(std::nullopt, "missing integer 'id'");
  Command c;
  c.id = id->get<std::int64_t>();
  const json* cmd = find(msg, "cmd");
  if (!cmd || !cmd->is_string()) throw CommandError(c.id, "missing string 'cmd'");
  const std::string name = cmd->get<std::string>();

  if (name == "pause" || name == "resume") {
    check_keys(msg, {"id", "cmd"}, c.id);
    c.kind = name == "pause" ? Command::Kind::Pause : Command::Kind::Resume;
  } else if (name == "reset") {
    check_keys(msg, {"id", "cmd", "seed"}, c.id);
    c.kind = Command::Kind::Reset;
    if (const json* seed = find(msg, "seed"); seed && !seed->is_null()) {
      if (!seed->is_number_unsigned()) throw CommandError(c.id, "'seed' must be a non-negative integer");
      c.seed = seed->get<std::uint64_t>();
    }
  } else if (name == "step") {
    check_keys(msg, {"id", "cmd", "n"}, c.id);
    c.kind = Command::Kind::Step;
    const json* n = find(msg, "n");
    if (!n || !n->is_number_unsigned() || n->get<std::uint64_t>() == 0) {
      throw CommandError(c.id, "'n' must be a positive integer");
    }
    c.steps = n->get<std::uint64_t>();
  } else if (name == "set_params") {
    check_keys(msg, {"id", "cmd", "region", "params"}, c.id);
    c.kind = Command::Kind::SetParams;
    if (const json* region = find(msg, "region"); region && !region->is_null()) {
      try {
        c.region = rect_from_json(*region);
      } catch (const std::exception& e) {
        throw CommandError(c.id, std::string("bad region: ") + e.what());
      }
    }
    const json* params = find(msg, "params");
    if (!params || !params->is_object()) throw CommandError(c.id, "'params' must be an object");
    c.params = *params;
    try {
      if (c.region && touches_global_only_fields(c.params)) {
        throw InvalidParam("agent counts cannot be overridden per region");
      }
      SimParams probe = reference;
      apply_partial(probe, c.params);
    } catch (const InvalidParam& e) {
      throw CommandError(c.id, e.what());
    }
  } else if (name == "set_speed") {
    check_keys(msg, {"id", "cmd", "tps"}, c.id);
    c.kind = Command::Kind::SetSpeed;
    const json* tps = find(msg, "tps");
    if (!tps || !tps->is_number() || !std::isfinite(tps->get<double>()) || tps->get<double>() <= 0.0) {
      throw CommandError(c.id, "'tps' must be a positive number");
    }
    c.tps = tps->get<double>();
  } else {
    throw CommandError(c.id, "unknown command '" + name + "'");
  }
  return c;
}

json to_json(const Command& c) {
  json j = {{"id", c.id}};
  switch (c.kind) {
    case Command::Kind::Pause: j["cmd"] = "pause"; break;
    case Command::Kind::Resume: j["cmd"] = "resume"; break;
    case Command::Kind::Reset:
      j["cmd"] = "reset";
      if (c.seed) j["seed"] = *c.seed;
      break;
    case Command::Kind::Step:
      j["cmd"] = "step";
      j["n"] = c.steps;
      break;
    case Command::Kind::SetParams:
      j["cmd"] = "set_params";
      j["region"] = c.region ? rect_to_json(*c.region) : json(nullptr);
      j["params"] = c.params;
      break;
    case Command::Kind::SetSpeed:
      j["cmd"] = "set_speed";
      j["tps"] = c.tps;
      break;
  }
  return j;
}

std::string full_message(const Snapshot& snapshot) {
  return json{{"type", "full"}, {"snapshot", to_json(snapshot)}}.dump();
}

json diff_message(const Snapshot& before, const Snapshot& after, const std::vector<Event>& events) {
  json patches = json::array();
  for (const auto& c : diff_patches(before, after)) patches.push_back(to_json(c));
  json agents = json::array();
  for (const auto& a : after.agents) agents.push_back(agent_to_json(a));
  json evs = json::array();
  for (const auto& e : events) evs.push_back(to_json(e));
  return {{"type", "diff"}, {"tick", after.tick}, {"patches", std::move(patches)}, {"agents", std::move(agents)},
          {"events", std::move(evs)}};
}

std::string ack_message(std::optional<std::int64_t> id, const std::optional<std::string>& error) {
  json j = {{"type", "ack"}, {"id", id ? json(*id) : json(nullptr)}, {"ok", !error}};
  if (error) j["error"] = *error;
  return j.dump();
}

void apply_state_message(std::optional<Snapshot>& state, const json& message) {
  try {
    const std::string type = message.at("type").get<std::string>();
    if (type == "full") {
      state = snapshot_from_json(message.at("snapshot"));
      return;
    }
    if (type != "diff") return;
    if (!state) throw ParseError("diff received before any full message");
    Snapshot& s = *state;
    apply_patch_changes(s, message.at("patches"));
    s.agents.clear();
    for (const auto& a : message.at("agents")) s.agents.push_back(agent_from_json(a));
    for (const auto& e : message.at("events")) {
      if (e.at("kind") != "params_changed") continue;
      ParamResolver resolver(s.width(), s.height(), s.params);
      resolver.reset(s.params, s.overrides);
      const json& region = e.at("region");
      if (region.is_null()) {
        resolver.set_global(e.at("params"));
      } else {
        resolver.set_region(rect_from_json(region), e.at("params"));
      }
      s.params = resolver.base();
      s.overrides = resolver.overrides();
    }
    s.tick = message.at("tick").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("state message: ") + e.what());
  } catch (const InvalidParam& e) {
    throw ParseError(std::string("state message: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

Subscriber::Subscriber(std::size_t limit, std::function<void()> notify)
    : limit_(std::max<std::size_t>(limit, 1)), notify_(std::move(notify)) {}

std::optional<Subscriber::Message> Subscriber::try_pop() {
  std::lock_guard lock(mutex_);
  if (queue_.empty()) return std::nullopt;
  Message m = std::move(queue_.front());
  queue_.pop_front();
  return m;
}

std::optional<Subscriber::Message> Subscriber::wait_pop(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  if (!cv_.wait_for(lock, timeout, [&] { return !queue_.empty(); })) return std::nullopt;
  Message m = std::move(queue_.front());
  queue_.pop_front();
  return m;
}

std::size_t Subscriber::pending() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

std::size_t Subscriber::resyncs() const {
  std::lock_guard lock(mutex_);
  return resyncs_;
}

void Subscriber::push(Message message) {
  {
    std::lock_guard lock(mutex_);
    queue_.push_back(std::move(message));
  }
  cv_.notify_all();
  if (notify_) notify_();
}

void Subscriber::push_or_resync(Message message, const std::function<Message()>& full) {
  {
    std::lock_guard lock(mutex_);
    if (queue_.size() >= limit_) {
      queue_.clear();
      queue_.push_back(full());
      ++resyncs_;
    } else {
      queue_.push_back(std::move(message));
    }
  }
  cv_.notify_all();
  if (notify_) notify_();
}

// ---------------------------------------------------------------------------

SimHost::SimHost(Terrain terrain, SimParams params, std::uint64_t rng_seed, ServerOptions options)
    : options_(std::move(options)),
      terrain_(std::make_shared<const Terrain>(std::move(terrain))),
      startup_params_(std::move(params)),
      startup_seed_(rng_seed),
      paused_(options_.start_paused),
      tps_(options_.ticks_per_second) {
  world_.emplace(*terrain_, startup_params_, startup_seed_);
  last_ = world_->snapshot();
  event_mark_ = world_->events().size();
}

SimHost::~SimHost() { stop(); }

void SimHost::start() {
  if (thread_.joinable()) return;
  thread_ = std::thread([this] { loop(); });
}

void SimHost::stop() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

void SimHost::enqueue(Request request) {
  {
    std::lock_guard lock(mutex_);
    requests_.push_back(std::move(request));
  }
  cv_.notify_all();
}

void SimHost::submit(SubscriberPtr from, Command command) {
  enqueue({Request::Kind::Command, std::move(from), std::move(command), {}});
}

void SimHost::attach(SubscriberPtr subscriber) { enqueue({Request::Kind::Attach, std::move(subscriber), {}, {}}); }

void SimHost::detach(SubscriberPtr subscriber) { enqueue({Request::Kind::Detach, std::move(subscriber), {}, {}}); }

void SimHost::request_state(StateCallback callback) {
  enqueue({Request::Kind::State, nullptr, {}, std::move(callback)});
}

Subscriber::Message SimHost::current_full() {
  if (!full_cache_) full_cache_ = std::make_shared<const std::string>(full_message(world_->snapshot()));
  return full_cache_;
}

void SimHost::loop() {
  using clock = std::chrono::steady_clock;
  auto next_due = clock::now();
  for (;;) {
    std::deque<Request> batch;
    {
      std::unique_lock lock(mutex_);
      auto ready = [&] { return stopping_ || !requests_.empty(); };
      if (pending_steps_ == 0 && paused_) {
        cv_.wait(lock, ready);
      } else if (pending_steps_ == 0) {
        cv_.wait_until(lock, next_due, ready);
      }
      if (stopping_) return;
      batch.swap(requests_);
    }
    for (auto& r : batch) apply(r);

    if (pending_steps_ > 0) {
      --pending_steps_;
      tick();
    } else if (!paused_ && clock::now() >= next_due) {
      tick();
      const auto interval = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(1.0 / tps_));
      next_due = std::max(next_due + interval, clock::now() - interval);
    }
  }
}

void SimHost::apply(Request& r) {
  switch (r.kind) {
    case Request::Kind::Command:
      apply_command(r.subscriber, r.command);
      break;
    case Request::Kind::Attach:
      r.subscriber->push(current_full());
      clients_.push_back({r.subscriber, world_->events().size()});
      break;
    case Request::Kind::Detach:
      std::erase_if(clients_, [&](const Client& c) { return c.subscriber == r.subscriber; });
      break;
    case Request::Kind::State:
      r.callback(current_full());
      break;
  }
}

void SimHost::apply_command(const SubscriberPtr& from, const Command& c) {
  std::optional<std::string> error;
  switch (c.kind) {
    case Command::Kind::Pause: paused_ = true; break;
    case Command::Kind::Resume: paused_ = false; break;
    case Command::Kind::Step: pending_steps_ += c.steps; break;
    case Command::Kind::SetSpeed: tps_ = c.tps; break;
    case Command::Kind::SetParams:
      try {
        world_->set_params(c.region, c.params);
        full_cache_.reset();
      } catch (const InvalidParam& e) {
        error = e.what();
      }
      break;
    case Command::Kind::Reset: {
      world_.emplace(*terrain_, startup_params_, c.seed.value_or(startup_seed_));
      pending_steps_ = 0;
      full_cache_.reset();
      last_ = world_->snapshot();
      event_mark_ = world_->events().size();
      const auto full = current_full();
      for (auto& client : clients_) {
        client.subscriber->push_or_resync(full, [&] { return full; });
        client.event_mark = event_mark_;
      }
      break;
    }
  }
  if (from) from->push(std::make_shared<const std::string>(ack_message(c.id, error)));
}

void SimHost::tick() {
  world_->step();
  full_cache_.reset();
  Snapshot now = world_->snapshot();
  const auto& events = world_->events();

  std::map<std::size_t, Subscriber::Message> by_mark;
  auto message_for = [&](std::size_t mark) {
    auto& m = by_mark[mark];
    if (!m) {
      std::vector<Event> fresh(events.begin() + static_cast<std::ptrdiff_t>(mark), events.end());
      m = std::make_shared<const std::string>(diff_message(last_, now, fresh).dump());
    }
    return m;
  };
  const bool anchor = options_.full_every != 0 && world_->tick() % options_.full_every == 0;
  const auto full = [this] { return current_full(); };
  for (auto& client : clients_) {
    client.subscriber->push_or_resync(message_for(std::max(client.event_mark, event_mark_)), full);
    client.event_mark = events.size();
    if (anchor) client.subscriber->push_or_resync(current_full(), full);
  }
  event_mark_ = events.size();
  last_ = std::move(now);
}

// ---------------------------------------------------------------------------

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

const char* mime_type(const std::filesystem::path& p) {
  static const std::map<std::string, const char*> types = {
      {".html", "text/html"},       {".htm", "text/html"},  {".js", "application/javascript"},
      {".mjs", "application/javascript"}, {".css", "text/css"}, {".json", "application/json"},
      {".png", "image/png"},        {".svg", "image/svg+xml"}, {".ico", "image/x-icon"},
      {".map", "application/json"}, {".wasm", "application/wasm"}};
  auto it = types.find(p.extension().string());
  return it == types.end() ? "application/octet-stream" : it->second;
}

constexpr const char* kPlaceholderPage =
    "<!doctype html><html><head><title>citygen</title></head><body>"
    "<p>citygen server running. WebSocket endpoint: <code>/ws</code>, state: <a href=\"/state\">/state</a>.</p>"
    "</body></html>";

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, SimHost& host) : ws_(std::move(socket)), host_(host) {}

  void run(http::request<http::string_body> req) {
    std::weak_ptr<WsSession> weak = shared_from_this();
    auto executor = ws_.get_executor();
    subscriber_ = std::make_shared<Subscriber>(host_.options().client_queue_limit, [weak, executor] {
      net::post(executor, [weak] {
        if (auto self = weak.lock()) self->flush();
      });
    });
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->host_.attach(self->subscriber_);
      self->read();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->host_.detach(self->subscriber_);
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      try {
        self->host_.submit(self->subscriber_, parse_command(text, self->host_.startup_params()));
      } catch (const CommandError& e) {
        self->subscriber_->push(std::make_shared<const std::string>(ack_message(e.id(), std::string(e.what()))));
      }
      self->read();
    });
  }

  void flush() {
    if (writing_) return;
    auto next = subscriber_->try_pop();
    if (!next) return;
    writing_ = true;
    ws_.text(true);
    auto msg = *next;
    ws_.async_write(net::buffer(*msg), [self = shared_from_this(), msg](beast::error_code ec, std::size_t) {
      self->writing_ = false;
      if (ec) return;
      self->flush();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  SimHost& host_;
  std::shared_ptr<Subscriber> subscriber_;
  beast::flat_buffer buffer_;
  bool writing_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, SimHost& host) : stream_(std::move(socket)), host_(host) {}

  void run() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->handle();
    });
  }

  void handle() {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/ws") {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), host_)->run(std::move(req_));
      } else {
        respond(http::status::not_found, "text/plain", "not found\n");
      }
      return;
    }
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      respond(http::status::method_not_allowed, "text/plain", "method not allowed\n");
      return;
    }
    const std::string target(req_.target().substr(0, req_.target().find('?')));
    if (target == "/state") {
      auto executor = stream_.get_executor();
      host_.request_state([self = shared_from_this(), executor](Subscriber::Message full) {
        net::post(executor, [self, full] {
          const auto doc = json::parse(*full);
          self->respond(http::status::ok, "application/json", doc.at("snapshot").dump());
        });
      });
      return;
    }
    serve_static(target);
  }

  void serve_static(const std::string& target) {
    const auto& ui = host_.options().ui_dir;
    if (!ui) {
      if (target == "/" || target == "/index.html") {
        respond(http::status::ok, "text/html", kPlaceholderPage);
      } else {
        respond(http::status::not_found, "text/plain", "not found\n");
      }
      return;
    }
    std::filesystem::path rel = target == "/" ? std::filesystem::path("index.html") : std::filesystem::path(target.substr(1));
    for (const auto& part : rel) {
      if (part == "..") {
        respond(http::status::bad_request, "text/plain", "bad path\n");
        return;
      }
    }
    const auto path = *ui / rel;
    std::ifstream in(path, std::ios::binary);
    if (!in || std::filesystem::is_directory(path)) {
      respond(http::status::not_found, "text/plain", "not found\n");
      return;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    respond(http::status::ok, mime_type(path), ss.str());
  }

  void respond(http::status status, const char* type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::server, "citygen");
    res->set(http::field::content_type, type);
    res->keep_alive(false);
    if (req_.method() == http::verb::head) {
      res->content_length(body.size());
    } else {
      res->body() = std::move(body);
      res->prepare_payload();
    }
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  beast::tcp_stream stream_;
  SimHost& host_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

struct Server::Impl {
  Impl(Terrain terrain, SimParams params, std::uint64_t seed, ServerOptions options)
      : host(std::move(terrain), std::move(params), seed, std::move(options)), acceptor(ioc), signals(ioc) {}

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpSession>(std::move(socket), host)->run();
      accept();
    });
  }

  SimHost host;
  net::io_context ioc{1};
  tcp::acceptor acceptor;
  net::signal_set signals;
  std::thread io_thread;
};

Server::Server(Terrain terrain, SimParams params, std::uint64_t rng_seed, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(terrain), std::move(params), rng_seed, options)) {
  beast::error_code ec;
  const auto address = net::ip::make_address(options.address, ec);
  if (ec) throw IoError("bad address '" + options.address + "': " + ec.message());
  const tcp::endpoint endpoint(address, options.port);
  auto& acc = impl_->acceptor;
  acc.open(endpoint.protocol(), ec);
  if (!ec) acc.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) acc.bind(endpoint, ec);
  if (!ec) acc.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    throw IoError("cannot listen on " + options.address + ":" + std::to_string(options.port) + ": " + ec.message());
  }
}

Server::~Server() { stop(); }

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

SimHost& Server::host() { return impl_->host; }

void Server::start() {
  if (impl_->io_thread.joinable()) return;
  impl_->host.start();
  impl_->signals.add(SIGINT);
  impl_->signals.add(SIGTERM);
  impl_->signals.async_wait([this](beast::error_code ec, int) {
    if (!ec) impl_->ioc.stop();
  });
  impl_->accept();
  impl_->io_thread = std::thread([this] { impl_->ioc.run(); });
}

void Server::wait() {
  if (impl_->io_thread.joinable()) impl_->io_thread.join();
  impl_->host.stop();
}

void Server::stop() {
  impl_->ioc.stop();
  wait();
}

}  // namespace citygen
