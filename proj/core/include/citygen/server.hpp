#pragma once

#include <condition_variable>
#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "citygen/engine.hpp"
#include "citygen/errors.hpp"

namespace citygen {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  ///< 0 picks a free port
  bool start_paused = false;
  double ticks_per_second = 20.0;
  std::uint64_t full_every = 256;
  std::size_t client_queue_limit = 256;
  std::optional<std::filesystem::path> ui_dir;
};

struct Command {
  enum class Kind { Pause, Resume, Step, Reset, SetParams, SetSpeed };

  Kind kind = Kind::Pause;
  std::int64_t id = 0;
  std::uint64_t steps = 0;
  std::optional<std::uint64_t> seed;
  std::optional<Rect> region;
  nlohmann::json params;
  double tps = 0.0;
};

/// Malformed client message. Carries the command id when one could be read.
class CommandError : public Error {
 public:
  CommandError(std::optional<std::int64_t> id, const std::string& what) : Error(what), id_(id) {}
  std::optional<std::int64_t> id() const { return id_; }

 private:
  std::optional<std::int64_t> id_;
};

/// Parses one client text message. SetParams payloads are checked against
/// `reference` before they are accepted. Throws CommandError.
Command parse_command(const std::string& text, const SimParams& reference);
nlohmann::json to_json(const Command& command);

std::string full_message(const Snapshot& snapshot);
nlohmann::json diff_message(const Snapshot& before, const Snapshot& after, const std::vector<Event>& events);
std::string ack_message(std::optional<std::int64_t> id, const std::optional<std::string>& error);

/// Client-side reconstruction: a full message replaces the state, a diff is
/// applied on top of it, anything else is ignored. Throws ParseError.
void apply_state_message(std::optional<Snapshot>& state, const nlohmann::json& message);

/// Outgoing message queue of one client. Bounded: when a push would exceed
/// the limit the queue is dropped and replaced by a single full message.
class Subscriber {
 public:
  using Message = std::shared_ptr<const std::string>;

  explicit Subscriber(std::size_t limit, std::function<void()> notify = {});

  std::optional<Message> try_pop();
  std::optional<Message> wait_pop(std::chrono::milliseconds timeout);
  std::size_t pending() const;
  std::size_t resyncs() const;

  void push(Message message);
  void push_or_resync(Message message, const std::function<Message()>& full);

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Message> queue_;
  std::size_t limit_;
  std::size_t resyncs_ = 0;
  std::function<void()> notify_;
};

/// Owns the live WorldState on its own thread. Everything else talks to it
/// through the command queue.
class SimHost {
 public:
  using SubscriberPtr = std::shared_ptr<Subscriber>;
  using StateCallback = std::function<void(Subscriber::Message)>;

  SimHost(Terrain terrain, SimParams params, std::uint64_t rng_seed, ServerOptions options);
  ~SimHost();
  SimHost(const SimHost&) = delete;
  SimHost& operator=(const SimHost&) = delete;

  void start();
  void stop();

  /// Acked to `from` (if any) once applied at a tick boundary.
  void submit(SubscriberPtr from, Command command);
  /// The subscriber gets a full message, then a diff after every tick.
  void attach(SubscriberPtr subscriber);
  void detach(SubscriberPtr subscriber);
  /// Calls back from the simulation thread with the current full message.
  void request_state(StateCallback callback);

  const SimParams& startup_params() const { return startup_params_; }
  const ServerOptions& options() const { return options_; }

 private:
  struct Request {
    enum class Kind { Command, Attach, Detach, State } kind;
    SubscriberPtr subscriber;
    Command command;
    StateCallback callback;
  };
  struct Client {
    SubscriberPtr subscriber;
    std::size_t event_mark;
  };

  void enqueue(Request request);
  void loop();
  void apply(Request& request);
  void apply_command(const SubscriberPtr& from, const Command& command);
  void tick();
  Subscriber::Message current_full();

  ServerOptions options_;
  std::shared_ptr<const Terrain> terrain_;
  SimParams startup_params_;
  std::uint64_t startup_seed_;

  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Request> requests_;
  bool stopping_ = false;
  std::thread thread_;

  // simulation thread only
  std::optional<WorldState> world_;
  Snapshot last_;
  std::size_t event_mark_ = 0;
  std::vector<Client> clients_;
  bool paused_ = false;
  std::uint64_t pending_steps_ = 0;
  double tps_ = 20.0;
  Subscriber::Message full_cache_;
};

/// HTTP + WebSocket front end: /ws, GET /state and static files under GET /.
class Server {
 public:
  /// Binds immediately. Throws IoError if the address cannot be bound.
  Server(Terrain terrain, SimParams params, std::uint64_t rng_seed, ServerOptions options);
  ~Server();

  unsigned short port() const;
  SimHost& host();

  /// Starts the simulation and network threads.
  void start();
  /// Blocks until stop() is called or SIGINT/SIGTERM arrives.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace citygen
