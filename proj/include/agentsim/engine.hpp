#pragma once

#include "agentsim/errors.hpp"

#include <json.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace agentsim::engine {

/// Simulated time. Non-negative, totally ordered, compared exactly.
class VirtualTime
{
public:
    constexpr VirtualTime() = default;
    explicit VirtualTime(double t);

    constexpr double value() const noexcept { return t_; }

    friend constexpr auto operator<=>(VirtualTime a, VirtualTime b) noexcept { return a.t_ <=> b.t_; }
    friend constexpr bool operator==(VirtualTime a, VirtualTime b) noexcept { return a.t_ == b.t_; }

private:
    double t_ = 0.0;
};

struct EntityId
{
    std::string name;
    std::uint32_t number = 0;

    std::string str() const { return name + "#" + std::to_string(number); }

    friend auto operator<=>(const EntityId&, const EntityId&) = default;
    friend bool operator==(const EntityId&, const EntityId&) = default;
};

/// Scheduler used for events queued with Engine::schedule_initial.
inline const EntityId kEngineScheduler{"<engine>", 0};

/// Deterministic tiebreaker. `counter` is a per-scheduler logical clock: it only
/// depends on what the scheduling entity has executed, never on worker count.
struct EventSeq
{
    EntityId scheduler;
    std::uint64_t counter = 0;

    friend bool operator==(const EventSeq&, const EventSeq&) = default;
    friend std::strong_ordering operator<=>(const EventSeq& a, const EventSeq& b)
    {
        if (auto c = a.counter <=> b.counter; c != 0) {
            return c;
        }
        return a.scheduler <=> b.scheduler;
    }
};

using Payload = nlohmann::json;

struct EventRecord
{
    VirtualTime time;
    EntityId target;
    std::string handler;
    Payload payload;
    EventSeq seq;
    std::optional<EventSeq> parent;
};

/// Engine total order: (time, target.name, target.number, seq).
bool event_before(const EventRecord& a, const EventRecord& b);

struct EngineConfig
{
    VirtualTime start_time{0.0};
    VirtualTime end_time{100000.0};
    double min_delay = 0.0001;
    std::uint32_t worker_count = 1;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument when the invariants do not hold.
    void validate() const;
};

struct TraceEntry
{
    VirtualTime time;
    EntityId target;
    std::string handler;
    std::uint64_t payload_digest = 0;
    EventSeq seq;
    std::optional<EventSeq> parent;
};

struct RunReport
{
    std::uint64_t events_executed = 0;
    std::uint64_t events_scheduled = 0;
    std::uint64_t events_dropped = 0;
    std::uint64_t windows = 0;
    std::vector<TraceEntry> trace;
    std::uint64_t trace_digest = 0;
    double wall_time = 0.0;
    std::map<std::string, std::uint64_t> token_counters;
};

/// FNV-1a over the canonical UTF-8 payload dump (sorted keys, no whitespace).
std::uint64_t payload_digest(const Payload& payload);

/// Order-sensitive FNV-1a fold. Each entry contributes the line
///   <time as 16 hex digits of its IEEE-754 bits>|<name>#<number>|<handler>|<payload digest hex>\n
/// The empty trace hashes to the FNV-1a offset basis 0xcbf29ce484222325.
std::uint64_t trace_digest(const std::vector<TraceEntry>& trace);

/// JSON-lines export: {"entity":"name#num","handler":...,"payload_digest":hex,"t":number}
void write_trace_jsonl(const std::vector<TraceEntry>& trace, const std::string& path);
void write_digest_file(std::uint64_t digest, const std::string& path);

class Engine;
struct ExecutionFrame;

/// A named, numbered state machine whose handlers the engine dispatches.
/// Handlers run single-threaded per entity; only scheduled events cross entities.
class Entity
{
public:
    using Handler = std::function<void(const Payload&)>;

    explicit Entity(EntityId id) : id_(std::move(id)) {}
    virtual ~Entity() = default;

    Entity(const Entity&) = delete;
    Entity& operator=(const Entity&) = delete;

    const EntityId& id() const noexcept { return id_; }
    const std::string& name() const noexcept { return id_.name; }
    std::uint32_t num() const noexcept { return id_.number; }

    bool has_handler(std::string_view handler) const;

protected:
    void attach_service(std::string handler, Handler fn);

    /// Schedules `handler` on `target` at now() + delay. Only valid inside a handler.
    /// Cross-entity delays must be at least the engine's min_delay.
    void req_service(double delay, std::string handler, Payload payload, EntityId target);
    void req_service(double delay, std::string handler, Payload payload, std::string target_name,
                     std::uint32_t target_number)
    {
        req_service(delay, std::move(handler), std::move(payload),
                    EntityId{std::move(target_name), target_number});
    }

    VirtualTime now() const;

    /// Adds generated tokens to the run's per-backend counters.
    void record_tokens(const std::string& backend, std::uint64_t tokens);

private:
    friend class Engine;

    EntityId id_;
    std::unordered_map<std::string, Handler> handlers_;
    ExecutionFrame* frame_ = nullptr;
    std::uint64_t next_counter_ = 0;
};

using EntityFactory = std::function<std::unique_ptr<Entity>(EntityId)>;

/// Conservative windowed PDES kernel. Each window executes every pending event in
/// [t_min, t_min + min_delay); entities are statically partitioned across workers
/// by `number mod worker_count` and a barrier separates windows.
class Engine
{
public:
    explicit Engine(EngineConfig config);
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    const EngineConfig& config() const noexcept { return config_; }

    EntityId add_entity(std::string name, const EntityFactory& factory, std::uint32_t number);

    template <class T, class... Args>
    T& emplace_entity(std::string name, std::uint32_t number, Args&&... args)
    {
        T* raw = nullptr;
        add_entity(std::move(name),
                   [&](EntityId id) {
                       auto p = std::make_unique<T>(std::move(id), std::forward<Args>(args)...);
                       raw = p.get();
                       return p;
                   },
                   number);
        return *raw;
    }

    EventRecord schedule_initial(VirtualTime time, std::string handler, Payload payload, EntityId target);

    RunReport run();

    Entity* find(const EntityId& id) const;
    std::size_t entity_count() const noexcept { return entities_.size(); }

    /// Worker partition an entity number maps to.
    std::uint32_t partition_of(std::uint32_t number) const noexcept { return number % config_.worker_count; }

private:
    friend class Entity;
    struct Impl;

    EngineConfig config_;
    std::vector<std::unique_ptr<Entity>> entities_;
    std::map<EntityId, std::size_t> index_;
    std::vector<EventRecord> initial_;
    std::uint64_t initial_counter_ = 0;
    bool started_ = false;
};

} // namespace agentsim::engine
