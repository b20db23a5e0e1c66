#include "agentsim/engine.hpp"
#include "agentsim/digest.hpp"

#include <algorithm>
#include <barrier>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace agentsim::engine {

VirtualTime::VirtualTime(double t) : t_(t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("virtual time must be finite and non-negative");
    }
}

bool event_before(const EventRecord& a, const EventRecord& b)
{
    if (a.time != b.time) {
        return a.time < b.time;
    }
    if (a.target.name != b.target.name) {
        return a.target.name < b.target.name;
    }
    if (a.target.number != b.target.number) {
        return a.target.number < b.target.number;
    }
    return a.seq < b.seq;
}

namespace {

bool entry_before(const TraceEntry& a, const TraceEntry& b)
{
    if (a.time != b.time) {
        return a.time < b.time;
    }
    if (a.target != b.target) {
        return a.target < b.target;
    }
    return a.seq < b.seq;
}

// Min-heap comparator for std::push_heap / std::pop_heap.
struct LaterFirst
{
    bool operator()(const EventRecord& a, const EventRecord& b) const { return event_before(b, a); }
};

} // namespace

void EngineConfig::validate() const
{
    if (!(start_time < end_time)) {
        throw std::invalid_argument("engine config: start_time must be < end_time");
    }
    if (!(min_delay > 0.0) || !std::isfinite(min_delay)) {
        throw std::invalid_argument("engine config: min_delay must be positive");
    }
    if (worker_count == 0) {
        throw std::invalid_argument("engine config: worker_count must be positive");
    }
}

std::uint64_t payload_digest(const Payload& payload)
{
    return fnv1a64(payload.dump());
}

std::uint64_t trace_digest(const std::vector<TraceEntry>& trace)
{
    std::uint64_t h = kFnvOffsetBasis;
    std::string line;
    for (const auto& e : trace) {
        line.clear();
        line += to_hex16(std::bit_cast<std::uint64_t>(e.time.value()));
        line += '|';
        line += e.target.str();
        line += '|';
        line += e.handler;
        line += '|';
        line += to_hex16(e.payload_digest);
        line += '\n';
        h = fnv1a64(line, h);
    }
    return h;
}

void write_trace_jsonl(const std::vector<TraceEntry>& trace, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open trace file for writing: " + path);
    }
    for (const auto& e : trace) {
        nlohmann::json row;
        row["t"] = e.time.value();
        row["entity"] = e.target.str();
        row["handler"] = e.handler;
        row["payload_digest"] = to_hex16(e.payload_digest);
        out << row.dump() << '\n';
    }
}

void write_digest_file(std::uint64_t digest, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open digest file for writing: " + path);
    }
    out << to_hex16(digest) << '\n';
}

// Per-entity scratch state for one window. Only the owning worker touches it
// while the window executes; the coordinator reads it after the barrier.
struct EntitySlot
{
    std::vector<EventRecord> local;  // heap of events due in this window
    std::vector<EventRecord> outbox; // events due in later windows
    std::vector<TraceEntry> trace;
    std::map<std::string, std::uint64_t> tokens;
    std::uint64_t scheduled = 0;
    std::uint64_t dropped = 0;
    std::exception_ptr error;
    bool active = false;
};

struct ExecutionFrame
{
    const EngineConfig* config = nullptr;
    const std::map<EntityId, std::size_t>* index = nullptr;
    EntitySlot* slot = nullptr;
    const EventRecord* current = nullptr;
    VirtualTime window_end;
};

bool Entity::has_handler(std::string_view handler) const
{
    return handlers_.find(std::string(handler)) != handlers_.end();
}

void Entity::attach_service(std::string handler, Handler fn)
{
    handlers_[std::move(handler)] = std::move(fn);
}

VirtualTime Entity::now() const
{
    if (frame_ == nullptr || frame_->current == nullptr) {
        throw SchedulingError("now() called outside an executing event on " + id_.str());
    }
    return frame_->current->time;
}

void Entity::record_tokens(const std::string& backend, std::uint64_t tokens)
{
    if (frame_ == nullptr) {
        throw SchedulingError("record_tokens called outside an executing event on " + id_.str());
    }
    frame_->slot->tokens[backend] += tokens;
}

void Entity::req_service(double delay, std::string handler, Payload payload, EntityId target)
{
    if (frame_ == nullptr || frame_->current == nullptr) {
        throw SchedulingError("req_service called outside an executing event on " + id_.str());
    }
    const EngineConfig& cfg = *frame_->config;
    if (!(delay >= 0.0) || !std::isfinite(delay)) {
        throw SchedulingError("req_service delay must be finite and non-negative");
    }
    const bool self = target == id_;
    if (!self && delay < cfg.min_delay) {
        std::ostringstream msg;
        msg << "causality contract violated: " << id_.str() << " scheduled '" << handler << "' on "
            << target.str() << " with delay " << delay << " < min_delay " << cfg.min_delay;
        throw CausalityError(msg.str());
    }
    if (frame_->index->find(target) == frame_->index->end()) {
        throw SchedulingError("req_service target does not exist: " + target.str());
    }

    const EventRecord& cur = *frame_->current;
    const std::uint64_t counter = std::max(next_counter_, cur.seq.counter + 1);
    next_counter_ = counter + 1;

    EntitySlot& slot = *frame_->slot;
    ++slot.scheduled;
    const double when = cur.time.value() + delay;
    if (when > cfg.end_time.value()) {
        ++slot.dropped;
        return;
    }

    EventRecord ev{VirtualTime(when), std::move(target), std::move(handler), std::move(payload),
                   EventSeq{id_, counter}, cur.seq};
    if (self && ev.time < frame_->window_end) {
        slot.local.push_back(std::move(ev));
        std::push_heap(slot.local.begin(), slot.local.end(), LaterFirst{});
        return;
    }
    if (!self && ev.time < frame_->window_end) {
        // Unreachable while the delay floor holds; kept as a runtime assertion.
        throw CausalityError("window safety violated by " + id_.str());
    }
    slot.outbox.push_back(std::move(ev));
}

Engine::Engine(EngineConfig config) : config_(std::move(config))
{
    config_.validate();
}

Engine::~Engine() = default;

EntityId Engine::add_entity(std::string name, const EntityFactory& factory, std::uint32_t number)
{
    if (started_) {
        throw RegistrationError("cannot add entities after the engine has started");
    }
    EntityId id{std::move(name), number};
    if (index_.count(id) != 0) {
        throw RegistrationError("duplicate entity " + id.str());
    }
    auto entity = factory(id);
    if (!entity || entity->id() != id) {
        throw RegistrationError("entity factory returned a mismatched entity for " + id.str());
    }
    index_.emplace(id, entities_.size());
    entities_.push_back(std::move(entity));
    return id;
}

Entity* Engine::find(const EntityId& id) const
{
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : entities_[it->second].get();
}

EventRecord Engine::schedule_initial(VirtualTime time, std::string handler, Payload payload, EntityId target)
{
    if (started_) {
        throw SchedulingError("schedule_initial called after the engine has started");
    }
    if (time < config_.start_time || time > config_.end_time) {
        std::ostringstream msg;
        msg << "initial event time " << time.value() << " outside [" << config_.start_time.value() << ", "
            << config_.end_time.value() << "]";
        throw SchedulingError(msg.str());
    }
    if (index_.count(target) == 0) {
        throw SchedulingError("initial event target does not exist: " + target.str());
    }
    EventRecord ev{time, std::move(target), std::move(handler), std::move(payload),
                   EventSeq{kEngineScheduler, initial_counter_++}, std::nullopt};
    initial_.push_back(ev);
    return ev;
}

namespace {

// Fixed pool of worker_count - 1 threads plus the calling thread. Each window is
// bracketed by two barrier phases: start (work published) and finish.
class WindowPool
{
public:
    WindowPool(std::uint32_t workers, std::function<void(std::uint32_t)> body)
        : body_(std::move(body)), barrier_(static_cast<std::ptrdiff_t>(workers))
    {
        for (std::uint32_t w = 1; w < workers; ++w) {
            threads_.emplace_back([this, w] {
                for (;;) {
                    barrier_.arrive_and_wait();
                    if (stop_) {
                        return;
                    }
                    body_(w);
                    barrier_.arrive_and_wait();
                }
            });
        }
    }

    ~WindowPool()
    {
        if (!threads_.empty()) {
            stop_ = true;
            barrier_.arrive_and_wait();
            for (auto& t : threads_) {
                t.join();
            }
        }
    }

    void run_window()
    {
        if (threads_.empty()) {
            body_(0);
            return;
        }
        barrier_.arrive_and_wait();
        body_(0);
        barrier_.arrive_and_wait();
    }

private:
    std::function<void(std::uint32_t)> body_;
    std::barrier<> barrier_;
    std::vector<std::thread> threads_;
    bool stop_ = false;
};

} // namespace

RunReport Engine::run()
{
    if (started_) {
        throw SchedulingError("engine run() may only be called once");
    }
    if (entities_.empty() || initial_.empty()) {
        throw std::logic_error("engine run() requires at least one entity and one initial event");
    }
    started_ = true;

    const auto wall_start = std::chrono::steady_clock::now();
    RunReport report;
    report.events_scheduled = initial_.size();

    std::vector<EventRecord> pending = std::move(initial_);
    initial_.clear();
    std::make_heap(pending.begin(), pending.end(), LaterFirst{});

    const std::size_t n = entities_.size();
    std::vector<EntitySlot> slots(n);
    std::vector<std::vector<std::size_t>> by_worker(config_.worker_count);
    VirtualTime window_end;

    auto execute_entity = [&](std::size_t idx) {
        Entity& entity = *entities_[idx];
        EntitySlot& slot = slots[idx];
        ExecutionFrame frame{&config_, &index_, &slot, nullptr, window_end};
        entity.frame_ = &frame;
        try {
            while (!slot.local.empty()) {
                std::pop_heap(slot.local.begin(), slot.local.end(), LaterFirst{});
                EventRecord ev = std::move(slot.local.back());
                slot.local.pop_back();
                auto h = entity.handlers_.find(ev.handler);
                if (h == entity.handlers_.end()) {
                    throw DispatchError("entity " + entity.id().str() + " has no handler '" + ev.handler + "'");
                }
                slot.trace.push_back(
                    TraceEntry{ev.time, ev.target, ev.handler, payload_digest(ev.payload), ev.seq, ev.parent});
                frame.current = &ev;
                h->second(ev.payload);
                frame.current = nullptr;
            }
        } catch (...) {
            slot.error = std::current_exception();
            slot.local.clear();
        }
        entity.frame_ = nullptr;
    };

    WindowPool pool(config_.worker_count, [&](std::uint32_t w) {
        for (std::size_t idx : by_worker[w]) {
            execute_entity(idx);
        }
    });

    std::vector<std::size_t> active;
    std::vector<TraceEntry> window_trace;
    std::optional<VirtualTime> last_t_min;

    while (!pending.empty()) {
        const VirtualTime t_min = pending.front().time;
        if (t_min >= config_.end_time) {
            break;
        }
        if (last_t_min && !(*last_t_min < t_min)) {
            throw std::logic_error("window lower bound did not advance");
        }
        last_t_min = t_min;
        window_end = VirtualTime(t_min.value() + config_.min_delay);

        active.clear();
        for (auto& list : by_worker) {
            list.clear();
        }
        while (!pending.empty() && pending.front().time < window_end) {
            std::pop_heap(pending.begin(), pending.end(), LaterFirst{});
            EventRecord ev = std::move(pending.back());
            pending.pop_back();
            const std::size_t idx = index_.at(ev.target);
            EntitySlot& slot = slots[idx];
            if (!slot.active) {
                slot.active = true;
                active.push_back(idx);
            }
            slot.local.push_back(std::move(ev));
            std::push_heap(slot.local.begin(), slot.local.end(), LaterFirst{});
        }
        std::sort(active.begin(), active.end());
        for (std::size_t idx : active) {
            by_worker[partition_of(entities_[idx]->num())].push_back(idx);
        }

        pool.run_window();
        ++report.windows;

        for (std::size_t idx : active) {
            if (slots[idx].error) {
                std::rethrow_exception(slots[idx].error);
            }
        }

        window_trace.clear();
        for (std::size_t idx : active) {
            EntitySlot& slot = slots[idx];
            for (auto& ev : slot.outbox) {
                pending.push_back(std::move(ev));
                std::push_heap(pending.begin(), pending.end(), LaterFirst{});
            }
            slot.outbox.clear();
            report.events_scheduled += slot.scheduled;
            report.events_dropped += slot.dropped;
            slot.scheduled = slot.dropped = 0;
            for (auto& [backend, count] : slot.tokens) {
                report.token_counters[backend] += count;
            }
            slot.tokens.clear();
            std::move(slot.trace.begin(), slot.trace.end(), std::back_inserter(window_trace));
            slot.trace.clear();
            slot.active = false;
        }
        std::sort(window_trace.begin(), window_trace.end(), entry_before);
        std::move(window_trace.begin(), window_trace.end(), std::back_inserter(report.trace));
    }

    // Events still queued at or beyond end_time never execute.
    report.events_dropped += pending.size();
    report.events_executed = report.trace.size();
    report.trace_digest = trace_digest(report.trace);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return report;
}

} // namespace agentsim::engine
