#pragma once

// Fair interleaving of possibly nonterminating searches.
//
// Round R runs tasks 1..R; task i receives 2^{R-i} quanta. Inside a round the
// slots follow the ruler sequence: slot k (1-based) belongs to task ctz(k) + 1.

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace picardkit {

struct StepResult {
    bool halted = false;
    std::optional<long long> value;

    static StepResult running() { return {}; }
    static StepResult halt(std::optional<long long> v = std::nullopt) { return {true, v}; }
};

class Task {
public:
    virtual ~Task() = default;
    /// One bounded unit of work. Must be deterministic given the task's state.
    virtual StepResult step() = 0;
    virtual std::string name() const { return {}; }
};

/// Tries m = start, start + 1, ... until pred(m) holds; halts with that m.
class SearchTask : public Task {
public:
    SearchTask(std::function<bool(long long)> pred, long long start = 1, std::string name = "search")
        : pred_(std::move(pred)), m_(start), name_(std::move(name)) {}

    StepResult step() override {
        if (pred_(m_)) return StepResult::halt(m_);
        ++m_;
        return StepResult::running();
    }
    std::string name() const override { return name_; }

private:
    std::function<bool(long long)> pred_;
    long long m_;
    std::string name_;
};

/// Halts on its n-th step with the given value; n = 0 never halts.
class CountdownTask : public Task {
public:
    explicit CountdownTask(unsigned long long n, long long value = 0) : n_(n), value_(value) {}
    StepResult step() override {
        if (n_ != 0 && ++done_ == n_) return StepResult::halt(value_);
        return StepResult::running();
    }
    std::string name() const override { return "countdown-" + std::to_string(n_); }

private:
    unsigned long long n_, done_ = 0;
    long long value_;
};

inline std::unique_ptr<Task> halting_after(unsigned long long n, long long value = 0) {
    return std::make_unique<CountdownTask>(n, value);
}

enum class TaskStatus { running, halted, failed };

inline const char* to_string(TaskStatus s) {
    switch (s) {
    case TaskStatus::running: return "running";
    case TaskStatus::halted: return "halted";
    case TaskStatus::failed: return "failed";
    }
    return "?";
}

struct Event {
    unsigned round = 0;
    unsigned taskId = 0;
    unsigned long long quanta = 0;   // quanta the task has received so far
    TaskStatus status = TaskStatus::running;

    nlohmann::json to_json() const {
        return {{"round", round}, {"taskId", taskId}, {"quanta", quanta}, {"status", to_string(status)}};
    }
    bool operator==(const Event&) const = default;
};

struct Halt {
    unsigned taskId = 0;
    std::optional<long long> value;
    unsigned round = 0;
    unsigned long long slot = 0;          // position in the global schedule, 1-based
    unsigned long long task_quanta = 0;   // quanta the task used

    bool operator==(const Halt&) const = default;
};

struct GeometricOptions {
    unsigned long long steps_per_quantum = 1;
    unsigned max_rounds = 20;
    unsigned long long max_quanta = std::numeric_limits<unsigned long long>::max();
    std::size_t stop_after_halts = 0;   // 0: never stop early
    bool record_events = true;
    std::function<void(const Event&)> on_event{};
};

struct RunResult {
    std::vector<Event> events;
    std::vector<Halt> halts;
    std::vector<std::pair<unsigned, std::string>> failures;
    std::vector<unsigned long long> quanta_per_task;   // index i-1 for task i
    unsigned long long total_quanta = 0;
    unsigned rounds = 0;
    bool exhausted = false;   // every task of a finite family finished

    /// Running maximum of the halting values, the stream the scheduler is meant to print.
    std::vector<long long> running_max() const {
        std::vector<long long> out;
        for (const auto& h : halts)
            if (h.value) out.push_back(out.empty() ? *h.value : std::max(out.back(), *h.value));
        return out;
    }
};

/// `factory(i)` supplies task i (1-based) when first scheduled; nullptr ends the family.
using TaskFactory = std::function<std::unique_ptr<Task>(unsigned)>;

inline RunResult run_geometric(const TaskFactory& factory, const std::function<void(const Halt&)>& onHalt,
                               const GeometricOptions& opt = {}) {
    struct Slot {
        std::unique_ptr<Task> task;
        TaskStatus status = TaskStatus::running;
    };
    std::vector<Slot> tasks;
    bool family_ended = false;
    RunResult res;
    unsigned long long slot = 0;
    auto emit = [&](const Event& e) {
        if (opt.record_events) res.events.push_back(e);
        if (opt.on_event) opt.on_event(e);
    };
    for (unsigned R = 1; R <= opt.max_rounds; ++R) {
        if (!family_ended && tasks.size() < R) {
            auto t = factory(R);
            if (t) {
                tasks.push_back({std::move(t), TaskStatus::running});
                res.quanta_per_task.push_back(0);
            } else {
                family_ended = true;
            }
        }
        res.rounds = R;
        const unsigned long long slots = (1ULL << R) - 1;
        for (unsigned long long k = 1; k <= slots; ++k) {
            ++slot;
            const unsigned id = static_cast<unsigned>(std::countr_zero(k)) + 1;
            if (id > tasks.size()) continue;
            Slot& s = tasks[id - 1];
            if (s.status != TaskStatus::running) continue;
            if (res.total_quanta >= opt.max_quanta) return res;
            ++res.total_quanta;
            auto& used = res.quanta_per_task[id - 1];
            ++used;
            try {
                for (unsigned long long st = 0; st < opt.steps_per_quantum; ++st) {
                    const StepResult r = s.task->step();
                    if (r.halted) {
                        s.status = TaskStatus::halted;
                        Halt h{id, r.value, R, slot, used};
                        res.halts.push_back(h);
                        if (onHalt) onHalt(h);
                        if (opt.stop_after_halts && res.halts.size() >= opt.stop_after_halts) {
                            emit({R, id, used, s.status});
                            return res;
                        }
                        break;
                    }
                }
            } catch (const std::exception& e) {
                s.status = TaskStatus::failed;
                res.failures.emplace_back(id, e.what());
            }
            emit({R, id, used, s.status});
        }
        if (family_ended) {
            bool live = false;
            for (const auto& s : tasks) live = live || s.status == TaskStatus::running;
            if (!live) {
                res.exhausted = true;
                return res;
            }
        }
    }
    return res;
}

/// Convenience overload for a fixed list of tasks.
inline RunResult run_geometric(std::vector<std::unique_ptr<Task>> tasks, const std::function<void(const Halt&)>& onHalt,
                               const GeometricOptions& opt = {}) {
    auto shared = std::make_shared<std::vector<std::unique_ptr<Task>>>(std::move(tasks));
    return run_geometric(
        [shared](unsigned i) -> std::unique_ptr<Task> {
            if (i > shared->size()) return nullptr;
            return std::move((*shared)[i - 1]);
        },
        onHalt, opt);
}

enum class DayNightWinner { day, night, undecided };

struct DayNightResult {
    DayNightWinner winner = DayNightWinner::undecided;
    std::optional<long long> value;
    unsigned long long day_steps = 0, night_steps = 0;
};

/// Alternates one step of each task, day first, until one halts or `cap` total steps pass.
inline DayNightResult day_night(Task& day, Task& night,
                                unsigned long long cap = std::numeric_limits<unsigned long long>::max()) {
    DayNightResult r;
    while (r.day_steps + r.night_steps < cap) {
        const bool is_day = r.day_steps == r.night_steps;
        const StepResult s = is_day ? day.step() : night.step();
        (is_day ? r.day_steps : r.night_steps)++;
        if (s.halted) {
            r.winner = is_day ? DayNightWinner::day : DayNightWinner::night;
            r.value = s.value;
            return r;
        }
    }
    return r;
}

} // namespace picardkit
