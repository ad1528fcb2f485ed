#pragma once

#include <algorithm>
#include <any>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <typeinfo>
#include <vector>

#include "morkit/errors.hpp"

namespace morkit
{

struct PoolItemError
{
    std::size_t index;
    std::string message;
};

/// Raised by WorkerPool::map when tasks failed; lists every failed item.
class PoolError : public Error
{
   public:
    explicit PoolError(std::vector<PoolItemError> items);
    const std::vector<PoolItemError>& items() const { return items_; }

   private:
    std::vector<PoolItemError> items_;
};

/// Thread-based pool for pure tasks over an immutable shared context.
///
/// Inputs are split into static contiguous chunks of ceil(n / size); chunk c
/// runs on worker c. Results are returned in input order, so deterministic
/// tasks give identical results for every pool size.
class WorkerPool
{
   public:
    explicit WorkerPool(std::size_t size = 1);

    std::size_t size() const { return size_; }

    template <class Out, class In, class Ctx>
    void register_task(const std::string& name, std::function<Out(const In&, const Ctx&)> task)
    {
        std::lock_guard lock(mutex_);
        tasks_[name] = std::move(task);
    }

    bool has_task(const std::string& name) const
    {
        std::lock_guard lock(mutex_);
        return tasks_.count(name) != 0;
    }

    template <class Out, class In, class Ctx>
    std::vector<Out> map(const std::string& name, const std::vector<In>& inputs, std::shared_ptr<const Ctx> shared)
    {
        using Task = std::function<Out(const In&, const Ctx&)>;
        Task task;
        {
            std::lock_guard lock(mutex_);
            auto it = tasks_.find(name);
            if (it == tasks_.end()) throw InvalidArgument("pool: task '" + name + "' is not registered");
            const Task* t = std::any_cast<Task>(&it->second);
            if (!t) throw InvalidArgument("pool: task '" + name + "' registered with different types");
            task = *t;
        }
        if (!shared) throw InvalidArgument("pool: shared context is null");

        const std::size_t n = inputs.size();
        std::vector<std::optional<Out>> results(n);
        std::vector<PoolItemError> errors;
        std::mutex error_mutex;
        last_transfers_ = 0;
        if (n == 0) return {};

        const std::size_t chunk = (n + size_ - 1) / size_;
        const std::size_t workers = (n + chunk - 1) / chunk;
        auto run_chunk = [&](std::size_t w, std::shared_ptr<const Ctx> ctx) {
            ++last_transfers_;
            const std::size_t begin = w * chunk, end = std::min(n, begin + chunk);
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    results[i].emplace(task(inputs[i], *ctx));
                } catch (const std::exception& e) {
                    std::lock_guard lock(error_mutex);
                    errors.push_back({i, e.what()});
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    errors.push_back({i, "unknown exception"});
                }
            }
        };
        if (workers == 1) {
            run_chunk(0, shared);
        } else {
            std::vector<std::thread> threads;
            threads.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run_chunk, w, shared);
            for (auto& t : threads) t.join();
        }
        if (!errors.empty()) {
            std::sort(errors.begin(), errors.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
            throw PoolError(std::move(errors));
        }
        std::vector<Out> out;
        out.reserve(n);
        for (auto& r : results) out.push_back(std::move(*r));
        return out;
    }

    /// Number of workers that received the shared context in the last map.
    std::size_t context_transfers() const { return last_transfers_.load(); }

   private:
    std::size_t size_;
    mutable std::mutex mutex_;
    std::map<std::string, std::any> tasks_;
    std::atomic<std::size_t> last_transfers_{0};
};

/// --workers flag if given, else MORKIT_WORKERS, else 1. Throws
/// InvalidArgument on a malformed or zero value.
std::size_t resolve_pool_size(std::optional<std::size_t> flag);

}  // namespace morkit
