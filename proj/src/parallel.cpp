#include "morkit/parallel.hpp"

#include <cstdlib>

namespace morkit
{

namespace
{
std::string describe(const std::vector<PoolItemError>& items)
{
    std::string msg = "pool: " + std::to_string(items.size()) + " task(s) failed";
    for (std::size_t k = 0; k < items.size() && k < 5; ++k)
        msg += "; item " + std::to_string(items[k].index) + ": " + items[k].message;
    return msg;
}
}  // namespace

PoolError::PoolError(std::vector<PoolItemError> items) : Error(describe(items)), items_(std::move(items)) {}

WorkerPool::WorkerPool(std::size_t size) : size_(size)
{
    if (size_ == 0) throw InvalidArgument("pool: size must be >= 1");
}

std::size_t resolve_pool_size(std::optional<std::size_t> flag)
{
    if (flag) {
        if (*flag == 0) throw InvalidArgument("--workers must be >= 1");
        return *flag;
    }
    const char* env = std::getenv("MORKIT_WORKERS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw InvalidArgument(std::string("MORKIT_WORKERS must be a positive integer, got '") + env + "'");
    return static_cast<std::size_t>(v);
}

}  // namespace morkit
