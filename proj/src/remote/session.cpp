#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "morkit/remote.hpp"

namespace morkit::remote
{

namespace
{
using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline)
{
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    return static_cast<int>(std::clamp<long long>(left, 0, 1'000'000));
}
}  // namespace

std::shared_ptr<Session> Session::spawn(const std::vector<std::string>& argv, SessionOptions options)
{
    if (argv.empty()) throw InvalidArgument("spawn: empty command line");
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
        throw SessionError(std::string("socketpair: ") + std::strerror(errno));

    // exec failure is reported through a close-on-exec pipe
    int status_pipe[2];
    if (::pipe2(status_pipe, O_CLOEXEC) != 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw SessionError(std::string("pipe: ") + std::strerror(errno));
    }

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        ::close(status_pipe[0]);
        ::close(status_pipe[1]);
        throw SessionError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::dup2(fds[1], STDIN_FILENO);
        ::dup2(fds[1], STDOUT_FILENO);
        ::execvp(args[0], args.data());
        const int err = errno;
        [[maybe_unused]] auto n = ::write(status_pipe[1], &err, sizeof err);
        ::_exit(127);
    }
    ::close(fds[1]);
    ::close(status_pipe[1]);
    int err = 0;
    const auto n = ::read(status_pipe[0], &err, sizeof err);
    ::close(status_pipe[0]);
    if (n == sizeof err) {
        ::close(fds[0]);
        ::waitpid(pid, nullptr, 0);
        throw SessionError("cannot execute '" + argv[0] + "': " + std::strerror(err));
    }

    std::shared_ptr<Session> s(new Session());
    s->fd_ = fds[0];
    s->pid_ = pid;
    s->options_ = options;
    return s;
}

Session::~Session()
{
    try {
        if (alive()) shutdown();
    } catch (const std::exception&) {
    }
    kill();
}

bool Session::alive() const
{
    std::lock_guard lock(mutex_);
    return !broken_ && fd_ >= 0;
}

void Session::reap(std::chrono::milliseconds wait)
{
    if (pid_ <= 0) return;
    const auto deadline = Clock::now() + wait;
    while (true) {
        const pid_t r = ::waitpid(pid_, nullptr, WNOHANG);
        if (r == pid_ || (r < 0 && errno != EINTR)) break;
        if (Clock::now() >= deadline) {
            ::kill(pid_, SIGKILL);
            ::waitpid(pid_, nullptr, 0);
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    pid_ = -1;
}

void Session::kill()
{
    std::lock_guard lock(mutex_);
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
    if (pid_ > 0) {
        ::kill(pid_, SIGKILL);
        reap(std::chrono::milliseconds(1000));
    }
    if (!broken_) {
        broken_ = true;
        broken_reason_ = "session closed";
    }
}

void Session::fail(const std::string& what)
{
    broken_ = true;
    broken_reason_ = what;
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
    if (pid_ > 0) {
        ::kill(pid_, SIGKILL);
        reap(std::chrono::milliseconds(1000));
    }
    throw SessionError(what);
}

void Session::send_line(const std::string& line, Clock::time_point deadline)
{
    std::size_t sent = 0;
    while (sent < line.size()) {
        pollfd p{fd_, POLLOUT, 0};
        const int r = ::poll(&p, 1, remaining_ms(deadline));
        if (r < 0 && errno == EINTR) continue;
        if (r <= 0) fail("timeout while sending request");
        const auto n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            fail(std::string("server connection lost: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }
    stats_.bytes_sent += line.size();
}

std::string Session::read_line(Clock::time_point deadline)
{
    char chunk[65536];
    while (true) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            stats_.bytes_received += line.size() + 1;
            return line;
        }
        pollfd p{fd_, POLLIN, 0};
        const int r = ::poll(&p, 1, remaining_ms(deadline));
        if (r < 0 && errno == EINTR) continue;
        if (r == 0) fail("timeout waiting for server response");
        if (r < 0) fail(std::string("poll: ") + std::strerror(errno));
        const auto n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0 && (errno == EINTR || errno == EAGAIN)) continue;
        if (n <= 0) fail("server closed the connection (crashed or exited)");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

json Session::call(const std::string& op, json args)
{
    std::lock_guard lock(mutex_);
    if (broken_) throw SessionError("session unusable: " + broken_reason_);
    const bool guarded = guard_dim_ > 0 && op != "dofs";
    if (guarded && longest_array(args) >= guard_dim_)
        throw ProtocolError("payload guard: request '" + op + "' carries a dim-sized array");

    const std::int64_t id = next_id_++;
    const json request = {{"id", id}, {"op", op}, {"args", std::move(args)}};
    const std::string line = request.dump() + "\n";
    const auto deadline = Clock::now() + options_.timeout;
    send_line(line, deadline);
    ++stats_.requests;
    stats_.last_id = id;
    const std::string reply = read_line(deadline);

    Response r;
    try {
        r = parse_response(reply);
    } catch (const ProtocolError& e) {
        fail(std::string("malformed response: ") + e.what());
    }
    if (r.id != id) fail("response id " + std::to_string(r.id) + " does not match request " + std::to_string(id));

    if (op != "dofs") {
        stats_.max_message_bytes = std::max({stats_.max_message_bytes, line.size(), reply.size() + 1});
        const std::size_t longest = std::max(longest_array(request), r.ok ? longest_array(r.result) : 0);
        stats_.max_array_length = std::max(stats_.max_array_length, longest);
        if (guarded && r.ok && longest_array(r.result) >= guard_dim_)
            throw ProtocolError("payload guard: response to '" + op + "' carries a dim-sized array");
    }
    if (!r.ok) throw RemoteError(r.code, r.message);
    return std::move(r.result);
}

std::string Session::exchange_raw(const std::string& line)
{
    std::lock_guard lock(mutex_);
    if (broken_) throw SessionError("session unusable: " + broken_reason_);
    const auto deadline = Clock::now() + options_.timeout;
    send_line(line.back() == '\n' ? line : line + "\n", deadline);
    return read_line(deadline);
}

std::size_t Session::shutdown()
{
    const json result = call("shutdown");
    const auto live = result.value("live_objects", std::size_t{0});
    std::lock_guard lock(mutex_);
    ::close(fd_);
    fd_ = -1;
    reap(options_.timeout);
    broken_ = true;
    broken_reason_ = "session shut down";
    return live;
}

void Session::set_guard_dim(std::size_t dim)
{
    std::lock_guard lock(mutex_);
    guard_dim_ = dim;
}

SessionStats Session::stats() const
{
    std::lock_guard lock(mutex_);
    return stats_;
}

}  // namespace morkit::remote
