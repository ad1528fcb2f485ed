#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <sys/types.h>

#include <json.hpp>

#include "morkit/errors.hpp"
#include "morkit/models.hpp"
#include "morkit/operators.hpp"
#include "morkit/vector_array.hpp"

namespace morkit::remote
{

using nlohmann::json;

inline constexpr int protocol_version = 1;

/// Connection lost, timed out or unusable after an earlier failure.
class SessionError : public Error
{
   public:
    using Error::Error;
};

/// A line from the server that is not a valid protocol response, or a
/// message rejected by the payload guard.
class ProtocolError : public Error
{
   public:
    using Error::Error;
};

/// Error reported by the server: code is one of BAD_REQUEST, UNKNOWN_OP,
/// OBJECT_FREED, DIM_MISMATCH, SOLVER_FAILURE.
class RemoteError : public Error
{
   public:
    RemoteError(std::string code, const std::string& message)
        : Error(code + ": " + message), code_(std::move(code))
    {
    }
    const std::string& code() const noexcept { return code_; }

   private:
    std::string code_;
};

/// {"rows": r, "cols": c, "data": [[row 0], [row 1], ...]}
json encode_matrix(const Matrix& m);
/// Throws ProtocolError on malformed input.
Matrix decode_matrix(const json& j);

struct Response
{
    std::int64_t id = 0;
    bool ok = false;
    json result;
    std::string code;
    std::string message;
};

/// Throws ProtocolError for anything that is not a well-formed response.
Response parse_response(std::string_view line);

/// Length of the longest JSON array anywhere inside `j`.
std::size_t longest_array(const json& j);

struct SessionOptions
{
    std::chrono::milliseconds timeout{60'000};
    /// Reject (ProtocolError) any message other than dofs containing a JSON
    /// array with at least `dim` entries, i.e. anything shaped like a full
    /// vector.
    bool payload_guard = false;
};

struct SessionStats
{
    std::size_t requests = 0;
    std::size_t bytes_sent = 0;
    std::size_t bytes_received = 0;
    /// over all messages except dofs
    std::size_t max_message_bytes = 0;
    std::size_t max_array_length = 0;
    std::int64_t last_id = 0;
};

/// One child process speaking newline-delimited JSON over its stdin/stdout.
///
/// Exactly one request is in flight at a time; calls from several threads
/// are serialized. Any transport failure (EOF, timeout, garbage) breaks the
/// session and kills the child; every later call throws SessionError.
class Session
{
   public:
    static std::shared_ptr<Session> spawn(const std::vector<std::string>& argv, SessionOptions options = {});
    ~Session();

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    /// Sends {"id", "op", "args"} and returns "result". Throws RemoteError
    /// for error responses.
    json call(const std::string& op, json args = json::object());

    /// Writes `line` verbatim and returns the next response line. For
    /// robustness testing of the server.
    std::string exchange_raw(const std::string& line);

    /// Sends shutdown and waits for the child to exit. Returns the number of
    /// client-created objects the server still held.
    std::size_t shutdown();

    bool alive() const;
    void kill();
    pid_t pid() const { return pid_; }

    /// Enables the payload guard with threshold `dim` (0 disables).
    void set_guard_dim(std::size_t dim);
    SessionStats stats() const;

   private:
    Session() = default;
    void send_line(const std::string& line, std::chrono::steady_clock::time_point deadline);
    std::string read_line(std::chrono::steady_clock::time_point deadline);
    [[noreturn]] void fail(const std::string& what);
    void reap(std::chrono::milliseconds wait);

    mutable std::mutex mutex_;
    int fd_ = -1;
    pid_t pid_ = -1;
    std::int64_t next_id_ = 1;
    std::string buffer_;
    bool broken_ = false;
    std::string broken_reason_;
    SessionOptions options_;
    std::size_t guard_dim_ = 0;
    SessionStats stats_;
};

using SessionPtr = std::shared_ptr<Session>;

/// Handle to a vector array living in the server. Every operation is one
/// protocol call; only small matrices cross the wire.
class RemoteVectorArray final : public VectorArray
{
   public:
    /// `owned` handles are freed on destruction.
    RemoteVectorArray(SessionPtr session, std::int64_t id, std::size_t dim, std::size_t len, bool owned = true);
    /// From a {"id", "dim", "len"} result.
    static std::unique_ptr<RemoteVectorArray> from_handle(SessionPtr session, const json& handle, bool owned = true);
    ~RemoteVectorArray() override;

    std::size_t dim() const override { return dim_; }
    std::size_t len() const override { return len_; }
    std::string backend() const override { return "remote"; }
    std::int64_t id() const { return id_; }
    const SessionPtr& session() const { return session_; }

    std::unique_ptr<VectorArray> copy() const override;
    std::unique_ptr<VectorArray> zeros(std::size_t count) const override;
    void append(const VectorArray& other) override;
    std::unique_ptr<VectorArray> lincomb(const Matrix& coeffs) const override;
    void axpy(std::span<const double> alpha, const VectorArray& x) override;
    using VectorArray::axpy;
    void scal(std::span<const double> alpha) override;
    using VectorArray::scal;
    Matrix inner(const VectorArray& other) const override;
    Matrix dofs(std::span<const std::size_t> indices) const override;
    std::unique_ptr<VectorArray> select(std::span<const std::size_t> indices) const override;
    void remove(std::span<const std::size_t> indices) override;

   private:
    const RemoteVectorArray& peer(const VectorArray& other, const char* what) const;
    void replace(std::unique_ptr<RemoteVectorArray> other);

    SessionPtr session_;
    std::int64_t id_;
    std::size_t dim_;
    std::size_t len_;
    bool owned_;
};

/// Server-side operator; apply / apply_inverse return new remote arrays.
class RemoteOperator final : public Operator
{
   public:
    RemoteOperator(SessionPtr session, std::int64_t id, std::size_t source_dim, std::size_t range_dim, bool linear,
                   bool parametric);

    bool linear() const override { return linear_; }
    bool parametric() const override { return parametric_; }
    std::string kind() const override { return "remote"; }
    std::int64_t id() const { return id_; }

    std::unique_ptr<VectorArray> apply(const VectorArray& U, const Parameter& mu = {}) const override;
    std::unique_ptr<VectorArray> apply_inverse(const VectorArray& V, const Parameter& mu = {},
                                               const SolverOptions& options = {}) const override;
    OperatorPtr assemble(const Parameter& mu = {}) const override;

   private:
    const RemoteVectorArray& remote(const VectorArray& a, const char* what) const;

    SessionPtr session_;
    std::int64_t id_;
    bool linear_;
    bool parametric_;
};

/// Stationary model whose operator is the lincomb of the server's affine
/// terms and whose solve runs in the server.
class RemoteModel final : public StationaryModel
{
   public:
    RemoteModel(SessionPtr session, OperatorPtr op, OperatorPtr rhs, std::map<std::string, OperatorPtr> products,
                ParameterSpace parameter_space);

    std::unique_ptr<VectorArray> solve(const Parameter& mu) const override;
    const SessionPtr& session() const { return session_; }

   private:
    SessionPtr session_;
};

struct RemoteModelHandle
{
    std::shared_ptr<RemoteModel> model;
    SessionPtr session;
};

/// Spawns the server, performs the handshake (protocol version, dim,
/// parameter space) and wraps the server's model. Throws SessionError on
/// timeout, crash or version mismatch.
RemoteModelHandle spawn_remote_model(const std::vector<std::string>& argv, SessionOptions options = {});

// ---------------------------------------------------------------------------
// server side

struct ServerOptions
{
    int version = protocol_version;
    /// fault injection, counted in received lines (0 = off)
    std::size_t crash_after = 0;
    std::size_t hang_after = 0;
    std::size_t garbage_after = 0;
};

/// Serves `model` over newline-delimited JSON until shutdown or EOF.
/// The operator must be an affine combination of non-parametric terms and the
/// right-hand side non-parametric. Malformed input produces error responses;
/// the loop never terminates because of it. Returns the process exit code.
int serve(const StationaryModel& model, std::istream& in, std::ostream& out, const ServerOptions& options = {});

}  // namespace morkit::remote
