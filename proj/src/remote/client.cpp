#include <algorithm>
#include <set>

#include "morkit/remote.hpp"

namespace morkit::remote
{

namespace
{
json indices_json(std::span<const std::size_t> indices) { return json(std::vector<std::size_t>(indices.begin(), indices.end())); }
}  // namespace

RemoteVectorArray::RemoteVectorArray(SessionPtr session, std::int64_t id, std::size_t dim, std::size_t len, bool owned)
    : session_(std::move(session)), id_(id), dim_(dim), len_(len), owned_(owned)
{
}

std::unique_ptr<RemoteVectorArray> RemoteVectorArray::from_handle(SessionPtr session, const json& handle, bool owned)
{
    if (!handle.is_object() || !handle.contains("id") || !handle.contains("dim") || !handle.contains("len"))
        throw ProtocolError("expected an array handle {id, dim, len}");
    return std::make_unique<RemoteVectorArray>(std::move(session), handle["id"].get<std::int64_t>(),
                                               handle["dim"].get<std::size_t>(), handle["len"].get<std::size_t>(),
                                               owned);
}

RemoteVectorArray::~RemoteVectorArray()
{
    if (!owned_ || !session_) return;
    try {
        if (session_->alive()) session_->call("free", {{"id", id_}});
    } catch (const std::exception&) {
    }
}

const RemoteVectorArray& RemoteVectorArray::peer(const VectorArray& other, const char* what) const
{
    check_same_dim(other, what);
    const auto* r = dynamic_cast<const RemoteVectorArray*>(&other);
    if (!r || r->session_ != session_)
        throw NotSupported(std::string(what) + ": remote arrays only combine with arrays of the same session");
    return *r;
}

void RemoteVectorArray::replace(std::unique_ptr<RemoteVectorArray> other)
{
    std::swap(id_, other->id_);
    std::swap(len_, other->len_);
    std::swap(owned_, other->owned_);
}

std::unique_ptr<VectorArray> RemoteVectorArray::copy() const
{
    return from_handle(session_, session_->call("copy", {{"array", id_}}));
}

std::unique_ptr<VectorArray> RemoteVectorArray::zeros(std::size_t count) const
{
    return lincomb(Matrix::Zero(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(len_)));
}

void RemoteVectorArray::append(const VectorArray& other)
{
    const auto& r = peer(other, "append");
    session_->call("append", {{"array", id_}, {"other", r.id_}});
    len_ += r.len_;
}

std::unique_ptr<VectorArray> RemoteVectorArray::lincomb(const Matrix& coeffs) const
{
    if (static_cast<std::size_t>(coeffs.cols()) != len_) throw DimensionMismatch("lincomb: coefficient columns != len");
    return from_handle(session_, session_->call("lincomb", {{"array", id_}, {"coeffs", encode_matrix(coeffs)}}));
}

void RemoteVectorArray::axpy(std::span<const double> alpha, const VectorArray& x)
{
    const auto& r = peer(x, "axpy");
    if (r.len_ != len_ && r.len_ != 1) throw DimensionMismatch("axpy: length mismatch");
    if (alpha.size() != 1 && alpha.size() != len_) throw DimensionMismatch("axpy: alpha length mismatch");
    session_->call("axpy", {{"array", id_}, {"alpha", std::vector<double>(alpha.begin(), alpha.end())}, {"x", r.id_}});
}

void RemoteVectorArray::scal(std::span<const double> alpha)
{
    if (alpha.size() != 1 && alpha.size() != len_) throw DimensionMismatch("scal: alpha length mismatch");
    Matrix d = Matrix::Zero(static_cast<Eigen::Index>(len_), static_cast<Eigen::Index>(len_));
    for (std::size_t i = 0; i < len_; ++i)
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = alpha.size() == 1 ? alpha[0] : alpha[i];
    auto scaled = from_handle(session_, session_->call("lincomb", {{"array", id_}, {"coeffs", encode_matrix(d)}}));
    replace(std::move(scaled));
}

Matrix RemoteVectorArray::inner(const VectorArray& other) const
{
    const auto& r = peer(other, "inner");
    return decode_matrix(session_->call("inner", {{"a", id_}, {"b", r.id_}}));
}

Matrix RemoteVectorArray::dofs(std::span<const std::size_t> indices) const
{
    for (auto k : indices)
        if (k >= dim_) throw IndexOutOfRange("dofs: index " + std::to_string(k) + " out of range");
    return decode_matrix(session_->call("dofs", {{"array", id_}, {"indices", indices_json(indices)}}));
}

std::unique_ptr<VectorArray> RemoteVectorArray::select(std::span<const std::size_t> indices) const
{
    for (auto k : indices)
        if (k >= len_) throw IndexOutOfRange("select: index out of range");
    return from_handle(session_, session_->call("copy", {{"array", id_}, {"indices", indices_json(indices)}}));
}

void RemoteVectorArray::remove(std::span<const std::size_t> indices)
{
    std::set<std::size_t> drop;
    for (auto k : indices) {
        if (k >= len_) throw IndexOutOfRange("remove: index out of range");
        drop.insert(k);
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < len_; ++i)
        if (!drop.count(i)) keep.push_back(i);
    auto kept = from_handle(session_, session_->call("copy", {{"array", id_}, {"indices", keep}}));
    replace(std::move(kept));
}

// ---------------------------------------------------------------------------

RemoteOperator::RemoteOperator(SessionPtr session, std::int64_t id, std::size_t source_dim, std::size_t range_dim,
                               bool linear, bool parametric)
    : Operator(source_dim, range_dim), session_(std::move(session)), id_(id), linear_(linear), parametric_(parametric)
{
}

const RemoteVectorArray& RemoteOperator::remote(const VectorArray& a, const char* what) const
{
    const auto* r = dynamic_cast<const RemoteVectorArray*>(&a);
    if (!r || r->session() != session_)
        throw NotSupported(std::string(what) + ": remote operators only act on arrays of their session");
    return *r;
}

std::unique_ptr<VectorArray> RemoteOperator::apply(const VectorArray& U, const Parameter& mu) const
{
    check_source(U, "apply");
    const auto& r = remote(U, "apply");
    return RemoteVectorArray::from_handle(session_,
                                          session_->call("apply", {{"op", id_}, {"array", r.id()}, {"mu", to_json(mu)}}));
}

std::unique_ptr<VectorArray> RemoteOperator::apply_inverse(const VectorArray& V, const Parameter& mu,
                                                           const SolverOptions&) const
{
    check_range(V, "apply_inverse");
    const auto& r = remote(V, "apply_inverse");
    return RemoteVectorArray::from_handle(
        session_, session_->call("apply_inverse", {{"op", id_}, {"array", r.id()}, {"mu", to_json(mu)}}));
}

OperatorPtr RemoteOperator::assemble(const Parameter&) const { return shared_from_this(); }

// ---------------------------------------------------------------------------

RemoteModel::RemoteModel(SessionPtr session, OperatorPtr op, OperatorPtr rhs,
                         std::map<std::string, OperatorPtr> products, ParameterSpace parameter_space)
    : StationaryModel(std::move(op), std::move(rhs), std::move(products), std::move(parameter_space)),
      session_(std::move(session))
{
}

std::unique_ptr<VectorArray> RemoteModel::solve(const Parameter& mu) const
{
    return RemoteVectorArray::from_handle(session_, session_->call("solve", {{"mu", to_json(mu)}}));
}

RemoteModelHandle spawn_remote_model(const std::vector<std::string>& argv, SessionOptions options)
{
    auto session = Session::spawn(argv, options);
    json hello;
    try {
        hello = session->call("hello", {{"version", protocol_version}});
    } catch (const RemoteError& e) {
        session->kill();
        throw SessionError(std::string("handshake rejected: ") + e.what());
    }
    const int version = hello.value("version", -1);
    if (version != protocol_version) {
        session->kill();
        throw SessionError("protocol version mismatch: client " + std::to_string(protocol_version) + ", server " +
                           std::to_string(version));
    }
    const auto dim = hello.at("dim").get<std::size_t>();
    if (options.payload_guard) session->set_guard_dim(dim);

    const json info = session->call("model_info");
    auto make_op = [&](const json& h) {
        return std::make_shared<RemoteOperator>(session, h.at("id").get<std::int64_t>(), h.at("source_dim").get<std::size_t>(),
                                                h.at("range_dim").get<std::size_t>(), h.value("linear", true),
                                                h.value("parametric", false));
    };
    std::vector<OperatorPtr> ops;
    std::vector<ParameterFunctional> coefficients;
    for (const auto& t : info.at("operator")) {
        ops.push_back(make_op(t.at("op")));
        coefficients.push_back(ParameterFunctional::from_json(t.at("coefficient")));
    }
    std::shared_ptr<const VectorArray> rhs_vectors = RemoteVectorArray::from_handle(session, info.at("rhs"), false);
    auto rhs = std::make_shared<VectorOperator>(rhs_vectors);
    std::map<std::string, OperatorPtr> products;
    for (const auto& [name, h] : info.at("products").items()) products[name] = make_op(h);

    auto model = std::make_shared<RemoteModel>(session, make_lincomb(std::move(ops), std::move(coefficients)), rhs,
                                               std::move(products), parameter_space_from_json(hello.at("parameter_space")));
    return {std::move(model), std::move(session)};
}

}  // namespace morkit::remote
