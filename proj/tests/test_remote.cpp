#include <doctest.h>

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "morkit/algorithms.hpp"
#include "morkit/basis_generation.hpp"
#include "morkit/remote.hpp"
#include "morkit/toolbox/thermal_block.hpp"

using namespace morkit;
using namespace morkit::remote;

namespace
{
std::vector<std::string> server(std::vector<std::string> extra = {})
{
    std::vector<std::string> argv{MORKIT_MOCK_SERVER, "--diameter", "0.0625"};
    argv.insert(argv.end(), extra.begin(), extra.end());
    return argv;
}

Parameter diffusion(std::vector<double> v) { return Parameter({{"diffusion", std::move(v)}}); }

const toolbox::ThermalBlockDiscretization& local_block()
{
    static const auto d = toolbox::discretize_thermal_block(toolbox::ThermalBlockProblem{2, 2, 0.0625});
    return d;
}

Matrix dump(const VectorArray& a)
{
    std::vector<std::size_t> all(a.dim());
    std::iota(all.begin(), all.end(), 0);
    return a.dofs(all);
}
}  // namespace

TEST_CASE("matrix encoding round-trips doubles exactly")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(3, 4);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng) * std::pow(10.0, static_cast<double>(i % 9) - 4);
    m(0, 0) = std::numeric_limits<double>::denorm_min();
    m(1, 1) = 0.1;
    const json wire = json::parse(encode_matrix(m).dump());
    const Matrix back = decode_matrix(wire);
    CHECK(back.rows() == 3);
    CHECK(back.cols() == 4);
    CHECK((back.array() == m.array()).all());

    const Matrix empty = decode_matrix(encode_matrix(Matrix(0, 5)));
    CHECK(empty.rows() == 0);
    CHECK(empty.cols() == 5);

    CHECK_THROWS_AS(decode_matrix(json::parse(R"({"rows":2,"cols":1,"data":[[1]]})")), ProtocolError);
    CHECK_THROWS_AS(decode_matrix(json::parse(R"({"rows":1,"cols":1,"data":[["x"]]})")), ProtocolError);
}

TEST_CASE("parse_response rejects malformed lines without crashing")
{
    std::mt19937_64 rng(1);
    const std::string alphabet = "{}[]\":,0123456789.-eE truefalsnulidokresutrorcdemsg\\\x01\xff";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> length(0, 60);
    std::size_t rejected = 0;
    for (int k = 0; k < 1000; ++k) {
        std::string line;
        const int n = length(rng);
        for (int i = 0; i < n; ++i) line += alphabet[pick(rng)];
        try {
            parse_response(line);
        } catch (const ProtocolError&) {
            ++rejected;
        }
    }
    CHECK(rejected >= 990);

    const auto ok = parse_response(R"({"id":3,"ok":true,"result":{"x":1}})");
    CHECK(ok.ok);
    CHECK(ok.id == 3);
    const auto err = parse_response(R"({"id":4,"ok":false,"error":{"code":"OBJECT_FREED","msg":"gone"}})");
    CHECK_FALSE(err.ok);
    CHECK(err.code == "OBJECT_FREED");
    CHECK_THROWS_AS(parse_response(R"({"id":4,"ok":false})"), ProtocolError);
    CHECK_THROWS_AS(parse_response(R"({"ok":true,"result":1})"), ProtocolError);
}

TEST_CASE("handshake reports protocol version, dimension and parameters")
{
    auto h = spawn_remote_model(server());
    CHECK(h.model->dim() == local_block().model->dim());
    CHECK(h.model->parameter_space().ranges().at("diffusion").size() == 4);
    CHECK(h.model->products().count("h1_0_semi") == 1);
    CHECK(h.session->call("dim", {{"id", 1}}).get<std::size_t>() == h.model->dim());
}

TEST_CASE("version mismatch and missing executable are session errors")
{
    CHECK_THROWS_AS(spawn_remote_model(server({"--version", "2"})), SessionError);
    CHECK_THROWS_AS(Session::spawn({"/nonexistent/morkit-server"}), SessionError);
}

TEST_CASE("remote solve equals in-process solve; dofs returns requested entries")
{
    auto h = spawn_remote_model(server());
    const auto mu = diffusion({0.1, 0.5, 0.9, 0.3});
    auto remote_u = h.model->solve(mu);
    auto local_u = local_block().model->solve(mu);
    const std::vector<std::size_t> idx{0, 17, 100, local_u->dim() - 1};
    const Matrix r = remote_u->dofs(idx);
    const Matrix l = local_u->dofs(idx);
    CHECK(r.rows() == 1);
    CHECK(r.cols() == 4);
    CHECK((r - l).cwiseAbs().maxCoeff() <= 1e-12 * l.cwiseAbs().maxCoeff());
}

TEST_CASE("gram_schmidt on remote snapshots gives identity inner products")
{
    auto h = spawn_remote_model(server());
    const auto* product = h.model->product("h1_0_semi").get();
    auto U = h.model->solve(diffusion({1, 1, 1, 1}));
    U->append(*h.model->solve(diffusion({0.1, 1, 0.3, 0.7})));
    auto gs = gram_schmidt(*U, product);
    REQUIRE(gs.basis->len() == 2);
    const Matrix G = inner(*gs.basis, *gs.basis, product);
    CHECK((G - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(gs.basis->backend() == "remote");
}

TEST_CASE("remote array operations equal the in-process reference")
{
    auto h = spawn_remote_model(server());
    const auto& ld = local_block();
    const std::vector<Parameter> mus{diffusion({0.2, 0.4, 0.6, 0.8}), diffusion({1, 0.1, 1, 0.1}),
                                     diffusion({0.5, 0.5, 0.5, 0.5})};
    auto R = h.model->solve(mus[0]);
    auto L = ld.model->solve(mus[0]);
    for (std::size_t k = 1; k < mus.size(); ++k) {
        R->append(*h.model->solve(mus[k]));
        L->append(*ld.model->solve(mus[k]));
    }
    CHECK(R->len() == 3);
    auto close = [](const VectorArray& a, const VectorArray& b) {
        const Matrix x = dump(a);
        const Matrix y = dump(b);
        REQUIRE(x.rows() == y.rows());
        return (x - y).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff());
    };
    CHECK(close(*R, *L));

    Matrix c(2, 3);
    c << 1, -2, 0.5, 0, 3, 1;
    CHECK(close(*R->lincomb(c), *L->lincomb(c)));

    const Matrix gr = R->inner(*R);
    const Matrix gl = L->inner(*L);
    CHECK((gr - gl).cwiseAbs().maxCoeff() <= 1e-12 * gl.cwiseAbs().maxCoeff());

    const Matrix pr = inner(*R, *R, h.model->product("h1_0_semi").get());
    const Matrix pl = inner(*L, *L, ld.h1_0_semi.get());
    CHECK((pr - pl).cwiseAbs().maxCoeff() <= 1e-12 * pl.cwiseAbs().maxCoeff());

    auto R2 = R->copy();
    auto L2 = L->copy();
    const std::vector<double> alpha{0.5, -1.0, 2.0};
    R2->axpy(alpha, *R);
    L2->axpy(alpha, *L);
    CHECK(close(*R2, *L2));
    R2->axpy(-1.0, *R->select_range(1, 2));
    L2->axpy(-1.0, *L->select_range(1, 2));
    CHECK(close(*R2, *L2));

    R2->scal(std::vector<double>{2.0, 0.0, -1.0});
    L2->scal(std::vector<double>{2.0, 0.0, -1.0});
    CHECK(close(*R2, *L2));

    const std::vector<std::size_t> drop{1};
    R2->remove(drop);
    L2->remove(drop);
    CHECK(R2->len() == 2);
    CHECK(close(*R2, *L2));

    auto Z = R->zeros(2);
    CHECK(Z->len() == 2);
    CHECK(dump(*Z).cwiseAbs().maxCoeff() == 0.0);
    auto E = R->zeros(0);
    CHECK(E->len() == 0);
    CHECK(E->zeros(3)->len() == 3);

    CHECK(close(*h.model->op()->apply(*R, mus[1]), *ld.model->op()->apply(*L, mus[1])));
}

TEST_CASE("free then use yields OBJECT_FREED; server-owned objects are protected")
{
    auto h = spawn_remote_model(server());
    auto u = h.model->solve(diffusion({1, 1, 1, 1}));
    const auto id = static_cast<RemoteVectorArray&>(*u).id();
    h.session->call("free", {{"id", id}});
    try {
        h.session->call("len", {{"array", id}});
        FAIL("expected RemoteError");
    } catch (const RemoteError& e) {
        CHECK(e.code() == "OBJECT_FREED");
    }
    try {
        h.session->call("frobnicate");
        FAIL("expected RemoteError");
    } catch (const RemoteError& e) {
        CHECK(e.code() == "UNKNOWN_OP");
    }
    try {
        h.session->call("free", {{"id", 1}});
        FAIL("expected RemoteError");
    } catch (const RemoteError& e) {
        CHECK(e.code() == "BAD_REQUEST");
    }
    auto v = h.model->solve(diffusion({1, 1, 1, 1}));
    try {
        h.session->call("axpy", {{"array", static_cast<RemoteVectorArray&>(*v).id()}, {"alpha", 1.0}, {"x", 1}});
        FAIL("expected RemoteError");
    } catch (const RemoteError& e) {
        CHECK(e.code() == "BAD_REQUEST");
    }
    // the stale handle must not free anything twice
    u.reset();
    CHECK(h.session->alive());
}

TEST_CASE("request ids strictly increase and shutdown frees all handles")
{
    auto h = spawn_remote_model(server());
    {
        auto u = h.model->solve(diffusion({1, 1, 1, 1}));
        auto v = u->copy();
        v->append(*u);
        CHECK(v->len() == 2);
    }
    const auto s = h.session->stats();
    CHECK(s.last_id == static_cast<std::int64_t>(s.requests));
    h.model.reset();
    CHECK(h.session->shutdown() == 0);
    CHECK_FALSE(h.session->alive());
    CHECK_THROWS_AS(h.session->call("hello"), SessionError);
}

TEST_CASE("server fault injection surfaces as session errors without hanging")
{
    SUBCASE("crash")
    {
        auto h = spawn_remote_model(server({"--crash-after", "2"}));
        CHECK_THROWS_AS(h.model->solve(diffusion({1, 1, 1, 1})), SessionError);
        CHECK_FALSE(h.session->alive());
        CHECK_THROWS_AS(h.session->call("hello"), SessionError);
    }
    SUBCASE("hang")
    {
        SessionOptions options;
        options.timeout = std::chrono::milliseconds(300);
        auto h = spawn_remote_model(server({"--hang-after", "2"}), options);
        const auto t0 = std::chrono::steady_clock::now();
        CHECK_THROWS_AS(h.model->solve(diffusion({1, 1, 1, 1})), SessionError);
        CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
    }
    SUBCASE("garbage")
    {
        auto h = spawn_remote_model(server({"--garbage-after", "2"}));
        CHECK_THROWS_AS(h.model->solve(diffusion({1, 1, 1, 1})), SessionError);
    }
    SUBCASE("handshake timeout")
    {
        // hangs on model_info, the second handshake message
        SessionOptions options;
        options.timeout = std::chrono::milliseconds(300);
        CHECK_THROWS_AS(spawn_remote_model(server({"--hang-after", "1"}), options), SessionError);
    }
}

TEST_CASE("server answers 1000 malformed lines with errors and keeps serving")
{
    auto session = Session::spawn(server());
    std::mt19937_64 rng(3);
    const std::string alphabet = "{}[]\":,0123456789.-eE truefalsnulidopargsmyhel\\\t";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> length(1, 80);
    std::size_t errors = 0;
    for (int k = 0; k < 1000; ++k) {
        std::string line;
        const int n = length(rng);
        for (int i = 0; i < n; ++i) line += alphabet[pick(rng)];
        if (k % 10 == 0) line = R"({"id":)" + std::to_string(k) + R"(,"op":"inner","args":{"a":"x","b":[]}})";
        if (k % 10 == 1) line = R"({"id":)" + std::to_string(k) + R"(,"op":"lincomb","args":{"array":1,"coeffs":7}})";
        if (k % 10 == 2) line = R"({"id":)" + std::to_string(k) + R"(,"op":"dofs","args":{"array":99999}})";
        const json reply = json::parse(session->exchange_raw(line), nullptr, false);
        REQUIRE_FALSE(reply.is_discarded());
        if (reply.contains("ok") && !reply["ok"].get<bool>()) ++errors;
    }
    CHECK(errors == 1000);
    CHECK(session->call("hello").at("version").get<int>() == protocol_version);
    CHECK(session->shutdown() == 0);
}

TEST_CASE("greedy through the protocol matches the in-process run; no dim-sized payloads")
{
    SessionOptions options;
    options.payload_guard = true;
    auto h = spawn_remote_model(server(), options);
    const auto& ld = local_block();
    const auto train = ld.model->parameter_space().sample_uniformly(2);

    CoerciveReductor local_reductor{ld.model, ld.h1_0_semi, ParameterFunctional::min_of("diffusion")};
    CoerciveReductor remote_reductor{h.model, h.model->product("h1_0_semi"), ParameterFunctional::min_of("diffusion")};
    const auto l = greedy(*ld.model, local_reductor, train, 1e-4, 8);
    const auto r = greedy(*h.model, remote_reductor, train, 1e-4, 8);

    CHECK(r.basis->backend() == "remote");
    CHECK(r.selected_indices == l.selected_indices);
    REQUIRE(r.max_err_history.size() == l.max_err_history.size());
    for (std::size_t k = 0; k < l.max_err_history.size(); ++k)
        CHECK(std::abs(r.max_err_history[k] - l.max_err_history[k]) <= 1e-10 * l.max_err_history[0]);

    const auto mu = diffusion({0.3, 0.9, 0.15, 0.6});
    auto u_local = l.reconstructor->reconstruct(l.reduced_model->solve(mu));
    auto u_remote = r.reconstructor->reconstruct(r.reduced_model->solve(mu));
    CHECK((dump(*u_local) - dump(*u_remote)).cwiseAbs().maxCoeff() <= 1e-10);

    const auto s = h.session->stats();
    CHECK(s.max_array_length < h.model->dim());
    MESSAGE("requests " << s.requests << ", largest non-dofs message " << s.max_message_bytes << " bytes, dim "
                        << h.model->dim());
}
