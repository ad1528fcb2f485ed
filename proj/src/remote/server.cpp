#include <chrono>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <thread>
#include <variant>

#include "morkit/remote.hpp"

namespace morkit::remote
{

namespace
{

struct Failure
{
    std::string code;
    std::string message;
};

[[noreturn]] void bad_request(const std::string& msg) { throw Failure{"BAD_REQUEST", msg}; }

class Server
{
   public:
    Server(const StationaryModel& model, const ServerOptions& options) : model_(model), options_(options)
    {
        for (const auto& t : affine_terms(model.op())) {
            if (t.op->parametric()) throw NotSupported("serve: operator terms must be non-parametric");
            terms_.push_back({t.coefficient, add(t.op, false)});
        }
        rhs_ = add(std::shared_ptr<VectorArray>(model.rhs()->as_range_array({})), false);
        for (const auto& [name, p] : model.products()) products_[name] = add(p, false);
    }

    json handle(const std::string& op, const json& args)
    {
        if (op == "hello") return hello(args);
        if (op == "model_info") return model_info();
        if (op == "solve") return array_handle(add(model_.solve(mu(args)), true));
        if (op == "apply") {
            const auto& o = operator_at(args, "op");
            return array_handle(add(o->apply(*array_at(args, "array"), mu(args)), true));
        }
        if (op == "apply_inverse") {
            const auto& o = operator_at(args, "op");
            return array_handle(add(o->apply_inverse(*array_at(args, "array"), mu(args), model_.solver_options()), true));
        }
        if (op == "inner") {
            const auto& a = array_at(args, "a");
            const auto& b = array_at(args, "b");
            const Operator* product = nullptr;
            if (args.contains("product") && !args["product"].is_null()) product = operator_at(args, "product").get();
            return encode_matrix(morkit::inner(*a, *b, product));
        }
        if (op == "lincomb") {
            const auto& a = array_at(args, "array");
            Matrix c;
            try {
                c = decode_matrix(field(args, "coeffs"));
            } catch (const ProtocolError& e) {
                bad_request(e.what());
            }
            return array_handle(add(a->lincomb(c), true));
        }
        if (op == "axpy") {
            auto& a = mutable_array_at(args, "array");
            const auto& x = array_at(args, "x");
            const auto& alpha = field(args, "alpha");
            std::vector<double> al;
            if (alpha.is_number())
                al.push_back(alpha.get<double>());
            else if (alpha.is_array())
                al = alpha.get<std::vector<double>>();
            else
                bad_request("axpy: alpha must be a number or a list");
            a->axpy(al, *x);
            return json::object();
        }
        if (op == "dofs") {
            const auto& a = array_at(args, "array");
            const auto indices = field(args, "indices").get<std::vector<std::size_t>>();
            return encode_matrix(a->dofs(indices));
        }
        if (op == "append") {
            auto& a = mutable_array_at(args, "array");
            const auto& other = array_at(args, "other");
            a->append(*other);
            return json::object();
        }
        if (op == "copy") {
            const auto& a = array_at(args, "array");
            if (args.contains("indices")) {
                const auto indices = args["indices"].get<std::vector<std::size_t>>();
                for (auto i : indices)
                    if (i >= a->len()) bad_request("copy: index out of range");
                return array_handle(add(a->select(indices), true));
            }
            return array_handle(add(a->copy(), true));
        }
        if (op == "len") return array_at(args, "array")->len();
        if (op == "dim") {
            const auto id = object_id(args, "id");
            const auto& e = entry(id);
            if (auto* a = std::get_if<std::shared_ptr<VectorArray>>(&e.object)) return (*a)->dim();
            return std::get<OperatorPtr>(e.object)->source_dim();
        }
        if (op == "free") {
            const auto id = object_id(args, "id");
            if (!entry(id).client_owned) bad_request("object " + std::to_string(id) + " is owned by the server");
            objects_.erase(id);
            freed_.insert(id);
            return json::object();
        }
        if (op == "shutdown") {
            shutdown_ = true;
            std::size_t live = 0;
            for (const auto& [id, e] : objects_) live += e.client_owned ? 1 : 0;
            return {{"live_objects", live}};
        }
        throw Failure{"UNKNOWN_OP", "unknown op '" + op + "'"};
    }

    bool finished() const { return shutdown_; }

   private:
    struct Entry
    {
        std::variant<std::shared_ptr<VectorArray>, OperatorPtr> object;
        bool client_owned;
    };
    struct Term
    {
        ParameterFunctional coefficient;
        std::int64_t id;
    };

    template <class T>
    std::int64_t add(T object, bool client_owned)
    {
        const auto id = next_id_++;
        if constexpr (std::is_same_v<T, OperatorPtr>)
            objects_.emplace(id, Entry{object, client_owned});
        else
            objects_.emplace(id, Entry{std::shared_ptr<VectorArray>(std::move(object)), client_owned});
        return id;
    }

    static const json& field(const json& args, const char* name)
    {
        if (!args.is_object() || !args.contains(name)) bad_request(std::string("missing argument '") + name + "'");
        return args[name];
    }

    static std::int64_t object_id(const json& args, const char* name)
    {
        const auto& v = field(args, name);
        if (!v.is_number_integer()) bad_request(std::string("argument '") + name + "' must be an object id");
        return v.get<std::int64_t>();
    }

    Entry& entry(std::int64_t id)
    {
        const auto it = objects_.find(id);
        if (it != objects_.end()) return it->second;
        if (freed_.count(id)) throw Failure{"OBJECT_FREED", "object " + std::to_string(id) + " was freed"};
        bad_request("unknown object " + std::to_string(id));
    }

    const std::shared_ptr<VectorArray>& array_at(const json& args, const char* name)
    {
        auto& e = entry(object_id(args, name));
        auto* a = std::get_if<std::shared_ptr<VectorArray>>(&e.object);
        if (!a) bad_request(std::string("argument '") + name + "' is not an array");
        return *a;
    }

    const std::shared_ptr<VectorArray>& mutable_array_at(const json& args, const char* name)
    {
        const auto id = object_id(args, name);
        if (!entry(id).client_owned) bad_request("object " + std::to_string(id) + " is read-only");
        return array_at(args, name);
    }

    const OperatorPtr& operator_at(const json& args, const char* name)
    {
        auto& e = entry(object_id(args, name));
        auto* o = std::get_if<OperatorPtr>(&e.object);
        if (!o) bad_request(std::string("argument '") + name + "' is not an operator");
        return *o;
    }

    static Parameter mu(const json& args)
    {
        if (!args.is_object() || !args.contains("mu") || args["mu"].is_null()) return {};
        return parameter_from_json(args["mu"]);
    }

    json array_handle(std::int64_t id)
    {
        const auto& a = std::get<std::shared_ptr<VectorArray>>(objects_.at(id).object);
        return {{"id", id}, {"dim", a->dim()}, {"len", a->len()}};
    }

    json operator_handle(std::int64_t id)
    {
        const auto& o = std::get<OperatorPtr>(objects_.at(id).object);
        return {{"id", id},
                {"source_dim", o->source_dim()},
                {"range_dim", o->range_dim()},
                {"linear", o->linear()},
                {"parametric", o->parametric()}};
    }

    json hello(const json& args)
    {
        if (args.is_object() && args.contains("version") && !args["version"].is_number_integer())
            bad_request("hello: version must be an integer");
        return {{"version", options_.version},
                {"dim", model_.dim()},
                {"parameter_space", to_json(model_.parameter_space())}};
    }

    json model_info()
    {
        json terms = json::array();
        for (const auto& t : terms_) terms.push_back({{"op", operator_handle(t.id)}, {"coefficient", t.coefficient.to_json()}});
        json products = json::object();
        for (const auto& [name, id] : products_) products[name] = operator_handle(id);
        return {{"dim", model_.dim()},
                {"parameter_space", to_json(model_.parameter_space())},
                {"operator", std::move(terms)},
                {"rhs", array_handle(rhs_)},
                {"products", std::move(products)}};
    }

    const StationaryModel& model_;
    ServerOptions options_;
    std::map<std::int64_t, Entry> objects_;
    std::set<std::int64_t> freed_;
    std::int64_t next_id_ = 1;
    std::vector<Term> terms_;
    std::int64_t rhs_ = 0;
    std::map<std::string, std::int64_t> products_;
    bool shutdown_ = false;
};

json error_response(const json& id, const std::string& code, const std::string& message)
{
    return {{"id", id}, {"ok", false}, {"error", {{"code", code}, {"msg", message}}}};
}

}  // namespace

int serve(const StationaryModel& model, std::istream& in, std::ostream& out, const ServerOptions& options)
{
    Server server(model, options);
    std::string line;
    std::size_t received = 0;
    while (std::getline(in, line)) {
        ++received;
        if (options.crash_after > 0 && received > options.crash_after) std::_Exit(3);
        if (options.hang_after > 0 && received > options.hang_after)
            while (true) std::this_thread::sleep_for(std::chrono::hours(1));
        if (options.garbage_after > 0 && received > options.garbage_after) {
            out << "\x01garbage{{\n" << std::flush;
            continue;
        }

        json response;
        json id = nullptr;
        const json request = json::parse(line, nullptr, false);
        if (request.is_discarded() || !request.is_object()) {
            response = error_response(id, "BAD_REQUEST", "request is not a JSON object");
        } else if (!request.contains("id") || !request["id"].is_number_integer()) {
            response = error_response(id, "BAD_REQUEST", "request needs an integer id");
        } else if (!request.contains("op") || !request["op"].is_string()) {
            response = error_response(request["id"], "BAD_REQUEST", "request needs a string op");
        } else {
            id = request["id"];
            const json args = request.contains("args") ? request["args"] : json::object();
            try {
                if (!args.is_object()) bad_request("args must be an object");
                response = {{"id", id}, {"ok", true}, {"result", server.handle(request["op"].get<std::string>(), args)}};
            } catch (const Failure& f) {
                response = error_response(id, f.code, f.message);
            } catch (const DimensionMismatch& e) {
                response = error_response(id, "DIM_MISMATCH", e.what());
            } catch (const SolverError& e) {
                response = error_response(id, "SOLVER_FAILURE", e.what());
            } catch (const std::exception& e) {
                response = error_response(id, "BAD_REQUEST", e.what());
            }
        }
        out << response.dump(-1, ' ', false, json::error_handler_t::replace) << '\n' << std::flush;
        if (server.finished()) return 0;
    }
    return 0;
}

}  // namespace morkit::remote
