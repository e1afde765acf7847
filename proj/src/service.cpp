#include "omtk/service.hpp"

#include "omtk/emit.hpp"
#include "omtk/error.hpp"
#include "omtk/implicit_maps.hpp"
#include "omtk/lowering.hpp"
#include "omtk/model_json.hpp"
#include "omtk/omt_tree.hpp"
#include "omtk/oracle.hpp"
#include "omtk/reports.hpp"

#include "httplib.h"
#include "json.hpp"

#include <cstdio>
#include <vector>

namespace omtk {

using nlohmann::json;

struct Service::Session {
    std::mutex mutex;
    std::string id;
    Model model;
    int cursor = 0;
    json history = json::array();
    std::chrono::system_clock::time_point created_at;
    std::chrono::system_clock::time_point updated_at;
};

namespace {

struct HttpError {
    int status;
    std::string code;
    std::string message;
};

std::int64_t epoch_seconds(std::chrono::system_clock::time_point t)
{
    return std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
}

json parse_body(std::string_view body)
{
    if (body.empty()) {
        return json::object();
    }
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw Error(ErrorCode::MalformedDocument, "request body must be a JSON object");
    }
    return j;
}

std::string string_member(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        throw Error(ErrorCode::MalformedDocument, std::string("request needs a string field '") + key + "'", key);
    }
    return it->get<std::string>();
}

VarId variable_by_name(const json& j, const Model& model, const std::string& slot)
{
    if (!j.is_string()) {
        throw Error(ErrorCode::KindMismatch, "slot '" + slot + "' expects a variable name", slot);
    }
    auto id = model.find_variable(j.get<std::string>());
    if (!id) {
        throw Error(ErrorCode::UnknownVariable, "unknown variable '" + j.get<std::string>() + "'", j.get<std::string>());
    }
    return *id;
}

/// Slot values are decoded by the kind the leaf template declares.
Bindings bindings_from_json(const TemplateSpec& spec, const json& j, const Model& model)
{
    if (!j.is_object()) {
        throw Error(ErrorCode::MalformedDocument, "bindings must be an object");
    }
    Bindings out;
    for (const auto& [name, value] : j.items()) {
        auto slot = std::find_if(spec.slots.begin(), spec.slots.end(), [&](const SlotSpec& s) { return s.name == name; });
        if (slot == spec.slots.end()) {
            throw Error(ErrorCode::KindMismatch, "the template has no slot '" + name + "'", name);
        }
        switch (slot->kind) {
        case SlotKind::Variable: out[name] = variable_by_name(value, model, name); break;
        case SlotKind::VariableList: {
            if (!value.is_array()) {
                throw Error(ErrorCode::KindMismatch, "slot '" + name + "' expects a list of variable names", name);
            }
            std::vector<VarId> vars;
            for (const auto& v : value) {
                vars.push_back(variable_by_name(v, model, name));
            }
            out[name] = std::move(vars);
            break;
        }
        case SlotKind::Expression:
            if (value.is_string()) {
                out[name] = LinearExpr(variable_by_name(value, model, name));
            } else {
                out[name] = expr_from_json(value, model);
            }
            break;
        case SlotKind::Rational: out[name] = rational_from_json(value); break;
        case SlotKind::PositiveInteger:
            if (!value.is_number_integer()) {
                throw Error(ErrorCode::KindMismatch, "slot '" + name + "' expects an integer", name);
            }
            out[name] = value.get<std::int64_t>();
            break;
        }
    }
    return out;
}

ExpandParams params_from_json(const json& j)
{
    if (!j.is_object()) {
        throw Error(ErrorCode::BadParams, "params must be an object");
    }
    ExpandParams p;
    if (!j.contains("n") || !j["n"].is_number_integer()) {
        throw Error(ErrorCode::BadParams, "params need an integer 'n'", "n");
    }
    p.n = j["n"].get<std::int64_t>();
    if (auto it = j.find("prefix"); it != j.end()) {
        if (!it->is_string()) {
            throw Error(ErrorCode::BadParams, "prefix must be a string", "prefix");
        }
        p.prefix = it->get<std::string>();
    }
    if (auto it = j.find("arcs"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) {
            throw Error(ErrorCode::BadParams, "arcs must be a matrix of names", "arcs");
        }
        for (const auto& row : *it) {
            if (!row.is_array()) {
                throw Error(ErrorCode::BadParams, "arcs must be a matrix of names", "arcs");
            }
            std::vector<std::string> names;
            for (const auto& cell : row) {
                if (cell.is_null()) {
                    names.emplace_back();
                } else if (cell.is_string()) {
                    names.push_back(cell.get<std::string>());
                } else {
                    throw Error(ErrorCode::BadParams, "arc entries must be names or null", "arcs");
                }
            }
            p.arcs.push_back(std::move(names));
        }
    }
    return p;
}

json mapping_to_json(const ImplicitMapping& m)
{
    json params = json::array();
    for (const auto& s : m.parameters) {
        params.push_back({{"name", s.name}, {"kind", to_string(s.kind)}});
    }
    return {{"id", m.id}, {"description", m.description}, {"parameters", params}, {"target_nodes", m.target_nodes}};
}

IfThenStrength strength_from(const json& j)
{
    auto it = j.find("if_then_strength");
    if (it == j.end() || it->is_null()) {
        return IfThenStrength::Strong;
    }
    auto s = it->is_string() ? parse_if_then_strength(it->get<std::string>()) : std::nullopt;
    if (!s) {
        throw Error(ErrorCode::MalformedDocument, "if_then_strength must be weak or strong", "if_then_strength");
    }
    return *s;
}

std::uint64_t count_member(const json& j, const char* key, std::uint64_t fallback)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return fallback;
    }
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
        throw Error(ErrorCode::MalformedDocument, std::string(key) + " must be a non-negative integer", key);
    }
    return it->get<std::uint64_t>();
}

Response json_response(const json& j, int status = 200)
{
    return {status, "application/json", j.dump(2) + "\n"};
}

std::vector<std::string> split_path(std::string_view path)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto end = path.find('/', start);
        if (end == std::string_view::npos) {
            end = path.size();
        }
        if (end > start) {
            out.emplace_back(path.substr(start, end - start));
        }
        start = end + 1;
    }
    return out;
}

} // namespace

int http_status_for(std::string_view code)
{
    if (code == "SessionNotFound" || code == "UnknownNode" || code == "UnknownMapping" || code == "UnknownCase" ||
        code == "NotFound") {
        return 404;
    }
    if (code == "CapacityExceeded") {
        return 503;
    }
    if (code == "MalformedDocument" || code == "SchemaMismatch" || code == "ParseError") {
        return 400;
    }
    if (code == "MethodNotAllowed") {
        return 405;
    }
    if (code == "Internal") {
        return 500;
    }
    return 422;
}

Service::Service(ServiceOptions options) : options_(std::move(options)), rng_(std::random_device{}()) {}

Service::~Service() = default;

std::size_t Service::session_count()
{
    std::lock_guard lock(mutex_);
    sweep_expired();
    return sessions_.size();
}

void Service::sweep_expired()
{
    const auto now = options_.clock();
    std::erase_if(sessions_, [&](const auto& kv) {
        std::lock_guard session_lock(kv.second->mutex);
        return now - kv.second->updated_at > options_.session_ttl;
    });
}

std::shared_ptr<Service::Session> Service::create_session()
{
    std::lock_guard lock(mutex_);
    sweep_expired();
    if (sessions_.size() >= options_.max_sessions) {
        throw Error(ErrorCode::CapacityExceeded,
            "session limit of " + std::to_string(options_.max_sessions) + " reached");
    }
    auto s = std::make_shared<Session>();
    do {
        char buf[33];
        std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng_()),
            static_cast<unsigned long long>(rng_()));
        s->id = buf;
    } while (sessions_.contains(s->id));
    s->cursor = load_tree().root();
    s->created_at = s->updated_at = options_.clock();
    sessions_[s->id] = s;
    return s;
}

std::shared_ptr<Service::Session> Service::find_session(const std::string& id)
{
    std::lock_guard lock(mutex_);
    sweep_expired();
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        throw Error(ErrorCode::SessionNotFound, "no session '" + id + "'", id);
    }
    return it->second;
}

namespace {

json session_state(const Model& model, const std::string& id, int cursor, const json& history,
    std::chrono::system_clock::time_point created, std::chrono::system_clock::time_point updated)
{
    const OmtTree& tree = load_tree();
    return {{"id", id}, {"cursor", cursor}, {"node", node_to_json(tree.node(cursor))},
        {"path", tree.path_to(cursor)}, {"history", history}, {"model", model_to_json(model)},
        {"created_at", epoch_seconds(created)}, {"updated_at", epoch_seconds(updated)}};
}

/// A model named by "session" or posted inline as "model".
Model request_model(const json& request, const std::function<Model(const std::string&)>& from_session)
{
    if (auto it = request.find("session"); it != request.end()) {
        if (!it->is_string()) {
            throw Error(ErrorCode::MalformedDocument, "session must be an id string", "session");
        }
        return from_session(it->get<std::string>());
    }
    auto it = request.find("model");
    if (it == request.end()) {
        throw Error(ErrorCode::MalformedDocument, "request needs a 'model' document or a 'session' id", "model");
    }
    return model_from_json(*it);
}

} // namespace

Response Service::handle(std::string_view method, std::string_view path, std::string_view body)
{
    try {
        auto parts = split_path(path);
        if (parts.size() < 2 || parts[0] != "api" || parts[1] != "v1") {
            throw HttpError{404, "NotFound", "no route " + std::string(path)};
        }
        parts.erase(parts.begin(), parts.begin() + 2);
        const bool get = method == "GET";
        const bool post = method == "POST";
        auto route = [&](std::initializer_list<std::string_view> shape) {
            if (parts.size() != shape.size()) {
                return false;
            }
            std::size_t k = 0;
            for (auto s : shape) {
                if (s != "*" && parts[k] != s) {
                    return false;
                }
                ++k;
            }
            return true;
        };
        auto wrong_method = [&] {
            return HttpError{405, "MethodNotAllowed", std::string(method) + " is not allowed on " + std::string(path)};
        };
        auto snapshot = [&](const std::string& id) {
            auto s = find_session(id);
            std::lock_guard lock(s->mutex);
            return s->model;
        };

        if (route({"omt", "tree"})) {
            if (!get) throw wrong_method();
            return {200, "application/json", std::string(builtin_tree_document())};
        }
        if (route({"mappings"})) {
            if (!get) throw wrong_method();
            json out = json::array();
            for (const auto& m : list_mappings()) {
                out.push_back(mapping_to_json(m));
            }
            return json_response(out);
        }
        if (route({"sessions"})) {
            if (!post) throw wrong_method();
            auto s = create_session();
            std::lock_guard lock(s->mutex);
            return json_response(session_state(s->model, s->id, s->cursor, s->history, s->created_at, s->updated_at), 201);
        }
        if (route({"sessions", "*"}) || route({"sessions", "*", "model"})) {
            if (!get) throw wrong_method();
            auto s = find_session(parts[1]);
            std::lock_guard lock(s->mutex);
            if (parts.size() == 3) {
                return {200, "application/json", write_model(s->model)};
            }
            return json_response(session_state(s->model, s->id, s->cursor, s->history, s->created_at, s->updated_at));
        }
        if (route({"sessions", "*", "*"})) {
            if (!post) throw wrong_method();
            const std::string& op = parts[2];
            if (op != "variables" && op != "answers" && op != "constraints" && op != "implicit") {
                throw HttpError{404, "NotFound", "no route " + std::string(path)};
            }
            auto s = find_session(parts[1]);
            const json request = parse_body(body);
            std::lock_guard lock(s->mutex);
            const OmtTree& tree = load_tree();
            json entry = {{"op", op}, {"request", request}};
            // Every branch works on copies, so a failed request leaves the session untouched.
            if (op == "variables") {
                Model next = s->model;
                auto kind = parse_var_kind(string_member(request, "kind"));
                if (!kind) {
                    throw Error(ErrorCode::MalformedDocument, "kind must be binary, integer or continuous", "kind");
                }
                auto bound = [&](const char* key, std::optional<Rational> fallback) -> std::optional<Rational> {
                    auto it = request.find(key);
                    if (it == request.end()) {
                        return fallback;
                    }
                    return it->is_null() ? std::nullopt : std::optional<Rational>(rational_from_json(*it));
                };
                const bool binary = *kind == VarKind::Binary;
                next.add_variable(string_member(request, "name"), *kind,
                    bound("lower", binary ? std::optional<Rational>(0) : std::nullopt),
                    bound("upper", binary ? std::optional<Rational>(1) : std::nullopt));
                s->model = std::move(next);
            } else if (op == "answers") {
                if (tree.node(s->cursor).is_leaf()) {
                    throw Error(ErrorCode::AtLeaf, "the cursor is at leaf " + std::to_string(s->cursor),
                        std::to_string(s->cursor));
                }
                const std::string answer = string_member(request, "answer");
                int next = tree.descend(s->cursor, answer);
                entry["node"] = s->cursor;
                s->cursor = next;
            } else if (op == "constraints") {
                int leaf = s->cursor;
                if (auto it = request.find("leaf"); it != request.end()) {
                    if (!it->is_number_integer()) {
                        throw Error(ErrorCode::MalformedDocument, "leaf must be a node id", "leaf");
                    }
                    leaf = it->get<int>();
                }
                const OmtNode& node = tree.node(leaf);
                if (!node.is_leaf()) {
                    throw Error(ErrorCode::NotInternal, "node " + std::to_string(leaf) + " is not a leaf",
                        std::to_string(leaf));
                }
                auto bindings = bindings_from_json(*node.template_spec, request.value("bindings", json::object()), s->model);
                TypedConstraint c = tree.instantiate(leaf, bindings);
                if (auto it = request.find("label"); it != request.end() && it->is_string()) {
                    c.label = it->get<std::string>();
                }
                Model next = s->model;
                next.add_constraint(std::move(c));
                s->model = std::move(next);
                s->cursor = tree.root();
            } else {
                auto it = request.find("params");
                ExpansionResult expansion =
                    expand(s->model, string_member(request, "mapping"), params_from_json(it == request.end() ? json::object() : *it));
                apply_expansion(s->model, expansion);
                s->cursor = tree.root();
            }
            s->history.push_back(std::move(entry));
            s->updated_at = options_.clock();
            return json_response(session_state(s->model, s->id, s->cursor, s->history, s->created_at, s->updated_at));
        }
        if (route({"models", "*"})) {
            if (!post) throw wrong_method();
            const std::string& op = parts[1];
            if (op != "compile" && op != "solve" && op != "check") {
                throw HttpError{404, "NotFound", "no route " + std::string(path)};
            }
            const json request = parse_body(body);
            Model model = request_model(request, snapshot);
            if (op == "compile") {
                const std::string format = request.value("format", std::string("lp"));
                if (format != "lp" && format != "mps") {
                    throw Error(ErrorCode::MalformedDocument, "format must be lp or mps", "format");
                }
                LowerOptions options;
                options.if_then_strength = strength_from(request);
                CanonicalForm form = lower_model(model, options);
                return {200, "text/plain", format == "lp" ? emit_lp(form) : emit_mps(form)};
            }
            if (op == "solve") {
                EnumerationLimits limits;
                if (auto it = request.find("limits"); it != request.end() && it->is_object()) {
                    limits.max_points = count_member(*it, "max_points", limits.max_points);
                }
                return json_response(to_json(solve_by_enumeration(model, limits), model.variables()));
            }
            LowerOptions options;
            options.if_then_strength = strength_from(request);
            CheckLimits limits;
            BoxOptions box;
            if (auto it = request.find("box"); it != request.end() && it->is_object()) {
                limits.cap = count_member(*it, "cap", limits.cap);
                limits.max_reported = count_member(*it, "max_reported", limits.max_reported);
                box.continuous_interior = static_cast<int>(count_member(*it, "continuous_interior", 0));
            }
            return json_response(to_json(check_model(model, options, limits, box), model.variables()));
        }
        throw HttpError{404, "NotFound", "no route " + std::string(path)};
    } catch (const HttpError& e) {
        return json_response(error_envelope(e.code, e.message, path), e.status);
    } catch (const Error& e) {
        return json_response(error_envelope(e.code_name(), e.what(), e.subject()), http_status_for(e.code_name()));
    } catch (const json::exception& e) {
        return json_response(error_envelope("MalformedDocument", e.what(), ""), 400);
    } catch (const std::exception& e) {
        return json_response(error_envelope("Internal", e.what(), ""), 500);
    }
}

void Service::mount(httplib::Server& server)
{
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        Response r = handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.Get(R"(/api/v1/.*)", forward);
    server.Post(R"(/api/v1/.*)", forward);
    server.Put(R"(/api/v1/.*)", forward);
    server.Delete(R"(/api/v1/.*)", forward);
}

bool serve(const std::string& host, int port, ServiceOptions options)
{
    Service service(std::move(options));
    httplib::Server server;
    service.mount(server);
    return server.listen(host, port);
}

} // namespace omtk
