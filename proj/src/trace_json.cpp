#include "accel/trace_json.hpp"

namespace accel::trace {

namespace {

Json scalar_to_json(const Scalar& v) {
    switch (v.tag) {
        case Scalar::Tag::Undefined: return nullptr;
        case Scalar::Tag::Bool: return v.b;
        case Scalar::Tag::Int: return v.i;
        case Scalar::Tag::Float: return v.f;
        case Scalar::Tag::Str: return v.s;
    }
    return nullptr;
}

Scalar scalar_from_json(const Json& j) {
    if (j.is_null()) return Scalar::undefined();
    if (j.is_boolean()) return Scalar::boolean(j.get<bool>());
    if (j.is_number_integer()) return Scalar::integer(j.get<int64_t>());
    if (j.is_number_float()) return Scalar::number(j.get<double>());
    if (j.is_string()) return Scalar::str(j.get<std::string>());
    throw TraceJsonError("constant value must be a JSON scalar");
}

}  // namespace

Json trace_to_json(const TraceP& t) {
    if (!t) throw TraceJsonError("null trace node");
    Json j;
    switch (t->kind) {
        case Kind::Unknown:
            j["kind"] = "unknown";
            break;
        case Kind::Constant:
            j["kind"] = "constant";
            j["value"] = scalar_to_json(t->value);
            break;
        case Kind::Var:
            j["kind"] = "var";
            j["name"] = t->name;
            break;
        case Kind::Binop:
            j["kind"] = "binop";
            j["op"] = t->op;
            j["left"] = trace_to_json(t->kids[0]);
            j["right"] = trace_to_json(t->kids[1]);
            break;
        case Kind::Block: {
            j["kind"] = "block";
            Json body = Json::array();
            for (const auto& k : t->kids) body.push_back(trace_to_json(k));
            j["body"] = std::move(body);
            break;
        }
        case Kind::If:
            j["kind"] = "if";
            j["cond"] = trace_to_json(t->kids[0]);
            j["then"] = trace_to_json(t->kids[1]);
            j["else"] = trace_to_json(t->kids[2]);
            break;
        case Kind::While:
            j["kind"] = "while";
            j["cond"] = trace_to_json(t->kids[0]);
            j["body"] = trace_to_json(t->kids[1]);
            break;
        case Kind::Let:
            j["kind"] = "let";
            j["name"] = t->name;
            j["value"] = trace_to_json(t->kids[0]);
            break;
        case Kind::Set:
            j["kind"] = "set";
            j["target"] = trace_to_json(t->kids[0]);
            j["value"] = trace_to_json(t->kids[1]);
            break;
        case Kind::Label:
            j["kind"] = "label";
            j["name"] = t->name;
            j["body"] = trace_to_json(t->kids[0]);
            break;
        case Kind::Break:
            j["kind"] = "break";
            j["name"] = t->name;
            j["value"] = trace_to_json(t->kids[0]);
            break;
        case Kind::Event:
            j["kind"] = "event";
            j["event"] = t->name;
            j["arg"] = trace_to_json(t->kids[0]);
            j["env"] = trace_to_json(t->kids[1]);
            j["handler"] = t->handler;
            break;
        case Kind::Respond:
            j["kind"] = "respond";
            j["value"] = trace_to_json(t->kids[0]);
            break;
        case Kind::Env: {
            j["kind"] = "env";
            Json entries = Json::array();
            for (const auto& [name, addr] : t->fields) {
                Json e;
                e["name"] = name;
                e["addr"] = trace_to_json(addr);
                entries.push_back(std::move(e));
            }
            j["entries"] = std::move(entries);
            break;
        }
        case Kind::EnvRead:
            j["kind"] = "envRead";
            j["env"] = trace_to_json(t->kids[0]);
            j["name"] = t->name;
            break;
        case Kind::EnvAddr:
            j["kind"] = "envAddr";
            j["env"] = trace_to_json(t->kids[0]);
            j["name"] = t->name;
            break;
        case Kind::VarAddr:
            j["kind"] = "varAddr";
            j["name"] = t->name;
            break;
        case Kind::Member:
            j["kind"] = "member";
            j["object"] = trace_to_json(t->kids[0]);
            j["name"] = t->name;
            break;
        case Kind::Index:
            j["kind"] = "index";
            j["object"] = trace_to_json(t->kids[0]);
            j["index"] = trace_to_json(t->kids[1]);
            break;
        case Kind::ObjectLit: {
            j["kind"] = "object";
            Json entries = Json::array();
            for (const auto& [name, v] : t->fields) {
                Json e;
                e["name"] = name;
                e["value"] = trace_to_json(v);
                entries.push_back(std::move(e));
            }
            j["entries"] = std::move(entries);
            break;
        }
        case Kind::ArrayLit: {
            j["kind"] = "array";
            Json items = Json::array();
            for (const auto& k : t->kids) items.push_back(trace_to_json(k));
            j["items"] = std::move(items);
            break;
        }
    }
    return j;
}

TraceP trace_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw TraceJsonError("trace node must be an object with a 'kind' field");
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "unknown") return t_unknown();
        if (kind == "constant") return t_const(scalar_from_json(j.at("value")));
        if (kind == "var") return t_var(j.at("name").get<std::string>());
        if (kind == "binop")
            return t_binop(j.at("op").get<std::string>(), trace_from_json(j.at("left")),
                           trace_from_json(j.at("right")));
        if (kind == "block") {
            std::vector<TraceP> body;
            for (const auto& k : j.at("body")) body.push_back(trace_from_json(k));
            return t_block(std::move(body));
        }
        if (kind == "if")
            return t_if(trace_from_json(j.at("cond")), trace_from_json(j.at("then")),
                        trace_from_json(j.at("else")));
        if (kind == "while")
            return t_while(trace_from_json(j.at("cond")), trace_from_json(j.at("body")));
        if (kind == "let")
            return t_let(j.at("name").get<std::string>(), trace_from_json(j.at("value")));
        if (kind == "set")
            return t_set(trace_from_json(j.at("target")), trace_from_json(j.at("value")));
        if (kind == "label")
            return t_label(j.at("name").get<std::string>(), trace_from_json(j.at("body")));
        if (kind == "break")
            return t_break(j.at("name").get<std::string>(), trace_from_json(j.at("value")));
        if (kind == "event")
            return t_event(j.at("event").get<std::string>(), trace_from_json(j.at("arg")),
                           trace_from_json(j.at("env")), j.at("handler").get<int>());
        if (kind == "respond") return t_respond(trace_from_json(j.at("value")));
        if (kind == "env") {
            std::vector<std::pair<std::string, TraceP>> entries;
            for (const auto& e : j.at("entries"))
                entries.emplace_back(e.at("name").get<std::string>(),
                                     trace_from_json(e.at("addr")));
            return t_env(std::move(entries));
        }
        if (kind == "envRead")
            return t_env_read(trace_from_json(j.at("env")), j.at("name").get<std::string>());
        if (kind == "envAddr")
            return t_env_addr(trace_from_json(j.at("env")), j.at("name").get<std::string>());
        if (kind == "varAddr") return t_var_addr(j.at("name").get<std::string>());
        if (kind == "member")
            return t_member(trace_from_json(j.at("object")), j.at("name").get<std::string>());
        if (kind == "index")
            return t_index(trace_from_json(j.at("object")), trace_from_json(j.at("index")));
        if (kind == "object") {
            std::vector<std::pair<std::string, TraceP>> entries;
            for (const auto& e : j.at("entries"))
                entries.emplace_back(e.at("name").get<std::string>(),
                                     trace_from_json(e.at("value")));
            return t_object(std::move(entries));
        }
        if (kind == "array") {
            std::vector<TraceP> items;
            for (const auto& k : j.at("items")) items.push_back(trace_from_json(k));
            return t_array(std::move(items));
        }
    } catch (const Json::exception& e) {
        throw TraceJsonError("malformed '" + kind + "' node: " + e.what());
    }
    throw TraceJsonError("unknown trace node kind '" + kind + "'");
}

Json handler_table_to_json(const HandlerTable& table) {
    Json handlers = Json::array();
    for (const auto& [n, h] : table) {
        Json e;
        e["id"] = n;
        e["argId"] = h.arg_id;
        e["envId"] = h.env_id;
        e["body"] = trace_to_json(h.body);
        if (h.env_trace) e["envTrace"] = trace_to_json(h.env_trace);
        handlers.push_back(std::move(e));
    }
    Json j;
    j["handlers"] = std::move(handlers);
    return j;
}

HandlerTable handler_table_from_json(const Json& j) {
    HandlerTable table;
    try {
        for (const auto& e : j.at("handlers")) {
            Handler h;
            h.arg_id = e.at("argId").get<std::string>();
            h.env_id = e.at("envId").get<std::string>();
            h.body = trace_from_json(e.at("body"));
            if (e.contains("envTrace")) h.env_trace = trace_from_json(e["envTrace"]);
            table[e.at("id").get<int>()] = std::move(h);
        }
    } catch (const Json::exception& e) {
        throw TraceJsonError(std::string("malformed handler table: ") + e.what());
    }
    return table;
}

std::string serialize_handler_table(const HandlerTable& table) {
    return handler_table_to_json(table).dump(2) + "\n";
}

HandlerTable deserialize_handler_table(const std::string& bytes) {
    Json j = Json::parse(bytes, nullptr, false);
    if (j.is_discarded()) throw TraceJsonError("handler table is not valid JSON");
    return handler_table_from_json(j);
}

}  // namespace accel::trace
