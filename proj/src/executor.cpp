#include "accel/executor.hpp"

namespace accel::exec {

using trace::Kind;
using trace::TraceP;

namespace {

// Reaching unknown behavior aborts the language-based sandbox; the invoker
// restarts the request in the slow one.
struct UnknownBehavior : std::runtime_error {
    UnknownBehavior() : std::runtime_error("reached unknown behavior in the trace") {}
};

struct DynTypeError : std::runtime_error {
    explicit DynTypeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExecError : std::runtime_error {
    explicit ExecError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace

CompiledProgram CompiledProgram::from_table(const trace::HandlerTable& table) {
    CompiledProgram p;
    for (const auto& [n, h] : table)
        p.handlers[n] = CompiledHandler{h.arg_id, h.env_id, h.body};
    return p;
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Responded: return "responded";
        case Outcome::NoResponse: return "no-response";
        case Outcome::AbortUnknown: return "abort-unknown";
        case Outcome::AbortDynType: return "abort-type-error";
        case Outcome::AbortInstructionLimit: return "abort-instruction-limit";
        case Outcome::AbortMemoryLimit: return "abort-memory-limit";
        case Outcome::AbortError: return "abort-error";
    }
    return "?";
}

bool outcome_is_bounce(Outcome o) { return o == Outcome::AbortUnknown; }

TraceExecutor::TraceExecutor(const CompiledProgram& program, UpstreamClient& upstream,
                             ResourceLimits limits)
    : program_(program), upstream_(upstream), arena_(limits) {}

Addr TraceExecutor::lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
        if (it->name == name) return it->addr;
    for (auto it = globals_.rbegin(); it != globals_.rend(); ++it)
        if (it->name == name) return it->addr;
    return static_cast<Addr>(-1);
}

DynValue TraceExecutor::eval_value(const trace::TraceP& t) {
    Ev ev = eval(t);
    if (ev.is_break) throw ExecError("break escaped an expression position");
    return ev.value;
}

// Environment constructor entries normally capture an address available at
// the definition site: a variable in scope (&x) or a slot of the enclosing
// function's environment (env.x). Inside a handler body the defining scope is
// gone; entries that cannot resolve lexically alias the stored environment
// that the event expression recorded, entry for entry.
Addr TraceExecutor::resolve_env_entry(const std::string& entry_name,
                                      const trace::TraceP& addr_expr) {
    if (addr_expr->kind == Kind::VarAddr) {
        Addr a = lookup(addr_expr->name);
        if (a != static_cast<Addr>(-1)) return a;
    } else if (addr_expr->kind == Kind::EnvAddr) {
        // The environment expression is a pure variable/slot read; failure
        // just means the defining scope is gone.
        try {
            DynValue env = eval_value(addr_expr->kids[0]);
            if (env.tag != DynValue::Tag::Env)
                throw DynTypeError("environment address read from a non-environment");
            for (const auto& [k, addr] : arena_.env(env.ref))
                if (k == addr_expr->name) return addr;
        } catch (const ExecError&) {
        }
    } else {
        throw ExecError("malformed environment entry");
    }
    if (current_env_ && current_env_->tag == DynValue::Tag::Env) {
        for (const auto& [k, addr] : arena_.env(current_env_->ref))
            if (k == entry_name) return addr;
    }
    throw ExecError("no address for captured variable '" + entry_name + "'");
}

void TraceExecutor::eval_scoped_block(const trace::TraceP& block, Ev& out) {
    size_t mark = scope_.size();
    for (const auto& child : block->kids) {
        Ev ev = eval(child);
        if (ev.is_break) {
            scope_.resize(mark);
            out = std::move(ev);
            return;
        }
        out.value = std::move(ev.value);
    }
    scope_.resize(mark);
}

TraceExecutor::Ev TraceExecutor::eval(const trace::TraceP& t) {
    Ev out;
    switch (t->kind) {
        case Kind::Unknown: throw UnknownBehavior();
        case Kind::Constant:
            out.value = DynValue::of_scalar(t->value);
            return out;
        case Kind::Var: {
            Addr a = lookup(t->name);
            if (a == static_cast<Addr>(-1))
                throw ExecError("unbound trace variable '" + t->name + "'");
            out.value = arena_.cell(a);
            return out;
        }
        case Kind::Binop: {
            DynValue l = eval_value(t->kids[0]);
            DynValue r = eval_value(t->kids[1]);
            DynOpResult res = dyn_op(t->op, l, r);
            if (!res.ok) throw DynTypeError(res.error);
            out.value = std::move(res.value);
            return out;
        }
        case Kind::Block: {
            eval_scoped_block(t, out);
            return out;
        }
        case Kind::If: {
            DynValue c = eval_value(t->kids[0]);
            return eval(c.truthy() ? t->kids[1] : t->kids[2]);
        }
        case Kind::While: {
            while (true) {
                arena_.count_instruction();
                DynValue c = eval_value(t->kids[0]);
                if (!c.truthy()) break;
                Ev body = eval(t->kids[1]);
                if (body.is_break) return body;
            }
            out.value = DynValue::undefined();
            return out;
        }
        case Kind::Let: {
            DynValue v = eval_value(t->kids[0]);
            Addr a = arena_.alloc_cell(std::move(v));
            scope_.push_back(ScopeFrame{t->name, a});
            return out;
        }
        case Kind::Set: {
            DynValue v = eval_value(t->kids[1]);
            const TraceP& target = t->kids[0];
            switch (target->kind) {
                case Kind::Var: {
                    Addr a = lookup(target->name);
                    if (a == static_cast<Addr>(-1)) {
                        // Undeclared assignment creates a request-global; kept
                        // apart from the lexical scope so block marks stay valid.
                        a = arena_.alloc_cell(std::move(v));
                        globals_.push_back(ScopeFrame{target->name, a});
                    } else {
                        arena_.cell(a) = std::move(v);
                    }
                    return out;
                }
                case Kind::EnvRead: {
                    DynValue env = eval_value(target->kids[0]);
                    if (env.tag != DynValue::Tag::Env)
                        throw DynTypeError("environment write through a non-environment");
                    for (const auto& [k, addr] : arena_.env(env.ref)) {
                        if (k == target->name) {
                            arena_.cell(addr) = std::move(v);
                            return out;
                        }
                    }
                    throw ExecError("environment has no entry '" + target->name + "'");
                }
                case Kind::Member: {
                    DynValue obj = eval_value(target->kids[0]);
                    if (obj.tag != DynValue::Tag::Object)
                        throw DynTypeError("cannot set property '" + target->name +
                                           "' of a non-object");
                    for (auto& [k, f] : arena_.object(obj.ref)) {
                        if (k == target->name) {
                            f = std::move(v);
                            return out;
                        }
                    }
                    arena_.charge(RequestArena::kEntryCost + target->name.size() + v.s.size());
                    arena_.object(obj.ref).emplace_back(target->name, std::move(v));
                    return out;
                }
                case Kind::Index: {
                    DynValue obj = eval_value(target->kids[0]);
                    DynValue idx = eval_value(target->kids[1]);
                    if (obj.tag == DynValue::Tag::Array) {
                        if (idx.tag != DynValue::Tag::Int || idx.i < 0)
                            throw DynTypeError("array indices must be non-negative integers");
                        auto& items = arena_.array(obj.ref);
                        size_t i = static_cast<size_t>(idx.i);
                        if (i < items.size()) {
                            items[i] = std::move(v);
                        } else if (i == items.size()) {
                            arena_.charge(RequestArena::kEntryCost + v.s.size());
                            items.push_back(std::move(v));
                        } else {
                            throw DynTypeError("sparse array writes are not supported");
                        }
                        return out;
                    }
                    if (obj.tag == DynValue::Tag::Object) {
                        if (idx.tag != DynValue::Tag::Str)
                            throw DynTypeError("object keys must be strings");
                        for (auto& [k, f] : arena_.object(obj.ref)) {
                            if (k == idx.s) {
                                f = std::move(v);
                                return out;
                            }
                        }
                        arena_.charge(RequestArena::kEntryCost + idx.s.size() + v.s.size());
                        arena_.object(obj.ref).emplace_back(idx.s, std::move(v));
                        return out;
                    }
                    throw DynTypeError("cannot index-assign a non-container value");
                }
                default: throw ExecError("malformed assignment target in trace");
            }
        }
        case Kind::Label: {
            Ev body = eval(t->kids[0]);
            if (body.is_break && body.label == t->name) {
                out.value = std::move(body.value);
                return out;
            }
            return body;
        }
        case Kind::Break: {
            out.value = eval_value(t->kids[0]);
            out.is_break = true;
            out.label = t->name;
            return out;
        }
        case Kind::Event: {
            DynValue arg = eval_value(t->kids[0]);
            DynValue env = eval_value(t->kids[1]);
            // The event stores the environment value in its handler before
            // firing, so the callback sees the creator's variables.
            handler_env_[t->handler] = env;
            if (t->name == "listen") {
                listen_handler_ = t->handler;
                return out;
            }
            PendingOp op;
            op.handler = t->handler;
            if (t->name == "get") {
                if (arg.tag != DynValue::Tag::Str)
                    throw DynTypeError("get event requires a string url");
                op.url = arg.s;
            } else if (t->name == "post") {
                if (arg.tag != DynValue::Tag::Object)
                    throw DynTypeError("post event requires an argument object");
                op.is_post = true;
                Json body;
                for (const auto& [k, v] : arena_.object(arg.ref)) {
                    if (k == "url" && v.tag == DynValue::Tag::Str) op.url = v.s;
                    if (k == "body") body = json_of_dyn(v);
                }
                if (op.url.empty()) throw DynTypeError("post event requires a string 'url'");
                op.body = body.dump();
            } else {
                throw ExecError("unsupported event kind '" + t->name + "'");
            }
            queue_.push_back(std::move(op));
            return out;
        }
        case Kind::Respond: {
            DynValue v = eval_value(t->kids[0]);
            if (response_) throw ExecError("respond called twice for one request");
            response_ = json_of_dyn(v);
            return out;
        }
        case Kind::Env: {
            // Build the record first; entry resolution may consult the stored
            // environment of the running handler.
            std::vector<std::pair<std::string, Addr>> entries;
            for (const auto& [name, addr_expr] : t->fields)
                entries.emplace_back(name, resolve_env_entry(name, addr_expr));
            uint32_t id = arena_.alloc_env();
            for (auto& e : entries) {
                arena_.charge(RequestArena::kEntryCost + e.first.size());
                arena_.env(id).push_back(std::move(e));
            }
            out.value = DynValue::env_ref(id);
            return out;
        }
        case Kind::EnvRead: {
            DynValue env = eval_value(t->kids[0]);
            if (env.tag != DynValue::Tag::Env)
                throw DynTypeError("environment read from a non-environment");
            for (const auto& [k, addr] : arena_.env(env.ref))
                if (k == t->name) {
                    out.value = arena_.cell(addr);
                    return out;
                }
            throw ExecError("environment has no entry '" + t->name + "'");
        }
        case Kind::EnvAddr: {
            DynValue env = eval_value(t->kids[0]);
            if (env.tag != DynValue::Tag::Env)
                throw DynTypeError("environment address read from a non-environment");
            for (const auto& [k, addr] : arena_.env(env.ref))
                if (k == t->name) {
                    out.value = DynValue::address(addr);
                    return out;
                }
            throw ExecError("environment has no entry '" + t->name + "'");
        }
        case Kind::VarAddr: {
            Addr a = lookup(t->name);
            if (a == static_cast<Addr>(-1))
                throw ExecError("no address for variable '" + t->name + "'");
            out.value = DynValue::address(a);
            return out;
        }
        case Kind::Member: {
            DynValue obj = eval_value(t->kids[0]);
            if (obj.tag == DynValue::Tag::Object) {
                for (const auto& [k, v] : arena_.object(obj.ref))
                    if (k == t->name) {
                        out.value = v;
                        return out;
                    }
                return out;  // undefined
            }
            if (obj.tag == DynValue::Tag::Array) {
                if (t->name == "length")
                    out.value = DynValue::integer(
                        static_cast<int64_t>(arena_.array(obj.ref).size()));
                return out;
            }
            if (obj.tag == DynValue::Tag::Str) {
                if (t->name == "length")
                    out.value = DynValue::integer(static_cast<int64_t>(obj.s.size()));
                return out;
            }
            throw DynTypeError("cannot read property '" + t->name + "' of " +
                               (obj.tag == DynValue::Tag::Undefined ? "undefined"
                                                                    : "a non-object"));
        }
        case Kind::Index: {
            DynValue obj = eval_value(t->kids[0]);
            DynValue idx = eval_value(t->kids[1]);
            if (obj.tag == DynValue::Tag::Array) {
                if (idx.tag != DynValue::Tag::Int) return out;
                const auto& items = arena_.array(obj.ref);
                if (idx.i < 0 || static_cast<size_t>(idx.i) >= items.size()) return out;
                out.value = items[static_cast<size_t>(idx.i)];
                return out;
            }
            if (obj.tag == DynValue::Tag::Str) {
                if (idx.tag != DynValue::Tag::Int || idx.i < 0 ||
                    static_cast<size_t>(idx.i) >= obj.s.size())
                    return out;
                out.value = DynValue::str(std::string(1, obj.s[static_cast<size_t>(idx.i)]));
                return out;
            }
            if (obj.tag == DynValue::Tag::Object) {
                if (idx.tag != DynValue::Tag::Str) return out;
                for (const auto& [k, v] : arena_.object(obj.ref))
                    if (k == idx.s) {
                        out.value = v;
                        return out;
                    }
                return out;
            }
            throw DynTypeError("cannot index a non-container value");
        }
        case Kind::ObjectLit: {
            uint32_t id = arena_.alloc_object();
            for (const auto& [k, expr] : t->fields) {
                DynValue v = eval_value(expr);
                arena_.charge(RequestArena::kEntryCost + k.size() + v.s.size());
                arena_.object(id).emplace_back(k, std::move(v));
            }
            out.value = DynValue::object_ref(id);
            return out;
        }
        case Kind::ArrayLit: {
            uint32_t id = arena_.alloc_array();
            for (const auto& expr : t->kids) {
                DynValue v = eval_value(expr);
                arena_.charge(RequestArena::kEntryCost + v.s.size());
                arena_.array(id).push_back(std::move(v));
            }
            out.value = DynValue::array_ref(id);
            return out;
        }
    }
    throw ExecError("unreachable trace node");
}

void TraceExecutor::execute_event(int handler, const DynValue& arg) {
    auto it = program_.handlers.find(handler);
    if (it == program_.handlers.end())
        throw ExecError("no handler " + std::to_string(handler) + " in the compiled program");
    arena_.count_instruction();

    size_t mark = scope_.size();
    auto saved_env = current_env_;
    auto env_it = handler_env_.find(handler);
    current_env_ = env_it != handler_env_.end() ? std::optional<DynValue>(env_it->second)
                                                : std::nullopt;
    if (handler != 0) {
        Addr a = arena_.alloc_cell(arg);
        scope_.push_back(ScopeFrame{it->second.arg_id, a});
    }
    Ev result = eval(it->second.body);
    if (result.is_break)
        throw ExecError("break to '" + result.label + "' escaped handler " +
                        std::to_string(handler));
    scope_.resize(mark);
    current_env_ = saved_env;
}

DynValue TraceExecutor::dyn_of_json(const Json& j) {
    if (j.is_null()) return DynValue::undefined();
    if (j.is_boolean()) return DynValue::boolean(j.get<bool>());
    if (j.is_number_integer()) return DynValue::integer(j.get<int64_t>());
    if (j.is_number_unsigned()) return DynValue::integer(static_cast<int64_t>(j.get<uint64_t>()));
    if (j.is_number_float()) return DynValue::number(j.get<double>());
    if (j.is_string()) return DynValue::str(j.get<std::string>());
    if (j.is_array()) {
        uint32_t id = arena_.alloc_array();
        for (const auto& item : j) {
            DynValue v = dyn_of_json(item);
            arena_.charge(RequestArena::kEntryCost + v.s.size());
            arena_.array(id).push_back(std::move(v));
        }
        return DynValue::array_ref(id);
    }
    if (j.is_object()) {
        uint32_t id = arena_.alloc_object();
        for (auto it = j.begin(); it != j.end(); ++it) {
            DynValue v = dyn_of_json(it.value());
            arena_.charge(RequestArena::kEntryCost + it.key().size() + v.s.size());
            arena_.object(id).emplace_back(it.key(), std::move(v));
        }
        return DynValue::object_ref(id);
    }
    return DynValue::undefined();
}

Json TraceExecutor::json_of_dyn(const DynValue& v, int depth) {
    if (depth > 200) throw ExecError("value is cyclic or too deeply nested to serialize");
    switch (v.tag) {
        case DynValue::Tag::Undefined: return nullptr;
        case DynValue::Tag::Bool: return v.b;
        case DynValue::Tag::Int: return v.i;
        case DynValue::Tag::Float: return v.f;
        case DynValue::Tag::Str: return v.s;
        case DynValue::Tag::Array: {
            Json out = Json::array();
            for (const auto& item : arena_.array(v.ref))
                out.push_back(json_of_dyn(item, depth + 1));
            return out;
        }
        case DynValue::Tag::Object: {
            Json out = Json::object();
            for (const auto& [k, f] : arena_.object(v.ref)) {
                if (f.tag == DynValue::Tag::Undefined) continue;
                out[k] = json_of_dyn(f, depth + 1);
            }
            return out;
        }
        case DynValue::Tag::Env:
        case DynValue::Tag::Address: return nullptr;
    }
    return nullptr;
}

ExecResult TraceExecutor::run(const interp::Request& req) {
    ExecResult result;
    try {
        execute_event(0, DynValue::undefined());
        if (!response_ && listen_handler_ >= 0) {
            // Build the body first: allocating can grow the object store and
            // invalidate any reference held across it.
            DynValue body = dyn_of_json(req.body);
            uint32_t id = arena_.alloc_object();
            auto& fields = arena_.object(id);
            fields.emplace_back("method", DynValue::str(req.method));
            fields.emplace_back("path", DynValue::str(req.path));
            fields.emplace_back("body", std::move(body));
            execute_event(listen_handler_, DynValue::object_ref(id));
        }
        while (!response_ && !queue_.empty()) {
            PendingOp op = std::move(queue_.front());
            queue_.pop_front();
            UpstreamResponse res =
                op.is_post ? upstream_.post(op.url, op.body) : upstream_.get(op.url);
            DynValue payload;
            if (res.status >= 200 && res.status < 300) {
                Json parsed = Json::parse(res.body, nullptr, false);
                if (!parsed.is_discarded()) payload = dyn_of_json(parsed);
            }
            execute_event(op.handler, payload);
        }
        result.outcome = response_ ? Outcome::Responded : Outcome::NoResponse;
        if (response_) result.response = *response_;
    } catch (const UnknownBehavior& e) {
        result.outcome = Outcome::AbortUnknown;
        result.error = e.what();
    } catch (const DynTypeError& e) {
        result.outcome = Outcome::AbortDynType;
        result.error = e.what();
    } catch (const InstructionLimitExceeded& e) {
        result.outcome = Outcome::AbortInstructionLimit;
        result.error = e.what();
    } catch (const MemoryLimitExceeded& e) {
        result.outcome = Outcome::AbortMemoryLimit;
        result.error = e.what();
    } catch (const std::exception& e) {
        result.outcome = Outcome::AbortError;
        result.error = e.what();
    }
    result.stats = arena_.end_request();
    return result;
}

}  // namespace accel::exec
