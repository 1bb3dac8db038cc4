#include "accel/interpreter.hpp"

namespace accel::interp {

using ast::BindingKind;
using ast::ExprKind;
using ast::RtKind;
using ast::StmtKind;

Interpreter::Interpreter(const ast::Program& program, UpstreamClient& upstream,
                         trace::Builder* builder, InterpreterOptions options)
    : program_(program), upstream_(upstream), builder_(builder), options_(std::move(options)) {}

void Interpreter::check_deadline() {
    if (++step_count_ % 256 != 0) return;
    if (std::chrono::steady_clock::now() > deadline_) throw RequestTimeout();
}

void Interpreter::observe(const char* op) {
    if (options_.observer && builder_) options_.observer(op, *builder_);
}

ScopeP Interpreter::new_scope(ScopeP parent) {
    auto scope = std::make_shared<Scope>(std::move(parent));
    scopes_.push_back(scope);
    return scope;
}

void Interpreter::teardown_scopes() {
    for (auto& s : scopes_) s->slots.clear();
    scopes_.clear();
    queue_.clear();
    listen_.reset();
}

// ---------------------------------------------------------------------------
// expressions
// ---------------------------------------------------------------------------

GuestValue Interpreter::eval_expr(const ast::ExprP& e, const ScopeP& scope) {
    check_deadline();
    switch (e->kind) {
        case ExprKind::Const: return GuestValue::of_scalar(e->value);
        case ExprKind::Var: {
            auto cell = scope->lookup(e->name);
            if (!cell) throw GuestError("unbound variable '" + e->name + "'");
            return *cell;
        }
        case ExprKind::Binop: {
            GuestValue l = eval_expr(e->kids[0], scope);
            GuestValue r = eval_expr(e->kids[1], scope);
            if ((e->op == "===" || e->op == "!==") && l.is_container() && r.is_container()) {
                bool eq = (l.obj && l.obj == r.obj) || (l.arr && l.arr == r.arr) ||
                          (l.fn && l.fn == r.fn);
                return GuestValue::boolean(e->op == "===" ? eq : !eq);
            }
            OpResult res = apply_binop(e->op, l.op_view(), r.op_view());
            if (!res.ok) throw GuestError(res.error);
            return GuestValue::of_scalar(res.value);
        }
        case ExprKind::Member: {
            GuestValue obj = eval_expr(e->kids[0], scope);
            if (obj.tag == GuestValue::Tag::Object) {
                for (const auto& [k, v] : obj.obj->fields)
                    if (k == e->name) return v;
                return GuestValue::undefined();
            }
            if (obj.tag == GuestValue::Tag::Array) {
                if (e->name == "length")
                    return GuestValue::integer(static_cast<int64_t>(obj.arr->items.size()));
                return GuestValue::undefined();
            }
            if (obj.tag == GuestValue::Tag::Str) {
                if (e->name == "length")
                    return GuestValue::integer(static_cast<int64_t>(obj.s.size()));
                return GuestValue::undefined();
            }
            throw GuestError("cannot read property '" + e->name + "' of " +
                             (obj.tag == GuestValue::Tag::Undefined ? "undefined"
                                                                    : "a non-object"));
        }
        case ExprKind::Index: {
            GuestValue obj = eval_expr(e->kids[0], scope);
            GuestValue idx = eval_expr(e->kids[1], scope);
            if (obj.tag == GuestValue::Tag::Array) {
                if (idx.tag != GuestValue::Tag::Int) return GuestValue::undefined();
                if (idx.i < 0 || static_cast<size_t>(idx.i) >= obj.arr->items.size())
                    return GuestValue::undefined();
                return obj.arr->items[static_cast<size_t>(idx.i)];
            }
            if (obj.tag == GuestValue::Tag::Str) {
                if (idx.tag != GuestValue::Tag::Int || idx.i < 0 ||
                    static_cast<size_t>(idx.i) >= obj.s.size())
                    return GuestValue::undefined();
                return GuestValue::str(std::string(1, obj.s[static_cast<size_t>(idx.i)]));
            }
            if (obj.tag == GuestValue::Tag::Object) {
                if (idx.tag != GuestValue::Tag::Str) return GuestValue::undefined();
                for (const auto& [k, v] : obj.obj->fields)
                    if (k == idx.s) return v;
                return GuestValue::undefined();
            }
            throw GuestError("cannot index a non-container value");
        }
        case ExprKind::ObjectLit: {
            GuestValue v = GuestValue::object();
            for (const auto& [k, field] : e->fields)
                v.obj->fields.emplace_back(k, eval_expr(field, scope));
            return v;
        }
        case ExprKind::ArrayLit: {
            GuestValue v = GuestValue::array();
            for (const auto& k : e->kids) v.arr->items.push_back(eval_expr(k, scope));
            return v;
        }
        case ExprKind::FuncExpr: throw GuestError("function literal escaped desugaring");
    }
    throw GuestError("unreachable expression");
}

GuestValue Interpreter::eval_binding(const ast::Binding& b, const ScopeP& scope) {
    switch (b.kind) {
        case BindingKind::Expr: return eval_expr(b.expr, scope);
        case BindingKind::Func: {
            GuestValue v;
            v.tag = GuestValue::Tag::Closure;
            v.fn = std::make_shared<ClosureData>();
            v.fn->func = b.func;
            v.fn->captured = scope;
            return v;
        }
        case BindingKind::Call: {
            GuestValue callee = eval_expr(b.callee, scope);
            std::vector<GuestValue> args;
            args.reserve(b.args.size());
            for (const auto& a : b.args) args.push_back(eval_expr(a, scope));
            if (callee.tag == GuestValue::Tag::Closure)
                return call_closure(callee, std::move(args));
            if (callee.tag == GuestValue::Tag::Builtin)
                return call_builtin(callee.builtin, std::move(args));
            throw GuestError("'" + (b.callee->kind == ExprKind::Var ? b.callee->name : "?") +
                             "' is not a function");
        }
    }
    throw GuestError("unreachable binding");
}

void Interpreter::assign(const ast::ExprP& lval, GuestValue v, const ScopeP& scope) {
    switch (lval->kind) {
        case ExprKind::Var: {
            auto cell = scope->lookup(lval->name);
            if (cell) {
                *cell = std::move(v);
                return;
            }
            // Assignment to an undeclared name creates it at the request's
            // outermost scope, the way sloppy-mode JavaScript does.
            root_->define(lval->name, std::move(v));
            return;
        }
        case ExprKind::Member: {
            GuestValue obj = eval_expr(lval->kids[0], scope);
            if (obj.tag != GuestValue::Tag::Object)
                throw GuestError("cannot set property '" + lval->name + "' of a non-object");
            for (auto& [k, f] : obj.obj->fields) {
                if (k == lval->name) {
                    f = std::move(v);
                    return;
                }
            }
            obj.obj->fields.emplace_back(lval->name, std::move(v));
            return;
        }
        case ExprKind::Index: {
            GuestValue obj = eval_expr(lval->kids[0], scope);
            GuestValue idx = eval_expr(lval->kids[1], scope);
            if (obj.tag == GuestValue::Tag::Array) {
                if (idx.tag != GuestValue::Tag::Int || idx.i < 0)
                    throw GuestError("array indices must be non-negative integers");
                size_t i = static_cast<size_t>(idx.i);
                if (i < obj.arr->items.size()) {
                    obj.arr->items[i] = std::move(v);
                    return;
                }
                if (i == obj.arr->items.size()) {
                    obj.arr->items.push_back(std::move(v));
                    return;
                }
                throw GuestError("sparse array writes are not supported");
            }
            if (obj.tag == GuestValue::Tag::Object) {
                if (idx.tag != GuestValue::Tag::Str)
                    throw GuestError("object keys must be strings");
                for (auto& [k, f] : obj.obj->fields) {
                    if (k == idx.s) {
                        f = std::move(v);
                        return;
                    }
                }
                obj.obj->fields.emplace_back(idx.s, std::move(v));
                return;
            }
            throw GuestError("cannot index-assign a non-container value");
        }
        default: throw GuestError("invalid assignment target");
    }
}

// ---------------------------------------------------------------------------
// statements
// ---------------------------------------------------------------------------

Interpreter::Flow Interpreter::eval_stmts(const std::vector<ast::StmtP>& stmts,
                                          const ScopeP& scope) {
    for (const auto& s : stmts) {
        Flow flow = eval_stmt(s, scope);
        if (flow.kind != Flow::Kind::Normal) return flow;
    }
    return Flow::normal();
}

Interpreter::Flow Interpreter::eval_stmt(const ast::StmtP& s, const ScopeP& scope) {
    check_deadline();
    switch (s->kind) {
        case StmtKind::RuntimeCall:
            exec_runtime_call(s);
            return Flow::normal();
        case StmtKind::Let: {
            GuestValue v = eval_binding(s->binding, scope);
            scope->define(s->name, std::move(v));
            return Flow::normal();
        }
        case StmtKind::Assign: {
            GuestValue v = eval_binding(s->binding, scope);
            assign(s->lval, std::move(v), scope);
            return Flow::normal();
        }
        case StmtKind::Block: {
            auto inner = new_scope(scope);
            return eval_stmts(s->block, inner);
        }
        case StmtKind::If: {
            GuestValue c = eval_expr(s->cond, scope);
            if (c.truthy()) return eval_stmt(s->s1, scope);
            if (s->s2) return eval_stmt(s->s2, scope);
            return Flow::normal();
        }
        case StmtKind::While: {
            while (true) {
                check_deadline();
                GuestValue c = eval_expr(s->cond, scope);
                if (!c.truthy()) break;
                Flow flow = eval_stmt(s->s1, scope);
                if (flow.kind == Flow::Kind::Break || flow.kind == Flow::Kind::Return)
                    return flow;
            }
            return Flow::normal();
        }
        case StmtKind::Label: {
            Flow flow = eval_stmt(s->s1, scope);
            if (flow.kind == Flow::Kind::Break && flow.label == s->name) return Flow::normal();
            return flow;
        }
        case StmtKind::Break: {
            Flow flow;
            flow.kind = Flow::Kind::Break;
            flow.label = s->name;
            return flow;
        }
        case StmtKind::Return: {
            Flow flow;
            flow.kind = Flow::Kind::Return;
            flow.value = eval_expr(s->cond, scope);
            return flow;
        }
        case StmtKind::ExprStmt:
        case StmtKind::For:
        case StmtKind::FuncDecl:
            throw GuestError("surface statement reached the interpreter; desugar first");
    }
    return Flow::normal();
}

void Interpreter::exec_runtime_call(const ast::StmtP& s) {
    if (!builder_) throw GuestError("instrumented program run without a trace builder");
    auto arg_value = [&](const ast::RtArg& a) -> trace::TraceP {
        if (a.is_pop_arg) return builder_->pop_arg();
        return a.lit;
    };
    switch (s->rt_op) {
        case RtKind::EnterSeq:
            if (s->rt_n == 0)
                builder_->record_empty_block();
            else
                builder_->enter_seq(s->rt_n);
            observe("enterSeq");
            return;
        case RtKind::SeqNext:
            builder_->seq_next();
            observe("seqNext");
            return;
        case RtKind::IfTrue:
            builder_->enter_if_true(s->rt_value.lit);
            observe("ifTrue");
            return;
        case RtKind::IfFalse:
            builder_->enter_if_false(s->rt_value.lit);
            observe("ifFalse");
            return;
        case RtKind::While:
            builder_->enter_while(s->rt_value.lit);
            observe("while");
            return;
        case RtKind::Label:
            builder_->enter_label(s->rt_name);
            observe("label");
            return;
        case RtKind::Named:
            builder_->enter_named(s->rt_name);
            observe("named");
            return;
        case RtKind::Pop:
            builder_->pop();
            observe("pop");
            return;
        case RtKind::PopTo:
            builder_->pop_to(s->rt_name);
            observe("popTo");
            return;
        case RtKind::TraceLet:
            builder_->record_let(s->rt_name, arg_value(s->rt_value));
            observe("let");
            return;
        case RtKind::TraceSet:
            builder_->record_set(s->rt_lval, arg_value(s->rt_value));
            observe("set");
            return;
        case RtKind::TraceBreak:
            builder_->record_break(s->rt_name, arg_value(s->rt_value));
            observe("break");
            return;
        case RtKind::PushArg:
            builder_->push_arg(arg_value(s->rt_value));
            observe("pushArg");
            return;
        case RtKind::SaveHandler:
            builder_->save_handler(static_cast<int>(s->rt_n));
            observe("saveHandler");
            return;
    }
}

// ---------------------------------------------------------------------------
// calls, builtins, event loop
// ---------------------------------------------------------------------------

GuestValue Interpreter::call_closure(const GuestValue& fn, std::vector<GuestValue> args) {
    const auto& func = fn.fn->func;
    if (args.size() != func->params.size())
        throw GuestError("function called with " + std::to_string(args.size()) +
                         " arguments but declares " + std::to_string(func->params.size()));
    auto scope = new_scope(fn.fn->captured);
    for (size_t i = 0; i < args.size(); i++)
        scope->define(func->params[i], std::move(args[i]));
    Flow flow = eval_stmts(func->body, scope);
    if (flow.kind == Flow::Kind::Return) return flow.value;
    if (flow.kind == Flow::Kind::Break)
        throw GuestError("break to label '" + flow.label + "' escaped the function");
    return GuestValue::undefined();
}

GuestValue Interpreter::call_builtin(BuiltinFn which, std::vector<GuestValue> args) {
    switch (which) {
        case BuiltinFn::Get: {
            if (args.size() != 2 || args[0].tag != GuestValue::Tag::Str ||
                args[1].tag != GuestValue::Tag::Closure)
                throw GuestError("get(url, callback) expects a string and a function");
            int n = -1;
            if (builder_) {
                builder_->pop_arg();  // this builtin's own trace
                trace::TraceP t_uri = builder_->pop_arg();
                trace::TraceP t_cb = builder_->pop_arg();
                n = builder_->new_handler("get", t_uri, t_cb);
                builder_->set_handler_env_trace(n, args[1].fn->func->env_trace);
                observe("newHandler");
            }
            PendingOp op;
            op.kind = PendingOp::Kind::HttpGet;
            op.url = args[0].s;
            op.callback = args[1];
            op.handler = n;
            queue_.push_back(std::move(op));
            return GuestValue::undefined();
        }
        case BuiltinFn::Post: {
            if (args.size() != 2 || args[0].tag != GuestValue::Tag::Object ||
                args[1].tag != GuestValue::Tag::Closure)
                throw GuestError("post({url, body}, callback) expects an object and a function");
            int n = -1;
            if (builder_) {
                builder_->pop_arg();
                trace::TraceP t_arg = builder_->pop_arg();
                trace::TraceP t_cb = builder_->pop_arg();
                n = builder_->new_handler("post", t_arg, t_cb);
                builder_->set_handler_env_trace(n, args[1].fn->func->env_trace);
                observe("newHandler");
            }
            std::string url;
            Json body;
            for (const auto& [k, v] : args[0].obj->fields) {
                if (k == "url" && v.tag == GuestValue::Tag::Str) url = v.s;
                if (k == "body") body = json_of_guest(v);
            }
            if (url.empty()) throw GuestError("post requires a string 'url' field");
            PendingOp op;
            op.kind = PendingOp::Kind::HttpPost;
            op.url = url;
            op.post_body = body.dump();
            op.callback = args[1];
            op.handler = n;
            queue_.push_back(std::move(op));
            return GuestValue::undefined();
        }
        case BuiltinFn::Respond: {
            if (args.size() != 1) throw GuestError("respond(value) expects one argument");
            if (builder_) {
                builder_->pop_arg();  // own trace
                trace::TraceP t_v = builder_->pop_arg();
                builder_->record_respond(t_v);
                observe("respond");
            }
            if (response_) throw GuestError("respond called twice for one request");
            response_ = args[0];
            return GuestValue::undefined();
        }
        case BuiltinFn::Listen: {
            if (args.size() != 1 || args[0].tag != GuestValue::Tag::Closure)
                throw GuestError("listen(handler) expects a function");
            int n = -1;
            if (builder_) {
                builder_->pop_arg();  // own trace
                trace::TraceP t_cb = builder_->pop_arg();
                n = builder_->new_handler("listen", trace::t_undefined(), t_cb);
                builder_->set_handler_env_trace(n, args[0].fn->func->env_trace);
                observe("newHandler");
            }
            listen_ = std::make_pair(args[0], n);
            return GuestValue::undefined();
        }
    }
    throw GuestError("unknown builtin");
}

void Interpreter::run_callback(const GuestValue& cb, const GuestValue& payload, int handler) {
    if (builder_ && handler >= 0) {
        builder_->load_handler(handler);
        observe("loadHandler");
    }
    call_closure(cb, {payload});
    if (builder_ && handler >= 0) {
        builder_->save_handler(handler);
        observe("saveHandler");
    }
}

namespace {
GuestValue payload_of_upstream(const UpstreamResponse& res) {
    // Errors deliver an undefined body to the callback.
    if (res.status < 200 || res.status >= 300) return GuestValue::undefined();
    Json parsed = Json::parse(res.body, nullptr, false);
    if (parsed.is_discarded()) return GuestValue::undefined();
    return guest_of_json(parsed);
}
}  // namespace

void Interpreter::drain_events() {
    while (!queue_.empty() && !response_) {
        if (std::chrono::steady_clock::now() > deadline_) throw RequestTimeout();
        PendingOp op = std::move(queue_.front());
        queue_.pop_front();
        GuestValue payload;
        switch (op.kind) {
            case PendingOp::Kind::HttpGet:
                payload = payload_of_upstream(upstream_.get(op.url));
                break;
            case PendingOp::Kind::HttpPost:
                payload = payload_of_upstream(upstream_.post(op.url, op.post_body));
                break;
            case PendingOp::Kind::Fire: payload = op.payload; break;
        }
        run_callback(op.callback, payload, op.handler);
    }
}

Response Interpreter::run_request(const Request& req) {
    deadline_ = std::chrono::steady_clock::now() + std::chrono::milliseconds(options_.timeout_ms);
    step_count_ = 0;
    response_.reset();
    listen_.reset();
    queue_.clear();

    root_ = new_scope(nullptr);
    GuestValue b;
    b.tag = GuestValue::Tag::Builtin;
    b.builtin = BuiltinFn::Get;
    root_->define("get", b);
    b.builtin = BuiltinFn::Post;
    root_->define("post", b);
    b.builtin = BuiltinFn::Respond;
    root_->define("respond", b);
    b.builtin = BuiltinFn::Listen;
    root_->define("listen", b);

    if (builder_) {
        builder_->begin_main();
        observe("beginMain");
    }

    try {
        auto scope = new_scope(root_);
        Flow flow = eval_stmts(program_.body, scope);
        if (flow.kind != Flow::Kind::Normal)
            throw GuestError("break escaped the top level");

        if (listen_) {
            GuestValue reqv = GuestValue::object();
            reqv.obj->fields.emplace_back("method", GuestValue::str(req.method));
            reqv.obj->fields.emplace_back("path", GuestValue::str(req.path));
            reqv.obj->fields.emplace_back("body", guest_of_json(req.body));
            PendingOp fire;
            fire.kind = PendingOp::Kind::Fire;
            fire.callback = listen_->first;
            fire.payload = reqv;
            fire.handler = listen_->second;
            queue_.push_back(std::move(fire));
        }
        drain_events();
    } catch (const RequestTimeout&) {
        if (builder_) builder_->reset_transient();
        teardown_scopes();
        return Response{504, "{\"error\":\"request timed out\"}", "application/json"};
    } catch (const GuestError& e) {
        if (builder_) builder_->reset_transient();
        teardown_scopes();
        Json err;
        err["error"] = e.what();
        return Response{500, err.dump(), "application/json"};
    } catch (...) {
        // Trace machinery errors (corruption, divergence) propagate.
        teardown_scopes();
        throw;
    }

    GuestValue responded = response_ ? *response_ : GuestValue::undefined();
    bool has_response = response_.has_value();
    response_.reset();
    teardown_scopes();
    if (!has_response)
        return Response{504, "{\"error\":\"no response\"}", "application/json"};
    try {
        Json body = json_of_guest(responded);
        Response out;
        out.status = 200;
        out.body = response_body_of_json(body);
        out.content_type = body.is_string() ? "text/plain" : "application/json";
        return out;
    } catch (const std::exception& e) {
        Json err;
        err["error"] = e.what();
        return Response{500, err.dump(), "application/json"};
    }
}

void Interpreter::run_fragment(const std::vector<ast::StmtP>& stmts,
                               std::vector<std::pair<std::string, GuestValue>> vars) {
    deadline_ = std::chrono::steady_clock::now() + std::chrono::milliseconds(options_.timeout_ms);
    step_count_ = 0;
    root_ = new_scope(nullptr);
    for (auto& [name, v] : vars) root_->define(name, std::move(v));
    auto scope = new_scope(root_);
    eval_stmts(stmts, scope);
    teardown_scopes();
}

Response run_request(const ast::Program& instrumented, trace::Builder& builder,
                     const Request& req, UpstreamClient& upstream, InterpreterOptions options) {
    Interpreter interp(instrumented, upstream, &builder, std::move(options));
    return interp.run_request(req);
}

Response run_plain(const ast::Program& desugared, const Request& req, UpstreamClient& upstream,
                   InterpreterOptions options) {
    Interpreter interp(desugared, upstream, nullptr, std::move(options));
    return interp.run_request(req);
}

}  // namespace accel::interp
