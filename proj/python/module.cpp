#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "accel/bench.hpp"
#include "accel/desugar.hpp"
#include "accel/dyn.hpp"
#include "accel/executor.hpp"
#include "accel/instrument.hpp"
#include "accel/interpreter.hpp"
#include "accel/parser.hpp"
#include "accel/trace_json.hpp"
#include "accel/upstream.hpp"

namespace py = pybind11;
using namespace accel;

namespace {

using Json = nlohmann::ordered_json;

Json json_of_py(const py::handle& obj) {
    if (obj.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
    if (py::isinstance<py::int_>(obj)) return obj.cast<int64_t>();
    if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
    if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
    if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
        Json out = Json::array();
        for (const auto& item : obj) out.push_back(json_of_py(item));
        return out;
    }
    if (py::isinstance<py::dict>(obj)) {
        Json out = Json::object();
        for (const auto& item : obj.cast<py::dict>())
            out[py::str(item.first).cast<std::string>()] = json_of_py(item.second);
        return out;
    }
    throw py::type_error("unsupported value for a guest request");
}

MapUpstream upstream_of(const py::dict& routes) {
    MapUpstream up;
    for (const auto& item : routes) {
        std::string path = py::str(item.first).cast<std::string>();
        up.route(path, json_of_py(item.second).dump());
    }
    return up;
}

py::dict response_dict(const interp::Response& res) {
    py::dict out;
    out["status"] = res.status;
    out["body"] = res.body;
    out["content_type"] = res.content_type;
    return out;
}

// Tracing session: feed requests, inspect the growing trace, execute it.
class Tracer {
  public:
    Tracer(const std::string& source, const py::dict& routes)
        : upstream_(upstream_of(routes)),
          plain_(ast::desugar(ast::parse(source))),
          instrumented_(compile::instrument(plain_)) {
        ast::validate_core(plain_);
    }

    py::dict request(const py::object& body) {
        interp::Request req;
        req.body = json_of_py(body);
        return response_dict(interp::run_request(instrumented_, builder_, req, upstream_));
    }

    py::dict request_plain(const py::object& body) {
        interp::Request req;
        req.body = json_of_py(body);
        return response_dict(interp::run_plain(plain_, req, upstream_));
    }

    std::string trace_json() const {
        return trace::serialize_handler_table(builder_.handlers());
    }

    py::dict execute(const py::object& body) {
        exec::CompiledProgram prog = exec::CompiledProgram::from_table(builder_.handlers());
        exec::TraceExecutor executor(prog, upstream_, limits_);
        interp::Request req;
        req.body = json_of_py(body);
        exec::ExecResult result = executor.run(req);
        py::dict out;
        out["outcome"] = exec::outcome_name(result.outcome);
        if (result.outcome == exec::Outcome::Responded)
            out["body"] = interp::response_body_of_json(result.response);
        else
            out["error"] = result.error;
        out["instructions"] = result.stats.instructions;
        out["peak_bytes"] = result.stats.peak_bytes;
        return out;
    }

    void set_limits(uint64_t max_instructions, size_t max_bytes) {
        limits_.max_instructions = max_instructions;
        limits_.max_bytes = max_bytes;
    }

  private:
    MapUpstream upstream_;
    ast::Program plain_;
    ast::Program instrumented_;
    trace::Builder builder_;
    exec::ResourceLimits limits_;
};

}  // namespace

PYBIND11_MODULE(_accel, m) {
    m.doc() = "Serverless function accelerator: guest frontend, tracing runtime, "
              "and trace executor";

    m.def(
        "parse_json",
        [](const std::string& source) {
            return ast::ast_to_json(ast::parse(source)).dump(2);
        },
        py::arg("source"), "Parse guest source and return the AST debug dump as JSON text.");

    m.def(
        "desugar_source",
        [](const std::string& source) {
            return ast::to_source(ast::desugar(ast::parse(source)));
        },
        py::arg("source"), "Parse and desugar guest source, returning core-fragment source.");

    m.def(
        "instrument_source",
        [](const std::string& source) {
            return ast::to_instrumented_source(
                compile::instrument(ast::desugar(ast::parse(source))));
        },
        py::arg("source"),
        "Return the instrumented program; lines starting with '@' are inserted calls.");

    m.def(
        "run_plain",
        [](const std::string& source, const py::object& body, const py::dict& routes) {
            MapUpstream up = upstream_of(routes);
            interp::Request req;
            req.body = json_of_py(body);
            return response_dict(interp::run_plain(ast::desugar(ast::parse(source)), req, up));
        },
        py::arg("source"), py::arg("body"), py::arg("routes") = py::dict(),
        "Run one request through the plain interpreter with canned GET routes.");

    m.def(
        "dyn_op",
        [](const std::string& op, const py::object& a, const py::object& b) {
            auto lift = [](const py::object& v) -> exec::DynValue {
                Json j = json_of_py(v);
                if (j.is_null()) return exec::DynValue::undefined();
                if (j.is_boolean()) return exec::DynValue::boolean(j.get<bool>());
                if (j.is_number_integer()) return exec::DynValue::integer(j.get<int64_t>());
                if (j.is_number_float()) return exec::DynValue::number(j.get<double>());
                if (j.is_string()) return exec::DynValue::str(j.get<std::string>());
                throw py::type_error("dyn_op operands must be scalars");
            };
            exec::DynOpResult r = exec::dyn_op(op, lift(a), lift(b));
            if (!r.ok) throw py::value_error(r.error);
            switch (r.value.tag) {
                case exec::DynValue::Tag::Undefined: return py::object(py::none());
                case exec::DynValue::Tag::Bool: return py::object(py::bool_(r.value.b));
                case exec::DynValue::Tag::Int: return py::object(py::int_(r.value.i));
                case exec::DynValue::Tag::Float: return py::object(py::float_(r.value.f));
                case exec::DynValue::Tag::Str: return py::object(py::str(r.value.s));
                default: return py::object(py::none());
            }
        },
        py::arg("op"), py::arg("a"), py::arg("b"),
        "Apply a guest binary operator with JavaScript coercions.");

    m.def("benchmark_names", [] {
        std::vector<std::string> names;
        for (const auto& def : bench::benchmarks()) names.push_back(def.name);
        return names;
    });

    m.def(
        "benchmark_source",
        [](const std::string& name) { return bench::benchmark(name).source; },
        py::arg("name"));

    py::class_<Tracer>(m, "Tracer",
                       "Traces requests against guest source with canned GET routes.")
        .def(py::init<const std::string&, const py::dict&>(), py::arg("source"),
             py::arg("routes") = py::dict())
        .def("request", &Tracer::request, py::arg("body"),
             "Run one request through the tracing interpreter.")
        .def("request_plain", &Tracer::request_plain, py::arg("body"),
             "Run one request through the plain interpreter (no tracing).")
        .def("trace_json", &Tracer::trace_json, "Serialized handler table.")
        .def("execute", &Tracer::execute, py::arg("body"),
             "Run one request against the current trace in the fast sandbox.")
        .def("set_limits", &Tracer::set_limits, py::arg("max_instructions"),
             py::arg("max_bytes"));
}
