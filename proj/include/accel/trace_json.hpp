#pragma once

#include <string>

#include "json.hpp"

#include "accel/builder.hpp"
#include "accel/trace.hpp"

namespace accel::trace {

using Json = nlohmann::ordered_json;

// Trace node schema: every node is {"kind": <string>, ...kind-specific
// fields}. Field order is fixed so golden files are byte-stable.
Json trace_to_json(const TraceP& t);
TraceP trace_from_json(const Json& j);

// Handler table schema:
//   {"handlers":[{"id":n,"argId":s,"envId":s,"body":<node>,"envTrace":<node>?}]}
Json handler_table_to_json(const HandlerTable& table);
HandlerTable handler_table_from_json(const Json& j);

std::string serialize_handler_table(const HandlerTable& table);
HandlerTable deserialize_handler_table(const std::string& bytes);

struct TraceJsonError : std::runtime_error {
    explicit TraceJsonError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace accel::trace
