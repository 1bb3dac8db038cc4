#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "accel/scalar.hpp"

namespace accel::trace {

// Node kinds of the trace language. Traces are what execution in the slow
// sandbox records and what the fast sandbox later runs; nodes are immutable
// and shared, so snapshots of a growing trace are cheap.
enum class Kind {
    Constant,
    Var,
    Binop,
    Block,
    If,
    While,
    Let,
    Set,
    Label,
    Break,
    Unknown,
    Event,
    Respond,
    Env,
    EnvRead,  // *t.x
    EnvAddr,  // t.x
    VarAddr,  // &x
    Member,
    Index,
    ObjectLit,
    ArrayLit,
};

struct Node;
using TraceP = std::shared_ptr<const Node>;

struct Node {
    Kind kind = Kind::Unknown;
    Scalar value;                                         // Constant
    std::string name;                                     // Var/Let/Label/Break/EnvRead/EnvAddr/VarAddr/Member field/Event kind
    std::string op;                                       // Binop
    std::vector<TraceP> kids;                             // structured children
    std::vector<std::pair<std::string, TraceP>> fields;   // Env entries, ObjectLit entries
    int handler = -1;                                     // Event
};

TraceP t_unknown();
TraceP t_const(Scalar v);
TraceP t_number(double v);
TraceP t_integer(int64_t v);
TraceP t_string(std::string v);
TraceP t_boolean(bool v);
TraceP t_undefined();
TraceP t_var(std::string name);
TraceP t_binop(std::string op, TraceP left, TraceP right);
TraceP t_block(std::vector<TraceP> body);
TraceP t_if(TraceP cond, TraceP then_part, TraceP else_part);
TraceP t_while(TraceP cond, TraceP body);
TraceP t_let(std::string name, TraceP value);
TraceP t_set(TraceP target, TraceP value);
TraceP t_label(std::string label, TraceP body);
TraceP t_break(std::string label, TraceP value);
TraceP t_event(std::string event_kind, TraceP arg, TraceP env, int handler);
TraceP t_respond(TraceP value);
TraceP t_env(std::vector<std::pair<std::string, TraceP>> entries);
TraceP t_env_read(TraceP env, std::string name);
TraceP t_env_addr(TraceP env, std::string name);
TraceP t_var_addr(std::string name);
TraceP t_member(TraceP object, std::string name);
TraceP t_index(TraceP object, TraceP index);
TraceP t_object(std::vector<std::pair<std::string, TraceP>> entries);
TraceP t_array(std::vector<TraceP> items);

bool trace_equal(const TraceP& a, const TraceP& b);
bool contains_unknown(const TraceP& t);

// Compact source-like rendering, e.g. "if (x<0) y = x*-1; else unknown".
std::string to_text(const TraceP& t);

// A frame of the trace context: everything needed to rebuild the parent node
// around the current focus.
struct Frame {
    enum class Kind { Seq, IfTrue, IfFalse, While, Label, Named };
    Kind kind;
    std::vector<TraceP> done;  // Seq: already built siblings
    std::vector<TraceP> todo;  // Seq: siblings not yet reached
    TraceP cond;               // IfTrue/IfFalse/While
    TraceP other;              // IfTrue: false branch, IfFalse: true branch
    std::string name;          // Label, Named

    bool operator==(const Frame& o) const;
};

// Inside-out stack of frames; back() is the innermost frame.
using Context = std::vector<Frame>;

std::string to_text(const Context& ctx);

// Rebuild the whole trace by folding every frame of the context around the
// focused subtree. Pure; this is the invariant the zipper maintains.
TraceP plug(TraceP focus, const Context& ctx);

}  // namespace accel::trace
