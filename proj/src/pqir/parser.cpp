// Copyright 2026 The pulsestack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "pulsestack/error.hpp"
#include "pulsestack/pqir.hpp"

namespace pulsestack::pqir {

namespace {

// --- lexer ------------------------------------------------------------------

enum class Tok { ident, local, global, attr_ref, string, number, punct, eof };

struct Token {
    Tok kind = Tok::eof;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::eof: return "end of input";
        case Tok::local: return "'%" + t.text + "'";
        case Tok::global: return "'@" + t.text + "'";
        case Tok::attr_ref: return "'#" + t.text + "'";
        case Tok::string: return "\"" + t.text + "\"";
        default: return "'" + t.text + "'";
    }
}

bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '.' || c == '$';
}

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n = 1) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto lex_error = [&](const std::string& expected) {
        const std::string found = i < src.size() ? std::string("'") + src[i] + "'" : "end of input";
        throw SyntaxError(line, col, expected, found);
    };

    while (i < src.size()) {
        const char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance();
            continue;
        }
        if (c == ';') {
            while (i < src.size() && src[i] != '\n') advance();
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (c == '%' || c == '@' || c == '#') {
            t.kind = c == '%' ? Tok::local : c == '@' ? Tok::global : Tok::attr_ref;
            advance();
            const auto start = i;
            while (i < src.size() && ident_char(src[i])) advance();
            if (i == start) lex_error("a name after '" + std::string(1, c) + "'");
            t.text = std::string(src.substr(start, i - start));
        } else if (c == '"') {
            t.kind = Tok::string;
            advance();
            const auto start = i;
            while (i < src.size() && src[i] != '"' && src[i] != '\n') advance();
            if (i >= src.size() || src[i] != '"') lex_error("closing '\"'");
            t.text = std::string(src.substr(start, i - start));
            advance();
        } else if ((c >= '0' && c <= '9') ||
                   ((c == '-' || c == '+') && i + 1 < src.size() && src[i + 1] >= '0' && src[i + 1] <= '9')) {
            t.kind = Tok::number;
            const auto start = i;
            advance();
            while (i < src.size()) {
                const char d = src[i];
                const bool exp_sign = (d == '-' || d == '+') && (src[i - 1] == 'e' || src[i - 1] == 'E');
                if ((d >= '0' && d <= '9') || d == '.' || d == 'e' || d == 'E' || exp_sign) {
                    advance();
                } else {
                    break;
                }
            }
            t.text = std::string(src.substr(start, i - start));
        } else if (ident_char(c)) {
            t.kind = Tok::ident;
            const auto start = i;
            while (i < src.size() && ident_char(src[i])) advance();
            t.text = std::string(src.substr(start, i - start));
        } else if (std::string_view("()[]{},=*:").find(c) != std::string_view::npos) {
            t.kind = Tok::punct;
            t.text = std::string(1, c);
            advance();
        } else {
            lex_error("a token");
        }
        out.push_back(std::move(t));
    }
    Token eof;
    eof.line = line;
    eof.column = col;
    out.push_back(eof);
    return out;
}

// --- syntax tree ------------------------------------------------------------

struct Value {
    enum class Kind { number, global, local, handle, null } kind = Kind::number;
    std::string text;
    std::string handle_type;  // for handle: the pointee type, e.g. "%Port*"
};

struct Arg {
    std::string type;
    Value value;
};

struct Call {
    std::optional<std::string> result;
    std::string return_type;
    std::string callee;
    std::vector<Arg> args;
    std::size_t line = 0;
    std::size_t column = 0;
};

struct GlobalDef {
    std::string name;
    std::vector<double> values;
    std::size_t line = 0;
};

struct Declaration {
    std::string return_type;
    std::vector<std::string> parameters;
    std::size_t line = 0;
};

struct Ast {
    std::optional<std::string> source_filename;
    std::set<std::string> opaque_types;
    std::vector<GlobalDef> globals;
    std::optional<std::string> function_name;
    std::string function_attr_group;
    std::vector<Call> calls;
    std::map<std::string, Declaration> declarations;
    std::map<std::string, std::vector<std::pair<std::string, std::optional<std::string>>>> attribute_groups;
};

// --- parser -----------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

    Ast parse_module() {
        while (peek().kind != Tok::eof) parse_top_level();
        return std::move(ast_);
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }

    Token take() {
        Token t = peek();
        if (pos_ < tokens_.size() - 1) ++pos_;
        return t;
    }

    [[noreturn]] void error(const std::string& expected) const {
        const auto& t = peek();
        throw SyntaxError(t.line, t.column, expected, describe(t));
    }

    bool at_punct(char c) const { return peek().kind == Tok::punct && peek().text[0] == c; }
    bool at_word(std::string_view w) const { return peek().kind == Tok::ident && peek().text == w; }

    void expect_punct(char c) {
        if (!at_punct(c)) error(std::string("'") + c + "'");
        take();
    }

    void expect_word(std::string_view w) {
        if (!at_word(w)) error("'" + std::string(w) + "'");
        take();
    }

    Token expect(Tok kind, const std::string& what) {
        if (peek().kind != kind) error(what);
        return take();
    }

    std::int64_t expect_integer(const std::string& what) {
        const auto t = expect(Tok::number, what);
        std::int64_t v = 0;
        auto [end, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || end != t.text.data() + t.text.size()) {
            throw SyntaxError(t.line, t.column, what, describe(t));
        }
        return v;
    }

    double expect_real() {
        const auto t = expect(Tok::number, "a real literal");
        return to_real(t);
    }

    static double to_real(const Token& t) {
        const char* first = t.text.data();
        if (*first == '+') ++first;
        double v = 0;
        auto [end, ec] = std::from_chars(first, t.text.data() + t.text.size(), v);
        if (ec != std::errc() || end != t.text.data() + t.text.size()) {
            throw SyntaxError(t.line, t.column, "a real literal", describe(t));
        }
        return v;
    }

    void parse_top_level() {
        const auto& t = peek();
        if (t.kind == Tok::ident && t.text == "source_filename") {
            take();
            expect_punct('=');
            ast_.source_filename = expect(Tok::string, "a quoted file name").text;
        } else if (t.kind == Tok::local) {
            const auto name = take().text;
            expect_punct('=');
            expect_word("type");
            expect_word("opaque");
            ast_.opaque_types.insert(name);
        } else if (t.kind == Tok::global) {
            parse_global();
        } else if (t.kind == Tok::ident && t.text == "define") {
            parse_define();
        } else if (t.kind == Tok::ident && t.text == "declare") {
            parse_declare();
        } else if (t.kind == Tok::ident && t.text == "attributes") {
            parse_attributes();
        } else {
            error("a top-level entity (source_filename, type, global, define, declare, attributes)");
        }
    }

    void parse_global() {
        GlobalDef g;
        const auto name = take();
        g.name = name.text;
        g.line = name.line;
        expect_punct('=');
        expect_word("constant");
        expect_punct('[');
        const auto count = expect_integer("an array length");
        expect_word("x");
        expect_word("double");
        expect_punct(']');
        expect_punct('[');
        if (!at_punct(']')) {
            g.values.push_back(expect_real());
            while (at_punct(',')) {
                take();
                g.values.push_back(expect_real());
            }
        }
        expect_punct(']');
        if (count < 0 || static_cast<std::size_t>(count) != g.values.size()) {
            throw SyntaxError(name.line, name.column,
                              "an initializer of " + std::to_string(count) + " elements",
                              std::to_string(g.values.size()) + " elements");
        }
        ast_.globals.push_back(std::move(g));
    }

    std::string parse_type() {
        std::string type;
        if (at_punct('[')) {
            take();
            const auto n = expect_integer("an array length");
            expect_word("x");
            expect_word("double");
            expect_punct(']');
            type = "[" + std::to_string(n) + " x double]";
        } else if (peek().kind == Tok::local) {
            type = "%" + take().text;
        } else if (at_word("void") || at_word("i64") || at_word("double")) {
            type = take().text;
        } else {
            error("a type");
        }
        while (at_punct('*')) {
            take();
            type += '*';
        }
        return type;
    }

    Value parse_value() {
        Value v;
        const auto& t = peek();
        if (t.kind == Tok::number) {
            v.kind = Value::Kind::number;
            v.text = take().text;
        } else if (t.kind == Tok::global) {
            v.kind = Value::Kind::global;
            v.text = take().text;
        } else if (t.kind == Tok::local) {
            v.kind = Value::Kind::local;
            v.text = take().text;
        } else if (at_word("null")) {
            take();
            v.kind = Value::Kind::null;
        } else if (at_word("inttoptr")) {
            take();
            expect_punct('(');
            expect_word("i64");
            v.kind = Value::Kind::handle;
            v.text = std::to_string(expect_integer("an integer handle"));
            expect_word("to");
            v.handle_type = parse_type();
            expect_punct(')');
        } else {
            error("an operand");
        }
        return v;
    }

    void parse_call(std::optional<std::string> result) {
        Call c;
        c.line = peek().line;
        c.column = peek().column;
        expect_word("call");
        c.result = std::move(result);
        c.return_type = parse_type();
        c.callee = expect(Tok::global, "a callee").text;
        expect_punct('(');
        if (!at_punct(')')) {
            while (true) {
                Arg a;
                a.type = parse_type();
                a.value = parse_value();
                c.args.push_back(std::move(a));
                if (!at_punct(',')) break;
                take();
            }
        }
        expect_punct(')');
        ast_.calls.push_back(std::move(c));
    }

    void parse_define() {
        const auto at = take();
        if (ast_.function_name) {
            throw SyntaxError(at.line, at.column, "a single function definition", "a second 'define'");
        }
        if (parse_type() != "void") error("a void entry function");
        ast_.function_name = expect(Tok::global, "a function name").text;
        expect_punct('(');
        expect_punct(')');
        if (peek().kind == Tok::attr_ref) ast_.function_attr_group = take().text;
        expect_punct('{');
        if (peek().kind == Tok::ident && peek(1).kind == Tok::punct && peek(1).text == ":") {
            take();
            take();
        }
        while (true) {
            if (at_word("ret")) {
                take();
                expect_word("void");
                break;
            }
            if (peek().kind == Tok::local) {
                auto name = take().text;
                expect_punct('=');
                parse_call(std::move(name));
            } else if (at_word("call")) {
                parse_call(std::nullopt);
            } else {
                error("'call' or 'ret void'");
            }
        }
        expect_punct('}');
    }

    void parse_declare() {
        take();
        Declaration d;
        d.line = peek().line;
        d.return_type = parse_type();
        const auto name = expect(Tok::global, "a declared name").text;
        expect_punct('(');
        if (!at_punct(')')) {
            d.parameters.push_back(parse_type());
            while (at_punct(',')) {
                take();
                d.parameters.push_back(parse_type());
            }
        }
        expect_punct(')');
        ast_.declarations[name] = std::move(d);
    }

    void parse_attributes() {
        take();
        const auto group = expect(Tok::attr_ref, "an attribute group reference").text;
        expect_punct('=');
        expect_punct('{');
        auto& items = ast_.attribute_groups[group];
        while (!at_punct('}')) {
            auto key = expect(Tok::string, "a quoted attribute").text;
            std::optional<std::string> value;
            if (at_punct('=')) {
                take();
                value = expect(Tok::string, "a quoted attribute value").text;
            }
            items.emplace_back(std::move(key), std::move(value));
        }
        expect_punct('}');
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    Ast ast_;
};

// --- resolution ---------------------------------------------------------------

constexpr std::string_view kPortPrefix = "__pulse_port.";
constexpr std::string_view kFramePrefix = "__pulse_frame.";
constexpr std::string_view kBarrierPrefix = "__pulse_barrier.";

std::int64_t integral(double v, const std::string& what) {
    if (!std::isfinite(v) || v != std::floor(v) || v < 0) {
        fail(ErrorCode::InvalidModule, what + " must be a nonnegative integer");
    }
    return static_cast<std::int64_t>(v);
}

std::int64_t parse_count(const std::string& key, const std::string& text) {
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || v < 0) {
        fail(ErrorCode::InvalidModule, "attribute " + key + " must be a nonnegative integer");
    }
    return v;
}

class Resolver {
public:
    explicit Resolver(Ast ast) : ast_(std::move(ast)) {}

    ParseResult run() {
        read_attributes();
        read_globals();
        read_calls();
        report_unused_declarations();
        ParseResult result;
        result.module = std::move(module_);
        result.diagnostics = std::move(notes_);
        return result;
    }

private:
    void note(std::string message) { notes_.push_back(Diagnostic{Severity::note, std::nullopt, std::move(message)}); }

    void read_attributes() {
        if (!ast_.function_name) fail(ErrorCode::InvalidModule, "module defines no entry function");
        module_.entry_name = *ast_.function_name;
        module_.module_name = ast_.source_filename.value_or("");

        auto& a = module_.attributes;
        a = ModuleAttributes{};
        a.entry_point = false;
        a.qir_profiles.clear();
        auto group = ast_.attribute_groups.find(ast_.function_attr_group);
        if (ast_.function_attr_group.empty() || group == ast_.attribute_groups.end()) {
            fail(ErrorCode::ProfileMismatch, "entry function carries no attribute group with \"qir_profiles\"");
        }
        bool has_profile = false;
        for (const auto& [key, value] : group->second) {
            if (key == "entry_point") {
                a.entry_point = true;
            } else if (key == "output_labeling_schema") {
                a.output_labeling_schema = value.value_or("");
            } else if (key == "qir_profiles") {
                has_profile = true;
                a.qir_profiles = value.value_or("");
            } else if (key == "required_num_ports") {
                a.required_num_ports = parse_count(key, value.value_or(""));
            } else if (key == "required_num_qubits") {
                a.required_num_qubits = parse_count(key, value.value_or(""));
            } else if (key == "required_num_results") {
                a.required_num_results = parse_count(key, value.value_or(""));
            } else {
                note("ignoring attribute \"" + key + "\"");
            }
        }
        if (!has_profile || a.qir_profiles != "pulse") {
            fail(ErrorCode::ProfileMismatch,
                 "qir_profiles is \"" + a.qir_profiles + "\", this reader accepts only \"pulse\"");
        }
    }

    void read_globals() {
        std::map<std::int64_t, PortId> ports;
        struct FrameRow {
            std::int64_t handle;
            std::int64_t port;
            Frame frame;
        };
        std::vector<FrameRow> frames;
        for (const auto& g : ast_.globals) {
            if (global_names_.contains(g.name)) {
                fail(ErrorCode::InvalidModule, "global @" + g.name + " is defined twice");
            }
            global_names_.insert(g.name);
            const std::string_view name = g.name;
            if (name.starts_with(kPortPrefix)) {
                if (g.values.size() != 1) fail(ErrorCode::InvalidModule, "@" + g.name + " must hold one handle");
                const auto h = integral(g.values[0], "port handle");
                if (!ports.emplace(h, PortId{std::string(name.substr(kPortPrefix.size()))}).second) {
                    fail(ErrorCode::InvalidModule, "port handle " + std::to_string(h) + " is used twice");
                }
            } else if (name.starts_with(kFramePrefix)) {
                if (g.values.size() != 5) fail(ErrorCode::InvalidModule, "@" + g.name + " must hold five values");
                FrameRow row{integral(g.values[0], "frame handle"), integral(g.values[1], "port handle"), {}};
                row.frame = make_frame(FrameId{std::string(name.substr(kFramePrefix.size()))}, PortId{},
                                       g.values[2], g.values[3], integral(g.values[4], "elapsed samples"));
                frames.push_back(std::move(row));
            } else if (name.starts_with(kBarrierPrefix)) {
                barriers_.emplace(g.name, g.values);
            } else {
                if (g.values.size() % 2 != 0) {
                    fail(ErrorCode::InvalidModule, "waveform global @" + g.name + " has an odd element count");
                }
                WaveformGlobal w{g.name, {}};
                for (std::size_t k = 0; k < g.values.size(); k += 2) {
                    w.samples.emplace_back(g.values[k], g.values[k + 1]);
                }
                waveform_index_.emplace(g.name, module_.waveform_globals.size());
                module_.waveform_globals.push_back(std::move(w));
            }
        }
        for (auto& row : frames) {
            auto pit = ports.find(row.port);
            if (pit == ports.end()) {
                fail(ErrorCode::UndeclaredGlobal, "frame '" + row.frame.id.value() + "' references port handle " +
                                                      std::to_string(row.port) + " with no @__pulse_port global");
            }
            row.frame.port = pit->second;
            if (!frame_by_handle_.emplace(row.handle, row.frame.id).second) {
                fail(ErrorCode::InvalidModule, "frame handle " + std::to_string(row.handle) + " is used twice");
            }
            if (!module_.schedule.frames.emplace(row.frame.id, row.frame).second) {
                fail(ErrorCode::InvalidModule, "frame '" + row.frame.id.value() + "' is defined twice");
            }
        }
        for (const auto& [handle, port] : ports) {
            for (const auto& [id, frame] : module_.schedule.frames) {
                if (frame.port == port) {
                    primary_by_port_.emplace(handle, id);
                    break;
                }
            }
        }
    }

    static const std::string& type_of(const Arg& a) { return a.type; }

    void check_signature(const Call& c, const IntrinsicSignature& sig) {
        const auto where = "call to @" + c.callee + " at line " + std::to_string(c.line);
        if (c.args.size() != sig.parameters.size()) {
            fail(ErrorCode::ArityError, where + " passes " + std::to_string(c.args.size()) + " argument(s), expected " +
                                            std::to_string(sig.parameters.size()));
        }
        if (c.return_type != sig.return_type) {
            fail(ErrorCode::ArgumentType, where + " returns " + c.return_type + ", expected " +
                                              std::string(sig.return_type));
        }
        for (std::size_t k = 0; k < c.args.size(); ++k) {
            if (type_of(c.args[k]) != sig.parameters[k]) {
                fail(ErrorCode::ArgumentType, where + ": argument " + std::to_string(k + 1) + " has type " +
                                                  c.args[k].type + ", expected " + std::string(sig.parameters[k]));
            }
        }
        if (sig.return_type == "void" && c.result) {
            fail(ErrorCode::ArgumentType, where + " assigns the result of a void call");
        }
        if (sig.return_type != "void" && !c.result) {
            fail(ErrorCode::ArgumentType, where + " discards its result");
        }
    }

    std::int64_t handle_value(const Arg& a, const std::string& where) {
        if (a.value.kind == Value::Kind::null) return 0;
        if (a.value.kind != Value::Kind::handle) {
            fail(ErrorCode::ArgumentType, where + ": expected an inttoptr handle for " + a.type);
        }
        if (a.value.handle_type != a.type) {
            fail(ErrorCode::ArgumentType, where + ": handle cast to " + a.value.handle_type + " passed as " + a.type);
        }
        return std::stoll(a.value.text);
    }

    std::int64_t int_value(const Arg& a, const std::string& where) {
        if (a.value.kind != Value::Kind::number || a.value.text.find_first_of(".eE") != std::string::npos) {
            fail(ErrorCode::ArgumentType, where + ": expected an integer literal");
        }
        return std::stoll(a.value.text);
    }

    double real_value(const Arg& a, const std::string& where) {
        if (a.value.kind != Value::Kind::number) fail(ErrorCode::ArgumentType, where + ": expected a real literal");
        const char* first = a.value.text.data();
        if (*first == '+') ++first;
        double v = 0;
        auto [end, ec] = std::from_chars(first, a.value.text.data() + a.value.text.size(), v);
        if (ec != std::errc()) fail(ErrorCode::ArgumentType, where + ": malformed real literal");
        return v;
    }

    FrameId frame_arg(const Arg& a, const std::string& where) {
        const auto h = handle_value(a, where);
        auto it = frame_by_handle_.find(h);
        if (it == frame_by_handle_.end()) {
            fail(ErrorCode::UndeclaredGlobal, where + ": frame handle " + std::to_string(h) + " is not declared");
        }
        return it->second;
    }

    FrameId port_arg(const Arg& a, const std::string& where) {
        const auto h = handle_value(a, where);
        auto it = primary_by_port_.find(h);
        if (it == primary_by_port_.end()) {
            fail(ErrorCode::UndeclaredGlobal, where + ": port handle " + std::to_string(h) + " has no frame");
        }
        return it->second;
    }

    ResultId result_arg(const Arg& a, const std::string& where) {
        const auto h = handle_value(a, where);
        if (h < 0 || h > std::numeric_limits<std::uint32_t>::max()) {
            fail(ErrorCode::InvalidModule, where + ": result handle out of range");
        }
        return ResultId{static_cast<std::uint32_t>(h)};
    }

    void read_calls() {
        auto& ins = module_.schedule.instructions;
        std::map<std::string, std::size_t> waveform_locals;
        for (const auto& c : ast_.calls) {
            const auto where = "line " + std::to_string(c.line);
            auto decl = ast_.declarations.find(c.callee);
            if (decl == ast_.declarations.end()) {
                fail(ErrorCode::UndeclaredGlobal, where + ": @" + c.callee + " is called but not declared");
            }
            called_.insert(c.callee);
            const auto* sig = find_intrinsic(c.callee);
            if (sig == nullptr) {
                fail(ErrorCode::UnsupportedInstruction, where + ": @" + c.callee + " is not a pulse profile intrinsic");
            }
            check_signature(c, *sig);
            const std::string_view name = sig->name;

            if (name == "__quantum__pulse__waveform__body") {
                const auto len = int_value(c.args[0], where);
                if (c.args[1].value.kind != Value::Kind::global) {
                    fail(ErrorCode::ArgumentType, where + ": waveform data must be a global");
                }
                auto g = waveform_index_.find(c.args[1].value.text);
                if (g == waveform_index_.end()) {
                    fail(ErrorCode::UndeclaredGlobal, where + ": @" + c.args[1].value.text + " is not a waveform global");
                }
                if (static_cast<std::int64_t>(module_.waveform_globals[g->second].samples.size()) != len) {
                    fail(ErrorCode::InvalidModule, where + ": waveform length " + std::to_string(len) +
                                                       " does not match @" + c.args[1].value.text);
                }
                if (!waveform_locals.emplace(*c.result, g->second).second) {
                    fail(ErrorCode::InvalidModule, where + ": %" + *c.result + " is defined twice");
                }
            } else if (name == "__quantum__pulse__waveform_play__body") {
                const auto frame = port_arg(c.args[0], where);
                if (c.args[1].value.kind != Value::Kind::local) {
                    fail(ErrorCode::ArgumentType, where + ": waveform operand must be a local value");
                }
                auto local = waveform_locals.find(c.args[1].value.text);
                if (local == waveform_locals.end()) {
                    fail(ErrorCode::UndeclaredGlobal, where + ": %" + c.args[1].value.text + " is not defined");
                }
                ins.emplace_back(instr::Play{frame, make_sampled_waveform(module_.waveform_globals[local->second].samples)});
            } else if (name == "__quantum__pulse__frame_change__body") {
                const auto frame = port_arg(c.args[0], where);
                ins.emplace_back(instr::SetFrequency{frame, real_value(c.args[1], where)});
                ins.emplace_back(instr::SetPhase{frame, real_value(c.args[2], where)});
            } else if (name == "__quantum__pulse__delay__body") {
                const auto d = int_value(c.args[1], where);
                if (d < 0) fail(ErrorCode::InvalidModule, where + ": negative delay");
                ins.emplace_back(instr::Delay{frame_arg(c.args[0], where), d});
            } else if (name == "__quantum__pulse__shift_phase__body") {
                ins.emplace_back(instr::ShiftPhase{frame_arg(c.args[0], where), real_value(c.args[1], where)});
            } else if (name == "__quantum__pulse__set_phase__body") {
                ins.emplace_back(instr::SetPhase{frame_arg(c.args[0], where), real_value(c.args[1], where)});
            } else if (name == "__quantum__pulse__shift_frequency__body") {
                ins.emplace_back(instr::ShiftFrequency{frame_arg(c.args[0], where), real_value(c.args[1], where)});
            } else if (name == "__quantum__pulse__set_frequency__body") {
                ins.emplace_back(instr::SetFrequency{frame_arg(c.args[0], where), real_value(c.args[1], where)});
            } else if (name == "__quantum__pulse__barrier__body") {
                const auto n = int_value(c.args[0], where);
                if (c.args[1].value.kind != Value::Kind::global) {
                    fail(ErrorCode::ArgumentType, where + ": barrier frames must be a global");
                }
                auto b = barriers_.find(c.args[1].value.text);
                if (b == barriers_.end()) {
                    fail(ErrorCode::UndeclaredGlobal, where + ": @" + c.args[1].value.text + " is not a barrier list");
                }
                if (static_cast<std::int64_t>(b->second.size()) != n) {
                    fail(ErrorCode::ArityError, where + ": barrier count " + std::to_string(n) +
                                                    " does not match @" + b->first);
                }
                std::vector<FrameId> frames;
                for (double h : b->second) {
                    auto it = frame_by_handle_.find(integral(h, "frame handle"));
                    if (it == frame_by_handle_.end()) {
                        fail(ErrorCode::UndeclaredGlobal, where + ": barrier names an undeclared frame handle");
                    }
                    frames.push_back(it->second);
                }
                try {
                    ins.emplace_back(make_barrier(std::move(frames)));
                } catch (const Error& e) {
                    fail(ErrorCode::InvalidModule, where + ": " + e.what());
                }
            } else if (name == "__quantum__pulse__capture__body") {
                ins.emplace_back(instr::Capture{frame_arg(c.args[0], where), result_arg(c.args[1], where)});
            } else if (name == "__quantum__qis__mz__body") {
                const auto q = handle_value(c.args[0], where);
                if (q < 0 || q > std::numeric_limits<std::uint32_t>::max()) {
                    fail(ErrorCode::InvalidModule, where + ": qubit handle out of range");
                }
                ins.emplace_back(instr::Measure{SiteId{static_cast<std::uint32_t>(q)}, result_arg(c.args[1], where)});
            }
        }
    }

    void report_unused_declarations() {
        for (const auto& [name, decl] : ast_.declarations) {
            const auto* sig = find_intrinsic(name);
            if (sig != nullptr) {
                bool same = decl.return_type == sig->return_type && decl.parameters.size() == sig->parameters.size();
                for (std::size_t k = 0; same && k < decl.parameters.size(); ++k) {
                    same = decl.parameters[k] == sig->parameters[k];
                }
                if (!same) {
                    fail(ErrorCode::ArgumentType, "declaration of @" + name + " at line " +
                                                      std::to_string(decl.line) + " does not match the intrinsic table");
                }
            } else if (!called_.contains(name)) {
                note("ignoring unknown intrinsic @" + name + ", which is declared but never called");
            }
        }
    }

    Ast ast_;
    PulseModule module_;
    Diagnostics notes_;
    std::set<std::string> global_names_;
    std::set<std::string> called_;
    std::map<std::string, std::size_t> waveform_index_;
    std::map<std::string, std::vector<double>> barriers_;
    std::map<std::int64_t, FrameId> frame_by_handle_;
    std::map<std::int64_t, FrameId> primary_by_port_;
};

}  // namespace

ParseResult parse(std::string_view text) {
    Parser parser(text);
    return Resolver(parser.parse_module()).run();
}

}  // namespace pulsestack::pqir
