#include "sixsim/toml_lite.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sixsim::toml {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw parse_error("toml: line " + std::to_string(line) + ": " + msg);
}

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;
    std::size_t line = 1;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    char take() {
        const char c = s[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_ws_inline() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
    // whitespace, newlines, comments
    void skip_filler() {
        for (;;) {
            skip_ws_inline();
            if (done()) return;
            if (peek() == '#') {
                while (!done() && peek() != '\n') ++pos;
                continue;
            }
            if (peek() == '\n' || peek() == '\r') {
                take();
                continue;
            }
            return;
        }
    }
};

std::string parse_basic_string(Cursor& c) {
    std::string out;
    c.take(); // opening quote
    for (;;) {
        if (c.done()) fail(c.line, "unterminated string");
        char ch = c.take();
        if (ch == '"') return out;
        if (ch == '\\') {
            if (c.done()) fail(c.line, "dangling escape");
            char e = c.take();
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: fail(c.line, std::string("unsupported escape \\") + e);
            }
            continue;
        }
        if (ch == '\n') fail(c.line, "newline inside string");
        out.push_back(ch);
    }
}

Value parse_scalar_token(const std::string& tok, std::size_t line) {
    if (tok == "true") return Value(true);
    if (tok == "false") return Value(false);
    if (tok.empty()) fail(line, "empty value");
    const bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                             tok == "inf" || tok == "-inf" || tok == "nan";
    try {
        std::size_t used = 0;
        if (!looks_float) {
            const std::int64_t i = std::stoll(tok, &used);
            if (used == tok.size()) return Value(i);
        }
        used = 0;
        const double d = std::stod(tok, &used);
        if (used == tok.size()) return Value(d);
    } catch (const std::exception&) {
    }
    fail(line, "cannot parse value '" + tok + "'");
}

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
    Array arr;
    c.take(); // '['
    for (;;) {
        c.skip_filler();
        if (c.done()) fail(c.line, "unterminated array");
        if (c.peek() == ']') {
            c.take();
            return Value(std::move(arr));
        }
        arr.push_back(parse_value(c));
        c.skip_filler();
        if (c.done()) fail(c.line, "unterminated array");
        if (c.peek() == ',') {
            c.take();
            continue;
        }
        if (c.peek() == ']') {
            c.take();
            return Value(std::move(arr));
        }
        fail(c.line, "expected ',' or ']' in array");
    }
}

Value parse_value(Cursor& c) {
    c.skip_ws_inline();
    if (c.done()) fail(c.line, "missing value");
    const char ch = c.peek();
    if (ch == '"') return Value(parse_basic_string(c));
    if (ch == '[') return parse_array(c);
    if (ch == '{') fail(c.line, "inline tables are not supported");
    std::string tok;
    while (!c.done()) {
        const char x = c.peek();
        if (x == '\n' || x == '\r' || x == '#' || x == ',' || x == ']' || x == ' ' || x == '\t')
            break;
        tok.push_back(c.take());
    }
    return parse_scalar_token(tok, c.line);
}

std::vector<std::string> split_dotted(const std::string& s, std::size_t line) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == '.') {
            if (cur.empty()) fail(line, "empty path segment");
            parts.push_back(cur);
            cur.clear();
        } else if (is_bare_key_char(ch)) {
            cur.push_back(ch);
        } else {
            fail(line, std::string("bad character '") + ch + "' in table name");
        }
    }
    if (cur.empty()) fail(line, "empty path segment");
    parts.push_back(cur);
    return parts;
}

Table& descend(Table& root, const std::vector<std::string>& path, std::size_t line) {
    Table* t = &root;
    for (const auto& part : path) {
        auto [it, inserted] = t->try_emplace(part, Table{});
        if (!it->second.is_table()) fail(line, "key '" + part + "' is not a table");
        t = &it->second.as_table();
    }
    return *t;
}

} // namespace

std::int64_t Value::as_int() const {
    if (!is_int()) throw parse_error("toml: expected integer");
    return std::get<std::int64_t>(v);
}
double Value::as_double() const {
    if (is_int()) return static_cast<double>(std::get<std::int64_t>(v));
    if (!is_double()) throw parse_error("toml: expected float");
    return std::get<double>(v);
}
bool Value::as_bool() const {
    if (!is_bool()) throw parse_error("toml: expected boolean");
    return std::get<bool>(v);
}
const std::string& Value::as_string() const {
    if (!is_string()) throw parse_error("toml: expected string");
    return std::get<std::string>(v);
}
const Array& Value::as_array() const {
    if (!is_array()) throw parse_error("toml: expected array");
    return std::get<Array>(v);
}
const Table& Value::as_table() const {
    if (!is_table()) throw parse_error("toml: expected table");
    return std::get<Table>(v);
}
Table& Value::as_table() {
    if (!is_table()) throw parse_error("toml: expected table");
    return std::get<Table>(v);
}

Table parse(const std::string& text) {
    Table root;
    Table* current = &root;
    Cursor c{text};
    for (;;) {
        c.skip_filler();
        if (c.done()) return root;
        if (c.peek() == '[') {
            c.take();
            std::string name;
            while (!c.done() && c.peek() != ']') name.push_back(c.take());
            if (c.done()) fail(c.line, "unterminated table header");
            c.take(); // ']'
            current = &descend(root, split_dotted(name, c.line), c.line);
            continue;
        }
        std::string key;
        while (!c.done() && is_bare_key_char(c.peek())) key.push_back(c.take());
        if (key.empty()) fail(c.line, "expected a key");
        c.skip_ws_inline();
        if (c.done() || c.take() != '=') fail(c.line, "expected '=' after key '" + key + "'");
        Value val = parse_value(c);
        if (!current->emplace(key, std::move(val)).second)
            fail(c.line, "duplicate key '" + key + "'");
    }
}

Table parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("toml: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

namespace {

void write_scalar(std::ostringstream& os, const Value& v) {
    if (v.is_int()) {
        os << v.as_int();
    } else if (v.is_double()) {
        // shortest representation that round-trips
        const double d = v.as_double();
        char buf[40];
        for (int prec = 1; prec <= 17; ++prec) {
            std::snprintf(buf, sizeof buf, "%.*g", prec, d);
            if (std::stod(buf) == d) break;
        }
        os << buf;
        // keep floats recognizable on re-parse
        std::string_view sv(buf);
        if (sv.find_first_of(".eE") == std::string_view::npos &&
            sv.find("inf") == std::string_view::npos && sv.find("nan") == std::string_view::npos)
            os << ".0";
    } else if (v.is_bool()) {
        os << (v.as_bool() ? "true" : "false");
    } else if (v.is_string()) {
        os << '"';
        for (char ch : v.as_string()) {
            switch (ch) {
                case '"': os << "\\\""; break;
                case '\\': os << "\\\\"; break;
                case '\n': os << "\\n"; break;
                case '\t': os << "\\t"; break;
                default: os << ch;
            }
        }
        os << '"';
    }
}

void write_table(std::ostringstream& os, const Table& t, const std::string& prefix) {
    for (const auto& [k, v] : t) {
        if (v.is_table()) continue;
        os << k << " = ";
        if (v.is_array()) {
            os << '[';
            const auto& arr = v.as_array();
            for (std::size_t i = 0; i < arr.size(); ++i) {
                if (i) os << ", ";
                write_scalar(os, arr[i]);
            }
            os << ']';
        } else {
            write_scalar(os, v);
        }
        os << '\n';
    }
    for (const auto& [k, v] : t) {
        if (!v.is_table()) continue;
        const std::string path = prefix.empty() ? k : prefix + "." + k;
        os << "\n[" << path << "]\n";
        write_table(os, v.as_table(), path);
    }
}

} // namespace

std::string serialize(const Table& root) {
    std::ostringstream os;
    write_table(os, root, "");
    return os.str();
}

const Value* find(const Table& t, const std::string& key) {
    auto it = t.find(key);
    return it == t.end() ? nullptr : &it->second;
}

std::int64_t get_int(const Table& t, const std::string& key) {
    const Value* v = find(t, key);
    if (!v) throw parse_error("toml: missing key '" + key + "'");
    if (!v->is_int()) throw parse_error("toml: key '" + key + "' must be an integer");
    return v->as_int();
}

std::int64_t get_int_or(const Table& t, const std::string& key, std::int64_t fallback) {
    const Value* v = find(t, key);
    return v ? get_int(t, key) : fallback;
}

double get_double(const Table& t, const std::string& key) {
    const Value* v = find(t, key);
    if (!v) throw parse_error("toml: missing key '" + key + "'");
    if (!v->is_int() && !v->is_double())
        throw parse_error("toml: key '" + key + "' must be a number");
    return v->as_double();
}

double get_double_or(const Table& t, const std::string& key, double fallback) {
    const Value* v = find(t, key);
    return v ? get_double(t, key) : fallback;
}

bool get_bool_or(const Table& t, const std::string& key, bool fallback) {
    const Value* v = find(t, key);
    if (!v) return fallback;
    if (!v->is_bool()) throw parse_error("toml: key '" + key + "' must be a boolean");
    return v->as_bool();
}

std::string get_string(const Table& t, const std::string& key) {
    const Value* v = find(t, key);
    if (!v) throw parse_error("toml: missing key '" + key + "'");
    if (!v->is_string()) throw parse_error("toml: key '" + key + "' must be a string");
    return v->as_string();
}

std::string get_string_or(const Table& t, const std::string& key, const std::string& fallback) {
    const Value* v = find(t, key);
    return v ? get_string(t, key) : fallback;
}

std::vector<double> get_double_array(const Table& t, const std::string& key) {
    const Value* v = find(t, key);
    if (!v) throw parse_error("toml: missing key '" + key + "'");
    if (!v->is_array()) throw parse_error("toml: key '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& e : v->as_array()) out.push_back(e.as_double());
    return out;
}

std::vector<std::int64_t> get_int_array(const Table& t, const std::string& key) {
    const Value* v = find(t, key);
    if (!v) throw parse_error("toml: missing key '" + key + "'");
    if (!v->is_array()) throw parse_error("toml: key '" + key + "' must be an array");
    std::vector<std::int64_t> out;
    for (const auto& e : v->as_array()) out.push_back(e.as_int());
    return out;
}

const Table* get_table(const Table& t, const std::string& key) {
    const Value* v = find(t, key);
    if (!v) return nullptr;
    if (!v->is_table()) throw parse_error("toml: key '" + key + "' must be a table");
    return &v->as_table();
}

} // namespace sixsim::toml
