#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sixsim::toml {

// Minimal TOML subset used by scenario files: bare keys, [dotted.tables],
// strings, integers, floats, booleans, flat arrays, and # comments.
// Tables are sorted maps, so re-serialization is canonical.

class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value>;

struct Value {
    std::variant<std::int64_t, double, bool, std::string, Array, Table> v;

    Value() : v(std::int64_t{0}) {}
    Value(std::int64_t x) : v(x) {}
    Value(int x) : v(static_cast<std::int64_t>(x)) {}
    Value(double x) : v(x) {}
    Value(bool x) : v(x) {}
    Value(const char* x) : v(std::string(x)) {}
    Value(std::string x) : v(std::move(x)) {}
    Value(Array x) : v(std::move(x)) {}
    Value(Table x) : v(std::move(x)) {}

    bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
    bool is_double() const { return std::holds_alternative<double>(v); }
    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_array() const { return std::holds_alternative<Array>(v); }
    bool is_table() const { return std::holds_alternative<Table>(v); }

    std::int64_t as_int() const;
    double as_double() const; // ints promote
    bool as_bool() const;
    const std::string& as_string() const;
    const Array& as_array() const;
    const Table& as_table() const;
    Table& as_table();
};

Table parse(const std::string& text);
Table parse_file(const std::string& path);

std::string serialize(const Table& root);

// Typed lookups with path-qualified error messages.
const Value* find(const Table& t, const std::string& key);
std::int64_t get_int(const Table& t, const std::string& key);
std::int64_t get_int_or(const Table& t, const std::string& key, std::int64_t fallback);
double get_double(const Table& t, const std::string& key);
double get_double_or(const Table& t, const std::string& key, double fallback);
bool get_bool_or(const Table& t, const std::string& key, bool fallback);
std::string get_string(const Table& t, const std::string& key);
std::string get_string_or(const Table& t, const std::string& key, const std::string& fallback);
std::vector<double> get_double_array(const Table& t, const std::string& key);
std::vector<std::int64_t> get_int_array(const Table& t, const std::string& key);
const Table* get_table(const Table& t, const std::string& key);

} // namespace sixsim::toml
