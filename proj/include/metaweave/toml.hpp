#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace metaweave::toml {

// Minimal TOML reader covering what the run configs use: [tables],
// string/integer/float/boolean scalars, flat arrays, and # comments.
struct Value {
    enum class Type { String, Integer, Float, Boolean, Array };
    Type type = Type::String;
    std::string str;
    long long integer = 0;
    double number = 0.0;
    bool boolean = false;
    std::vector<Value> array;

    std::string as_string() const;
    std::vector<std::string> as_string_array() const;
    double as_number() const;
    long long as_integer() const;
};

using TableData = std::map<std::string, Value>;

struct Document {
    TableData root;
    std::map<std::string, TableData> tables;

    const Value* find(const std::string& table, const std::string& key) const;
};

Document parse(const std::string& text);

} // namespace metaweave::toml
