#include "metaweave/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

#include "metaweave/errors.hpp"

namespace metaweave::toml {

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_inline_ws() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
    void skip_ws_and_comments() {
        while (!done()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                take();
            } else if (c == '#') {
                while (!done() && peek() != '\n') ++pos;
            } else {
                break;
            }
        }
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("toml: " + what + " at line " + std::to_string(line));
    }
};

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_key(Cursor& cur) {
    cur.skip_inline_ws();
    std::string key;
    if (!cur.done() && cur.peek() == '"') {
        cur.take();
        while (!cur.done() && cur.peek() != '"') key.push_back(cur.take());
        if (cur.done()) cur.fail("unterminated quoted key");
        cur.take();
    } else {
        while (!cur.done() && is_bare_key_char(cur.peek())) key.push_back(cur.take());
    }
    if (key.empty()) cur.fail("expected key");
    return key;
}

std::string parse_basic_string(Cursor& cur) {
    cur.take(); // opening quote
    std::string out;
    while (!cur.done()) {
        char c = cur.take();
        if (c == '"') return out;
        if (c == '\\') {
            if (cur.done()) cur.fail("dangling escape");
            char e = cur.take();
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: cur.fail(std::string("unsupported escape \\") + e);
            }
        } else {
            out.push_back(c);
        }
    }
    cur.fail("unterminated string");
}

Value parse_value(Cursor& cur);

Value parse_array(Cursor& cur) {
    cur.take(); // '['
    Value v;
    v.type = Value::Type::Array;
    while (true) {
        cur.skip_ws_and_comments();
        if (cur.done()) cur.fail("unterminated array");
        if (cur.peek() == ']') {
            cur.take();
            return v;
        }
        v.array.push_back(parse_value(cur));
        cur.skip_ws_and_comments();
        if (!cur.done() && cur.peek() == ',') cur.take();
    }
}

Value parse_scalar_token(Cursor& cur) {
    std::string token;
    while (!cur.done()) {
        char c = cur.peek();
        if (c == '\n' || c == '\r' || c == '#' || c == ',' || c == ']') break;
        token.push_back(cur.take());
    }
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t')) token.pop_back();
    if (token.empty()) cur.fail("expected value");

    Value v;
    if (token == "true" || token == "false") {
        v.type = Value::Type::Boolean;
        v.boolean = token == "true";
        return v;
    }
    char* end = nullptr;
    long long i = std::strtoll(token.c_str(), &end, 10);
    if (end && *end == '\0') {
        v.type = Value::Type::Integer;
        v.integer = i;
        v.number = static_cast<double>(i);
        return v;
    }
    double d = std::strtod(token.c_str(), &end);
    if (end && *end == '\0') {
        v.type = Value::Type::Float;
        v.number = d;
        return v;
    }
    cur.fail("unquoted value '" + token + "' is not a number or boolean");
}

Value parse_value(Cursor& cur) {
    cur.skip_inline_ws();
    if (cur.done()) cur.fail("expected value");
    char c = cur.peek();
    if (c == '"') {
        Value v;
        v.type = Value::Type::String;
        v.str = parse_basic_string(cur);
        return v;
    }
    if (c == '[') return parse_array(cur);
    return parse_scalar_token(cur);
}

} // namespace

std::string Value::as_string() const {
    if (type == Type::String) return str;
    if (type == Type::Integer) return std::to_string(integer);
    if (type == Type::Boolean) return boolean ? "true" : "false";
    if (type == Type::Float) return std::to_string(number);
    throw InputError("toml: expected a scalar, found an array");
}

std::vector<std::string> Value::as_string_array() const {
    if (type != Type::Array) throw InputError("toml: expected an array");
    std::vector<std::string> out;
    out.reserve(array.size());
    for (const auto& v : array) out.push_back(v.as_string());
    return out;
}

double Value::as_number() const {
    if (type == Type::Integer) return static_cast<double>(integer);
    if (type == Type::Float) return number;
    throw InputError("toml: expected a number");
}

long long Value::as_integer() const {
    if (type == Type::Integer) return integer;
    throw InputError("toml: expected an integer");
}

const Value* Document::find(const std::string& table, const std::string& key) const {
    const TableData* t = &root;
    if (!table.empty()) {
        auto it = tables.find(table);
        if (it == tables.end()) return nullptr;
        t = &it->second;
    }
    auto it = t->find(key);
    return it == t->end() ? nullptr : &it->second;
}

Document parse(const std::string& text) {
    Document doc;
    Cursor cur{text};
    std::string current_table;

    while (true) {
        cur.skip_ws_and_comments();
        if (cur.done()) break;
        if (cur.peek() == '[') {
            cur.take();
            std::string name;
            while (!cur.done() && cur.peek() != ']') name.push_back(cur.take());
            if (cur.done()) cur.fail("unterminated table header");
            cur.take();
            if (name.empty()) cur.fail("empty table name");
            current_table = name;
            doc.tables.emplace(name, TableData{});
            continue;
        }
        std::string key = parse_key(cur);
        cur.skip_inline_ws();
        if (cur.done() || cur.take() != '=') cur.fail("expected '=' after key '" + key + "'");
        Value value = parse_value(cur);
        TableData& target = current_table.empty() ? doc.root : doc.tables[current_table];
        if (target.count(key)) cur.fail("duplicate key '" + key + "'");
        target[key] = std::move(value);
    }
    return doc;
}

} // namespace metaweave::toml
