#include "tomlread.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace halfline::tools {
namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

bool is_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

// Cursor over one logical line (continuation for arrays is handled by the
// caller feeding more text).
struct Cursor {
    const std::string& origin;
    std::string text;
    std::size_t pos = 0;
    int line;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    void skip_ws() {
        while (!done() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }

    [[noreturn]] void fail_here(const std::string& msg) const { fail(origin, line, msg); }
};

// Comment stripping has to respect string literals, so it scans rather than
// truncating at the first '#'.
std::string strip_comment(const std::string& raw, const std::string& origin, int line) {
    bool in_string = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (in_string) {
            if (c == '\\') {
                ++i;  // skip the escaped character
            } else if (c == '"') {
                in_string = false;
            }
        } else if (c == '"') {
            in_string = true;
        } else if (c == '#') {
            return raw.substr(0, i);
        }
    }
    if (in_string) fail(origin, line, "unterminated string");
    return raw;
}

std::string parse_basic_string(Cursor& cur) {
    // cur.peek() == '"'
    ++cur.pos;
    std::string out;
    while (true) {
        if (cur.done()) cur.fail_here("unterminated string");
        char c = cur.text[cur.pos++];
        if (c == '"') return out;
        if (c == '\\') {
            if (cur.done()) cur.fail_here("dangling escape");
            char e = cur.text[cur.pos++];
            switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                default: cur.fail_here(std::string("unsupported escape \\") + e);
            }
        } else {
            out += c;
        }
    }
}

TomlValue parse_scalar_token(Cursor& cur, const std::string& token) {
    TomlValue v;
    v.line = cur.line;
    if (token == "true" || token == "false") {
        v.kind = TomlValue::Kind::Bool;
        v.boolean = (token == "true");
        return v;
    }
    const char* first = token.data();
    const char* last = token.data() + token.size();
    // from_chars does not eat a leading '+'.
    if (first != last && *first == '+') ++first;
    long long as_int = 0;
    auto ri = std::from_chars(first, last, as_int);
    if (ri.ec == std::errc() && ri.ptr == last) {
        v.kind = TomlValue::Kind::Integer;
        v.integer = as_int;
        v.number = static_cast<double>(as_int);
        return v;
    }
    double as_double = 0.0;
    auto rd = std::from_chars(first, last, as_double);
    if (rd.ec == std::errc() && rd.ptr == last) {
        v.kind = TomlValue::Kind::Float;
        v.number = as_double;
        return v;
    }
    cur.fail_here("cannot parse value '" + token + "'");
}

// Reads one scalar starting at cur.pos (string literal or bare token up to a
// delimiter).
TomlValue parse_scalar(Cursor& cur) {
    cur.skip_ws();
    if (cur.done()) cur.fail_here("missing value");
    if (cur.peek() == '"') {
        TomlValue v;
        v.kind = TomlValue::Kind::String;
        v.line = cur.line;
        v.str = parse_basic_string(cur);
        return v;
    }
    std::size_t start = cur.pos;
    while (!cur.done()) {
        char c = cur.peek();
        if (c == ',' || c == ']' || c == ' ' || c == '\t') break;
        if (c == '[') cur.fail_here("nested arrays are not supported");
        ++cur.pos;
    }
    if (cur.pos == start) cur.fail_here("missing value");
    return parse_scalar_token(cur, cur.text.substr(start, cur.pos - start));
}

const char* kind_name(TomlValue::Kind k) {
    switch (k) {
        case TomlValue::Kind::String: return "string";
        case TomlValue::Kind::Bool: return "boolean";
        case TomlValue::Kind::Integer: return "integer";
        case TomlValue::Kind::Float: return "float";
        case TomlValue::Kind::Array: return "array";
    }
    return "?";
}

bool same_element_kind(TomlValue::Kind a, TomlValue::Kind b) {
    auto numeric = [](TomlValue::Kind k) {
        return k == TomlValue::Kind::Integer || k == TomlValue::Kind::Float;
    };
    if (numeric(a) && numeric(b)) return true;
    return a == b;
}

TomlValue parse_array(Cursor& cur) {
    // cur.peek() == '['
    TomlValue arr;
    arr.kind = TomlValue::Kind::Array;
    arr.line = cur.line;
    ++cur.pos;
    bool expecting_value = true;
    while (true) {
        cur.skip_ws();
        if (cur.done()) cur.fail_here("unterminated array");
        if (cur.peek() == ']') {
            ++cur.pos;
            return arr;
        }
        if (!expecting_value) {
            if (cur.peek() != ',') cur.fail_here("expected ',' or ']' in array");
            ++cur.pos;
            expecting_value = true;
            continue;
        }
        TomlValue elem = parse_scalar(cur);
        if (!arr.items.empty() && !same_element_kind(arr.items.front().kind, elem.kind)) {
            cur.fail_here(std::string("mixed array element types (") +
                          kind_name(arr.items.front().kind) + " vs " + kind_name(elem.kind) +
                          ")");
        }
        arr.items.push_back(std::move(elem));
        expecting_value = false;
    }
}

}  // namespace

TomlTable parse_toml(const std::string& text, const std::string& origin) {
    TomlTable table;
    table.origin = origin;
    table.sections[""] = {};
    table.section_lines[""] = 0;

    std::istringstream in(text);
    std::string current_section;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string body = strip_comment(raw, origin, line_no);
        Cursor cur{origin, body, 0, line_no};
        cur.skip_ws();
        if (cur.done()) continue;

        if (cur.peek() == '[') {
            ++cur.pos;
            std::size_t start = cur.pos;
            while (!cur.done() && is_key_char(cur.peek())) ++cur.pos;
            std::string name = body.substr(start, cur.pos - start);
            if (name.empty()) cur.fail_here("empty section name");
            if (cur.done() || cur.peek() != ']') {
                cur.fail_here("malformed section header (nested tables are not supported)");
            }
            ++cur.pos;
            cur.skip_ws();
            if (!cur.done()) cur.fail_here("trailing characters after section header");
            if (table.has_section(name)) {
                cur.fail_here("duplicate section [" + name + "]");
            }
            table.sections[name] = {};
            table.section_lines[name] = line_no;
            current_section = name;
            continue;
        }

        std::size_t key_start = cur.pos;
        while (!cur.done() && is_key_char(cur.peek())) ++cur.pos;
        std::string key = body.substr(key_start, cur.pos - key_start);
        if (key.empty()) cur.fail_here("expected a key");
        cur.skip_ws();
        if (cur.done() || cur.peek() != '=') {
            cur.fail_here("expected '=' after key '" + key + "'");
        }
        ++cur.pos;
        cur.skip_ws();
        if (cur.done()) cur.fail_here("missing value for key '" + key + "'");

        TomlValue value;
        const int value_line = line_no;  // where the key sits, for messages
        if (cur.peek() == '[') {
            // Arrays may continue on following lines; splice until the
            // bracket closes (strings cannot contain newlines, so a line-wise
            // splice is safe).
            std::string spliced = body.substr(cur.pos);
            while (true) {
                bool in_string = false;
                bool found = false;
                for (std::size_t i = 0; i < spliced.size() && !found; ++i) {
                    char c = spliced[i];
                    if (in_string) {
                        if (c == '\\') {
                            ++i;
                        } else if (c == '"') {
                            in_string = false;
                        }
                    } else if (c == '"') {
                        in_string = true;
                    } else if (c == ']') {
                        found = true;
                    }
                }
                if (found) break;
                std::string more;
                if (!std::getline(in, more)) fail(origin, value_line, "unterminated array");
                ++line_no;
                if (!more.empty() && more.back() == '\r') more.pop_back();
                spliced += ' ';
                spliced += strip_comment(more, origin, line_no);
            }
            Cursor acur{origin, spliced, 0, value_line};
            value = parse_array(acur);
            acur.skip_ws();
            if (!acur.done()) acur.fail_here("trailing characters after array value");
        } else {
            value = parse_scalar(cur);
            cur.skip_ws();
            if (!cur.done()) cur.fail_here("trailing characters after value");
        }

        auto& sec = table.sections[current_section];
        if (sec.find(key) != sec.end()) {
            fail(origin, value_line,
                 "duplicate key '" + key + "' in section [" + current_section + "]");
        }
        value.line = value_line;
        sec.emplace(key, std::move(value));
    }
    return table;
}

TomlTable parse_toml_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_toml(buf.str(), path);
}

}  // namespace halfline::tools
