#include "jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "tomlread.hpp"

namespace halfline::tools {
namespace {

void escape_string(const std::string& s, std::string& out) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

bool is_scalar(const Json& j) {
    return j.is_primitive();  // null, bool, number, string
}

void emit(const Json& j, std::string& out, int depth) {
    const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
    const std::string pad_in(2 * static_cast<std::size_t>(depth + 1), ' ');
    switch (j.type()) {
        case Json::value_t::null: out += "null"; break;
        case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
        case Json::value_t::number_integer:
            out += std::to_string(j.get<long long>());
            break;
        case Json::value_t::number_unsigned:
            out += std::to_string(j.get<unsigned long long>());
            break;
        case Json::value_t::number_float: out += format_double(j.get<double>()); break;
        case Json::value_t::string: escape_string(j.get<std::string>(), out); break;
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                break;
            }
            bool inline_form = true;
            for (const auto& e : j) {
                if (!is_scalar(e)) {
                    inline_form = false;
                    break;
                }
            }
            out += '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += inline_form ? ", " : ",";
                if (!inline_form) {
                    out += '\n';
                    out += pad_in;
                }
                emit(e, out, depth + 1);
                first = false;
            }
            if (!inline_form) {
                out += '\n';
                out += pad;
            }
            out += ']';
            break;
        }
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                break;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                out += '\n';
                out += pad_in;
                escape_string(it.key(), out);
                out += ": ";
                emit(it.value(), out, depth + 1);
                first = false;
            }
            out += '\n';
            out += pad;
            out += '}';
            break;
        }
        default: throw std::logic_error("unserializable JSON value");
    }
}

}  // namespace

std::string format_double(double v) {
    if (!std::isfinite(v)) {
        throw std::logic_error("non-finite value in serialized output");
    }
    if (v == 0.0) return "0";  // collapses the -0/+0 distinction
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string canonical_json(const Json& doc) {
    std::string out;
    emit(doc, out, 0);
    out += '\n';
    return out;
}

void write_json_file(const std::string& path, const Json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << canonical_json(doc);
    if (!out) throw ConfigError("write failed: " + path);
}

Json complex_json(Complex z) {
    return Json::array({z.real(), z.imag()});
}

}  // namespace halfline::tools
