#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace halfline::tools {

// Configuration file rejected: syntax, types, unknown keys, or missing
// required entries. The message carries file name and line number when the
// problem is tied to a specific line.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// One parsed value. Arrays are flat and homogeneous (no nesting, no mixing);
// integer-looking numbers remember that they were integers so whole-number
// settings (grid counts) can be range-checked exactly.
struct TomlValue {
    enum class Kind { String, Bool, Integer, Float, Array };

    Kind kind = Kind::String;
    std::string str;
    bool boolean = false;
    long long integer = 0;
    double number = 0.0;  // set for Integer too
    std::vector<TomlValue> items;
    int line = 0;

    bool is_number() const { return kind == Kind::Integer || kind == Kind::Float; }
};

// Sections in declaration order are irrelevant to meaning; keys live under
// the section that precedes them ("" before the first header).
struct TomlTable {
    std::string origin;  // file name for error messages
    std::map<std::string, std::map<std::string, TomlValue>> sections;
    std::map<std::string, int> section_lines;

    bool has_section(const std::string& name) const {
        return sections.find(name) != sections.end();
    }
};

// Accepted subset: one-level [section] headers, key = value pairs, # comments,
// basic "strings" with \\ \" \n \t \r escapes, booleans, integers, floats,
// and flat homogeneous arrays which may span lines. Duplicate keys or
// sections, nested arrays, dotted keys, and everything else TOML allows are
// rejected with a line-numbered ConfigError.
TomlTable parse_toml(const std::string& text, const std::string& origin);

TomlTable parse_toml_file(const std::string& path);

}  // namespace halfline::tools
