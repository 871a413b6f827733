#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtbandit/errors.hpp"

namespace mtbandit::harness {

/// Config problem with the offending key and, when known, its line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& key, int line, const std::string& message);

    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    std::string key_;
    int line_;
};

/// A typed scalar or a flat numeric list.
struct ConfigValue {
    enum class Type { Bool, Int, Float, String, List };

    Type type = Type::Int;
    bool b = false;
    std::int64_t i = 0;
    double d = 0.0;
    std::string s;
    std::vector<double> list;
    int line = 0;

    static ConfigValue boolean(bool v);
    static ConfigValue integer(std::int64_t v);
    static ConfigValue real(double v);
    static ConfigValue string(std::string v);
    static ConfigValue numbers(std::vector<double> v);

    bool operator==(const ConfigValue& o) const;
};

/// Parses a value literal: true/false, integers, floats, "quoted strings" or [numeric, lists].
ConfigValue parse_value(const std::string& text, int line, const std::string& key);

/// Text form that parse_value reads back to an equal value.
std::string format_value(const ConfigValue& v);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

struct ConfigSection {
    std::string name;
    int line = 0;
    std::vector<std::pair<std::string, ConfigValue>> entries;

    const ConfigValue* find(const std::string& key) const;
    void set(const std::string& key, ConfigValue value);

    bool operator==(const ConfigSection& o) const { return name == o.name && entries == o.entries; }
};

/// Sections in file order, each holding key = value lines in file order.
///
///     # comment
///     [experiment]
///     trials = 10
///     [algorithm.mtkb]
///     eta = 0.1
class ConfigDocument {
public:
    std::vector<ConfigSection> sections;

    const ConfigSection* find(const std::string& name) const;
    ConfigSection& get_or_add(const std::string& name);

    /// Applies "section.key=value"; the section is everything before the last dot.
    void apply_override(const std::string& assignment);

    bool operator==(const ConfigDocument& o) const { return sections == o.sections; }
};

ConfigDocument parse_config(const std::string& text);
ConfigDocument load_config(const std::string& path);
std::string serialize_config(const ConfigDocument& doc);

}  // namespace mtbandit::harness
