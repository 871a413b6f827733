#include "mtbandit/harness/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mtbandit::harness {

namespace {

std::string describe(const std::string& key, int line, const std::string& message) {
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    if (!key.empty()) os << "'" << key << "': ";
    os << message;
    return os.str();
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Drops a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '\\' && quoted) {
            ++i;
        } else if (c == '"') {
            quoted = !quoted;
        } else if (c == '#' && !quoted) {
            return line.substr(0, i);
        }
    }
    return line;
}

bool parse_int(const std::string& t, std::int64_t& out) {
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_double(const std::string& t, double& out) {
    if (t.empty()) return false;
    const char* begin = t.data();
    if (*begin == '+') ++begin;
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
    }
    return true;
}

}  // namespace

ConfigError::ConfigError(const std::string& key, int line, const std::string& message)
    : Error(describe(key, line, message)), key_(key), line_(line) {}

ConfigValue ConfigValue::boolean(bool v) {
    ConfigValue out;
    out.type = Type::Bool;
    out.b = v;
    return out;
}

ConfigValue ConfigValue::integer(std::int64_t v) {
    ConfigValue out;
    out.type = Type::Int;
    out.i = v;
    return out;
}

ConfigValue ConfigValue::real(double v) {
    ConfigValue out;
    out.type = Type::Float;
    out.d = v;
    return out;
}

ConfigValue ConfigValue::string(std::string v) {
    ConfigValue out;
    out.type = Type::String;
    out.s = std::move(v);
    return out;
}

ConfigValue ConfigValue::numbers(std::vector<double> v) {
    ConfigValue out;
    out.type = Type::List;
    out.list = std::move(v);
    return out;
}

bool ConfigValue::operator==(const ConfigValue& o) const {
    if (type != o.type) return false;
    switch (type) {
        case Type::Bool: return b == o.b;
        case Type::Int: return i == o.i;
        case Type::Float: return d == o.d;
        case Type::String: return s == o.s;
        case Type::List: return list == o.list;
    }
    return false;
}

ConfigValue parse_value(const std::string& raw, int line, const std::string& key) {
    const std::string text = trim(raw);
    ConfigValue out;
    if (text.empty()) throw ConfigError(key, line, "missing value");
    if (text == "true" || text == "false") {
        out = ConfigValue::boolean(text == "true");
    } else if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"') throw ConfigError(key, line, "unterminated string");
        std::string s;
        for (std::size_t i = 1; i + 1 < text.size(); ++i) {
            char c = text[i];
            if (c == '\\') {
                if (i + 2 >= text.size()) throw ConfigError(key, line, "dangling escape in string");
                c = text[++i];
                if (c != '"' && c != '\\') throw ConfigError(key, line, std::string("unknown escape \\") + c);
            } else if (c == '"') {
                throw ConfigError(key, line, "unescaped quote inside string");
            }
            s.push_back(c);
        }
        out = ConfigValue::string(std::move(s));
    } else if (text.front() == '[') {
        if (text.back() != ']') throw ConfigError(key, line, "unterminated list");
        std::vector<double> items;
        const std::string body = trim(text.substr(1, text.size() - 2));
        if (!body.empty()) {
            std::stringstream ss(body);
            std::string item;
            while (std::getline(ss, item, ',')) {
                double v = 0.0;
                if (!parse_double(trim(item), v)) throw ConfigError(key, line, "list items must be numbers");
                items.push_back(v);
            }
            if (body.back() == ',') throw ConfigError(key, line, "trailing comma in list");
        }
        out = ConfigValue::numbers(std::move(items));
    } else {
        std::int64_t iv = 0;
        double dv = 0.0;
        if (parse_int(text, iv)) {
            out = ConfigValue::integer(iv);
        } else if (parse_double(text, dv)) {
            out = ConfigValue::real(dv);
        } else {
            throw ConfigError(key, line, "cannot parse value '" + text + "' (strings must be quoted)");
        }
    }
    out.line = line;
    return out;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

std::string format_value(const ConfigValue& v) {
    switch (v.type) {
        case ConfigValue::Type::Bool: return v.b ? "true" : "false";
        case ConfigValue::Type::Int: return std::to_string(v.i);
        case ConfigValue::Type::Float: {
            std::string s = format_double(v.d);
            // Keep the float type on the way back in.
            if (s.find_first_of(".eE") == std::string::npos) s += ".0";
            return s;
        }
        case ConfigValue::Type::String: {
            std::string s = "\"";
            for (char c : v.s) {
                if (c == '"' || c == '\\') s.push_back('\\');
                s.push_back(c);
            }
            return s + "\"";
        }
        case ConfigValue::Type::List: {
            std::string s = "[";
            for (std::size_t i = 0; i < v.list.size(); ++i) {
                if (i > 0) s += ", ";
                s += format_double(v.list[i]);
            }
            return s + "]";
        }
    }
    return {};
}

const ConfigValue* ConfigSection::find(const std::string& key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return &v;
    }
    return nullptr;
}

void ConfigSection::set(const std::string& key, ConfigValue value) {
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries.emplace_back(key, std::move(value));
}

const ConfigSection* ConfigDocument::find(const std::string& name) const {
    for (const auto& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

ConfigSection& ConfigDocument::get_or_add(const std::string& name) {
    for (auto& s : sections) {
        if (s.name == name) return s;
    }
    sections.push_back(ConfigSection{name, 0, {}});
    return sections.back();
}

void ConfigDocument::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError(assignment, 0, "override must look like section.key=value");
    const std::string path = trim(assignment.substr(0, eq));
    const auto dot = path.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
        throw ConfigError(path, 0, "override key must be section.key");
    }
    const std::string section = path.substr(0, dot);
    const std::string key = path.substr(dot + 1);
    const std::string text = trim(assignment.substr(eq + 1));
    ConfigValue value;
    try {
        value = parse_value(text, 0, path);
    } catch (const ConfigError&) {
        // Bare words are strings on the command line, so shells need no extra quoting.
        const bool bare = !text.empty() && std::all_of(text.begin(), text.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
        });
        if (!bare) throw;
        value = ConfigValue::string(text);
    }
    get_or_add(section).set(key, std::move(value));
}

ConfigDocument parse_config(const std::string& text) {
    ConfigDocument doc;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    ConfigSection* current = nullptr;
    while (std::getline(in, raw)) {
        ++line;
        const std::string body = trim(strip_comment(raw));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError("", line, "malformed section header");
            const std::string name = trim(body.substr(1, body.size() - 2));
            if (!valid_key(name)) throw ConfigError(name, line, "invalid section name");
            if (doc.find(name)) throw ConfigError(name, line, "duplicate section");
            doc.sections.push_back(ConfigSection{name, line, {}});
            current = &doc.sections.back();
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError("", line, "expected key = value");
        const std::string key = trim(body.substr(0, eq));
        if (!valid_key(key)) throw ConfigError(key, line, "invalid key");
        if (!current) throw ConfigError(key, line, "key outside of any section");
        if (current->find(key)) throw ConfigError(current->name + "." + key, line, "duplicate key");
        current->entries.emplace_back(key, parse_value(body.substr(eq + 1), line, current->name + "." + key));
    }
    return doc;
}

ConfigDocument load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", 0, "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ConfigDocument& doc) {
    std::string out;
    for (std::size_t s = 0; s < doc.sections.size(); ++s) {
        if (s > 0) out += "\n";
        out += "[" + doc.sections[s].name + "]\n";
        for (const auto& [k, v] : doc.sections[s].entries) out += k + " = " + format_value(v) + "\n";
    }
    return out;
}

}  // namespace mtbandit::harness
