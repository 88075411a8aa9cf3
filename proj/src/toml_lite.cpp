#include "latchsim/toml_lite.hpp"

#include <cctype>
#include <sstream>
#include <vector>

namespace latchsim {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

/// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

std::vector<std::string> split_dotted(const std::string& key, int line) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : key) {
        if (c == '.') {
            if (cur.empty()) throw ParseError("empty table name component", line);
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (trim(cur).empty()) throw ParseError("empty table name component", line);
    parts.push_back(trim(cur));
    return parts;
}

json parse_scalar(const std::string& raw, int line);

json parse_array(const std::string& raw, int line) {
    json arr = json::array();
    std::string inner = trim(raw.substr(1, raw.size() - 2));
    if (inner.empty()) return arr;
    std::string cur;
    bool in_str = false;
    for (char c : inner) {
        if (c == '"') in_str = !in_str;
        if (c == ',' && !in_str) {
            arr.push_back(parse_scalar(trim(cur), line));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) arr.push_back(parse_scalar(trim(cur), line));
    return arr;
}

json parse_scalar(const std::string& raw, int line) {
    if (raw.empty()) throw ParseError("missing value", line);
    if (raw.front() == '[') {
        if (raw.back() != ']') throw ParseError("unterminated array", line);
        return parse_array(raw, line);
    }
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') throw ParseError("unterminated string", line);
        return raw.substr(1, raw.size() - 2);
    }
    if (raw == "true") return true;
    if (raw == "false") return false;

    // integer or float
    std::string num = raw;
    bool is_float = num.find_first_of(".eE") != std::string::npos;
    try {
        size_t used = 0;
        if (is_float) {
            double v = std::stod(num, &used);
            if (used != num.size()) throw std::invalid_argument(num);
            return v;
        }
        long long v = std::stoll(num, &used);
        if (used != num.size()) throw std::invalid_argument(num);
        return v;
    } catch (const std::exception&) {
        throw ParseError("cannot parse value '" + raw + "'", line);
    }
}

json* descend(json& root, const std::vector<std::string>& path, int line) {
    json* node = &root;
    for (const auto& part : path) {
        json& slot = (*node)[part];
        if (slot.is_array()) {
            if (slot.empty()) throw ParseError("table array '" + part + "' has no element", line);
            node = &slot.back();
        } else {
            if (slot.is_null()) slot = json::object();
            if (!slot.is_object()) throw ParseError("'" + part + "' is not a table", line);
            node = &slot;
        }
    }
    return node;
}

}  // namespace

nlohmann::json parse_toml_lite(const std::string& text) {
    json root = json::object();
    json* current = &root;

    std::istringstream in(text);
    std::string rawline;
    int ln = 0;
    while (std::getline(in, rawline)) {
        ++ln;
        std::string s = trim(strip_comment(rawline));
        if (s.empty()) continue;

        if (s.front() == '[') {
            bool array_of_tables = s.size() > 1 && s[1] == '[';
            size_t close = s.find(array_of_tables ? "]]" : "]");
            if (close == std::string::npos) throw ParseError("unterminated table header", ln);
            std::string name = trim(s.substr(array_of_tables ? 2 : 1, close - (array_of_tables ? 2 : 1)));
            if (name.empty()) throw ParseError("empty table name", ln);
            auto path = split_dotted(name, ln);

            if (array_of_tables) {
                json* parent = &root;
                for (size_t i = 0; i + 1 < path.size(); ++i)
                    parent = descend(*parent, {path[i]}, ln);
                json& slot = (*parent)[path.back()];
                if (slot.is_null()) slot = json::array();
                if (!slot.is_array()) throw ParseError("'" + path.back() + "' is not a table array", ln);
                slot.push_back(json::object());
                current = &slot.back();
            } else {
                current = descend(root, path, ln);
            }
            continue;
        }

        size_t eq = std::string::npos;
        bool in_str = false;
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') in_str = !in_str;
            if (s[i] == '=' && !in_str) { eq = i; break; }
        }
        if (eq == std::string::npos) throw ParseError("expected key = value", ln);
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", ln);
        if (current->contains(key)) throw ParseError("duplicate key '" + key + "'", ln);
        (*current)[key] = parse_scalar(val, ln);
    }
    return root;
}

}  // namespace latchsim
