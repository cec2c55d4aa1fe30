#include "lasim/toml.hpp"

#include <cctype>
#include <sstream>
#include <vector>

#include "lasim/mcs_olm.hpp"

namespace lasim::toml {

namespace {

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;
    int line;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    void skip_ws() {
        while (!done() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("toml line " + std::to_string(line) + ": " + msg);
    }
};

std::string parse_basic_string(Cursor& c) {
    // c.peek() == '"'
    ++c.pos;
    std::string out;
    while (!c.done() && c.peek() != '"') {
        char ch = c.peek();
        if (ch == '\\') {
            ++c.pos;
            if (c.done()) c.fail("dangling escape in string");
            switch (c.peek()) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: c.fail("unsupported escape in string");
            }
        } else {
            out += ch;
        }
        ++c.pos;
    }
    if (c.done()) c.fail("unterminated string");
    ++c.pos;  // closing quote
    return out;
}

nlohmann::json parse_scalar(Cursor& c);

nlohmann::json parse_array(Cursor& c) {
    // c.peek() == '['
    ++c.pos;
    nlohmann::json arr = nlohmann::json::array();
    for (;;) {
        c.skip_ws();
        if (c.done()) c.fail("unterminated array");
        if (c.peek() == ']') {
            ++c.pos;
            return arr;
        }
        arr.push_back(parse_scalar(c));
        c.skip_ws();
        if (c.done()) c.fail("unterminated array");
        if (c.peek() == ',') {
            ++c.pos;
        } else if (c.peek() != ']') {
            c.fail("expected ',' or ']' in array");
        }
    }
}

nlohmann::json parse_scalar(Cursor& c) {
    c.skip_ws();
    if (c.done()) c.fail("missing value");
    if (c.peek() == '"') return parse_basic_string(c);
    if (c.peek() == '[') return parse_array(c);

    std::size_t start = c.pos;
    while (!c.done() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#') ++c.pos;
    std::string tok = c.s.substr(start, c.pos - start);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.pop_back();
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok.empty()) c.fail("missing value");

    // TOML permits underscores in numbers
    std::string num;
    for (char ch : tok)
        if (ch != '_') num += ch;
    try {
        if (num.find_first_of(".eE") == std::string::npos &&
            num.find_first_not_of("+-0123456789") == std::string::npos) {
            std::size_t used = 0;
            long long v = std::stoll(num, &used);
            if (used == num.size()) return v;
        }
        std::size_t used = 0;
        double v = std::stod(num, &used);
        if (used == num.size()) return v;
    } catch (const std::exception&) {
    }
    c.fail("cannot parse value '" + tok + "'");
}

std::vector<std::string> split_dotted(const std::string& name, Cursor& c) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : name) {
        if (ch == '.') {
            if (cur.empty()) c.fail("empty component in dotted name");
            parts.push_back(cur);
            cur.clear();
        } else if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-') {
            cur += ch;
        } else if (ch == ' ' || ch == '\t') {
            continue;
        } else {
            c.fail(std::string("unexpected character '") + ch + "' in name");
        }
    }
    if (cur.empty()) c.fail("empty component in dotted name");
    parts.push_back(cur);
    return parts;
}

std::string strip_comment(const std::string& raw) {
    bool in_string = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '"' && (i == 0 || raw[i - 1] != '\\')) in_string = !in_string;
        if (raw[i] == '#' && !in_string) return raw.substr(0, i);
    }
    return raw;
}

nlohmann::json* descend(nlohmann::json& root, const std::vector<std::string>& path, Cursor& c) {
    nlohmann::json* node = &root;
    for (const std::string& key : path) {
        if (!node->is_object()) c.fail("cannot enter '" + key + "': parent is not a table");
        nlohmann::json& child = (*node)[key];
        if (child.is_null()) child = nlohmann::json::object();
        if (child.is_array()) {
            if (child.empty()) c.fail("'" + key + "': empty table array");
            node = &child.back();
        } else {
            node = &child;
        }
    }
    return node;
}

}  // namespace

nlohmann::json parse(const std::string& text) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* current = &root;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = strip_comment(raw);
        Cursor c{line, 0, line_no};
        c.skip_ws();
        if (c.done()) continue;

        if (c.peek() == '[') {
            const bool table_array = c.pos + 1 < line.size() && line[c.pos + 1] == '[';
            const std::size_t open = c.pos + (table_array ? 2 : 1);
            const std::string closer = table_array ? "]]" : "]";
            const std::size_t close = line.find(closer, open);
            if (close == std::string::npos) c.fail("unterminated table header");
            auto path = split_dotted(line.substr(open, close - open), c);
            if (table_array) {
                auto parent_path = path;
                parent_path.pop_back();
                nlohmann::json* parent = descend(root, parent_path, c);
                nlohmann::json& arr = (*parent)[path.back()];
                if (arr.is_null()) arr = nlohmann::json::array();
                if (!arr.is_array()) c.fail("'" + path.back() + "' is not a table array");
                arr.push_back(nlohmann::json::object());
                current = &arr.back();
            } else {
                current = descend(root, path, c);
            }
            continue;
        }

        const std::size_t eq = line.find('=', c.pos);
        if (eq == std::string::npos) c.fail("expected 'key = value'");
        auto key_path = split_dotted(line.substr(c.pos, eq - c.pos), c);
        Cursor v{line, eq + 1, line_no};
        nlohmann::json value = parse_scalar(v);
        v.skip_ws();
        if (!v.done()) v.fail("trailing characters after value");

        nlohmann::json* node = current;
        for (std::size_t i = 0; i + 1 < key_path.size(); ++i) {
            nlohmann::json& child = (*node)[key_path[i]];
            if (child.is_null()) child = nlohmann::json::object();
            if (!child.is_object()) c.fail("'" + key_path[i] + "' is not a table");
            node = &child;
        }
        if (node->contains(key_path.back())) c.fail("duplicate key '" + key_path.back() + "'");
        (*node)[key_path.back()] = std::move(value);
    }
    return root;
}

}  // namespace lasim::toml
