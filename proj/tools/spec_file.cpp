#include "spec_file.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "hlcf/errors.hpp"
#include "hlcf/parse.hpp"

namespace hlcf::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg, std::size_t col = 0) {
    std::string where = origin + ":" + std::to_string(line);
    if (col) where += ":" + std::to_string(col);
    throw ParseError(where + ": " + msg, col);
}

}  // namespace

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

int parse_int(const std::string& s, const std::string& what) {
    int v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ParseError("expected an integer for " + what + ", got '" + s + "'");
    return v;
}

const ExtSpec& SpecFile::extension(const std::string& name) const {
    for (const auto& e : extensions)
        if (e.name == name) return e;
    throw ParseError("no extension named '" + name + "'");
}

SpecFile parse_spec(std::string_view text, const std::string& origin) {
    SpecFile spec;
    spec.origin = origin;
    std::map<std::string, std::pair<std::string, int>> field;
    enum class Section { None, Field, Extension, Task } sec = Section::None;
    bool seen_field = false;
    std::map<std::string, std::pair<std::string, int>> ext_keys;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(origin, line, "unterminated section header");
            const std::string head = trim(s.substr(1, s.size() - 2));
            if (head == "field") {
                if (seen_field) fail(origin, line, "duplicate [field] section");
                seen_field = true;
                sec = Section::Field;
            } else if (head.rfind("extension", 0) == 0) {
                const std::string name = trim(head.substr(9));
                if (name.empty()) fail(origin, line, "extension section needs a name");
                for (const auto& e : spec.extensions)
                    if (e.name == name) fail(origin, line, "duplicate extension '" + name + "'");
                ExtSpec e;
                e.name = name;
                e.line = line;
                spec.extensions.push_back(e);
                sec = Section::Extension;
            } else if (head == "task") {
                TaskSpec t;
                t.line = line;
                spec.tasks.push_back(t);
                sec = Section::Task;
            } else {
                fail(origin, line, "unknown section [" + head + "]");
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(origin, line, "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(origin, line, "empty key");
        switch (sec) {
            case Section::None: fail(origin, line, "key outside of a section");
            case Section::Field: {
                static const std::set<std::string> keys{"p", "f", "vars", "prec", "modulus", "gen"};
                if (!keys.count(key)) fail(origin, line, "unknown field key '" + key + "'");
                field[key] = {value, line};
                break;
            }
            case Section::Extension: {
                static const std::set<std::string> keys{"kind", "a", "ell"};
                if (!keys.count(key)) fail(origin, line, "unknown extension key '" + key + "'");
                ExtSpec& e = spec.extensions.back();
                if (key == "kind") {
                    if (value == "artin-schreier" || value == "as")
                        e.kind = ExtKind::ArtinSchreier;
                    else if (value == "kummer")
                        e.kind = ExtKind::Kummer;
                    else
                        fail(origin, line, "kind must be artin-schreier or kummer");
                } else if (key == "a") {
                    e.a = value;
                } else {
                    try {
                        e.ell = parse_int(value, "ell");
                    } catch (const ParseError& err) {
                        fail(origin, line, err.what());
                    }
                }
                ext_keys[e.name + "/" + key] = {value, line};
                break;
            }
            case Section::Task: {
                TaskSpec& t = spec.tasks.back();
                if (key == "type")
                    t.type = value;
                else
                    t.params[key] = value;
                break;
            }
        }
    }
    if (!seen_field) fail(origin, line, "missing [field] section");

    auto need = [&](const std::string& k) -> std::pair<std::string, int> {
        auto it = field.find(k);
        if (it == field.end()) fail(origin, 0, "field section needs '" + k + "'");
        return it->second;
    };
    auto as_int = [&](const std::pair<std::string, int>& v, const std::string& what) {
        try {
            return parse_int(v.first, what);
        } catch (const ParseError& e) {
            fail(origin, v.second, e.what());
        }
    };
    FieldConfig& cfg = spec.field;
    cfg.p = as_int(need("p"), "p");
    cfg.f = field.count("f") ? as_int(field["f"], "f") : 1;
    cfg.vars = split_list(need("vars").first);
    for (const auto& v : cfg.vars)
        if (v.empty()) fail(origin, field["vars"].second, "empty variable name");
    std::vector<int> prec;
    if (field.count("prec"))
        for (const auto& x : split_list(field["prec"].first)) prec.push_back(as_int({x, field["prec"].second}, "prec"));
    if (prec.empty()) prec.push_back(10);
    if (prec.size() == 1) prec.assign(cfg.vars.size(), prec[0]);
    if (prec.size() != cfg.vars.size()) fail(origin, field["prec"].second, "one precision per variable");
    cfg.prec = prec;
    if (field.count("modulus")) {
        std::istringstream ms(field["modulus"].first);
        std::string tok;
        while (ms >> tok) cfg.modulus.push_back(as_int({tok, field["modulus"].second}, "modulus"));
    }
    if (field.count("gen")) cfg.gen_name = field["gen"].first;
    const Tower* tw = nullptr;
    try {
        tw = &Tower::get(cfg);
    } catch (const DomainError& e) {
        fail(origin, field.count("p") ? field["p"].second : 0, std::string("invalid field: ") + e.what());
    }

    for (auto& e : spec.extensions) {
        if (e.a.empty()) fail(origin, e.line, "extension '" + e.name + "' needs 'a'");
        if (e.ell == 0) {
            if (e.kind == ExtKind::Kummer) fail(origin, e.line, "Kummer extension '" + e.name + "' needs 'ell'");
            e.ell = cfg.p;
        }
        const int aline = ext_keys[e.name + "/a"].second;
        try {
            (void)parse_elem(*tw, e.a);
        } catch (const ParseError& err) {
            fail(origin, aline, "in '" + e.a + "': " + err.what(), err.position() + 1);
        }
    }
    static const std::set<std::string> types{"verify", "pair", "inv", "classify", "identity", "divisibility"};
    for (const auto& t : spec.tasks)
        if (!types.count(t.type)) fail(origin, t.line, "unknown or missing task type '" + t.type + "'");
    return spec;
}

SpecFile load_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open spec file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_spec(ss.str(), path);
}

}  // namespace hlcf::cli
