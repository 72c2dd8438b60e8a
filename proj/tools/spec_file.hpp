#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hlcf/extensions.hpp"
#include "hlcf/tower.hpp"

namespace hlcf::cli {

struct ExtSpec {
    std::string name;
    ExtKind kind = ExtKind::ArtinSchreier;
    std::string a;
    int ell = 0;
    int line = 0;
};

struct TaskSpec {
    std::string type;
    std::map<std::string, std::string> params;
    int line = 0;
};

/// Line-oriented spec file:
///
///     [field]
///     p = 2
///     f = 1
///     vars = t, u
///     prec = 12
///
///     [extension wild]
///     kind = artin-schreier
///     a = u^-1
///
///     [task]
///     type = verify
///     samples = 20
///
/// '#' starts a comment. Every expression is parsed against the field on load.
struct SpecFile {
    std::string origin;
    FieldConfig field;
    std::vector<ExtSpec> extensions;
    std::vector<TaskSpec> tasks;

    const Tower& tower() const { return Tower::get(field); }
    const ExtSpec& extension(const std::string& name) const;
};

/// ParseError with "origin:line: ..." messages on malformed input.
SpecFile parse_spec(std::string_view text, const std::string& origin = "<spec>");
SpecFile load_spec(const std::string& path);

std::vector<std::string> split_list(std::string_view s);
int parse_int(const std::string& s, const std::string& what);

}  // namespace hlcf::cli
