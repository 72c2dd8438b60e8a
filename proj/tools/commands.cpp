#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "hlcf/cohomology.hpp"
#include "hlcf/errors.hpp"
#include "hlcf/parse.hpp"
#include "hlcf/random.hpp"
#include "hlcf/reciprocity.hpp"

namespace hlcf::cli {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

// Task parameters with per-type key checking and command-line overrides.
class Params {
public:
    Params(const SpecFile& spec, const TaskSpec& t, std::set<std::string> allowed, const Overrides& ov)
        : spec_(spec), t_(t), ov_(ov) {
        for (const auto& [k, v] : t.params)
            if (!allowed.count(k))
                throw ParseError(spec.origin + ":" + std::to_string(t.line) + ": unknown " + t.type + " parameter '" +
                                 k + "'");
    }

    bool has(const std::string& k) const { return t_.params.count(k) != 0; }
    std::string str(const std::string& k, const std::string& def = {}) const {
        auto it = t_.params.find(k);
        return it == t_.params.end() ? def : it->second;
    }
    int integer(const std::string& k, int def) const {
        if (!has(k)) return def;
        try {
            return parse_int(str(k), k);
        } catch (const ParseError& e) {
            throw ParseError(where() + e.what());
        }
    }
    std::string required(const std::string& k) const {
        if (!has(k)) throw ParseError(where() + t_.type + " task needs '" + k + "'");
        return str(k);
    }
    int ell(int def) const { return ov_.ell ? *ov_.ell : integer("ell", def); }
    int samples(int def) const { return ov_.samples ? *ov_.samples : integer("samples", def); }
    std::uint64_t seed() const {
        if (ov_.seed) return *ov_.seed;
        return static_cast<std::uint64_t>(integer("seed", 0));
    }
    // Filtration bound: command line, then task, then the supplied default.
    int M(int def) const { return ov_.level ? *ov_.level : integer("M", def); }
    std::string where() const { return spec_.origin + ":" + std::to_string(t_.line) + ": "; }
    std::vector<std::string> extension_names() const {
        if (!has("extension")) {
            std::vector<std::string> all;
            for (const auto& e : spec_.extensions) all.push_back(e.name);
            return all;
        }
        auto names = split_list(str("extension"));
        for (const auto& n : names)
            if (std::none_of(spec_.extensions.begin(), spec_.extensions.end(),
                             [&](const ExtSpec& e) { return e.name == n; }))
                throw ParseError(where() + "no extension named '" + n + "'");
        return names;
    }

private:
    const SpecFile& spec_;
    const TaskSpec& t_;
    const Overrides& ov_;
};

// Refusals and domain errors carry the extension name.
template <class Fn>
auto for_extension(const std::string& name, Fn&& fn) -> decltype(fn()) {
    const std::string pre = "extension '" + name + "': ";
    try {
        return fn();
    } catch (const PrecisionError& e) {
        throw PrecisionError(pre + e.what());
    } catch (const FiltrationError& e) {
        throw FiltrationError(pre + e.what());
    } catch (const DomainError& e) {
        throw DomainError(pre + e.what());
    }
}

Elem parse_at(const Tower& tw, const std::string& text, int level, const std::string& what) {
    try {
        return parse_elem(tw, text, level);
    } catch (const ParseError& e) {
        throw ParseError(what + " '" + text + "', column " + std::to_string(e.position() + 1) + ": " + e.what(),
                         e.position());
    }
}

CyclicExt build(const SpecFile& spec, const ExtSpec& e) {
    return for_extension(e.name, [&] {
        return CyclicExt::classify(e.kind, parse_at(spec.tower(), e.a, -1, "extension datum"), e.ell);
    });
}

json ext_inputs(const ExtSpec& e) {
    return {{"extension", e.name}, {"kind", to_string(e.kind)}, {"a", e.a}, {"ell", e.ell}};
}

int default_M(const CyclicExt& ext) { return std::max(1, ext.conductor()); }

std::vector<TaskResult> do_verify(const SpecFile& spec, const Params& ps) {
    std::vector<TaskResult> out;
    for (const auto& name : ps.extension_names()) {
        const ExtSpec& es = spec.extension(name);
        const CyclicExt ext = build(spec, es);
        const int M = ps.M(default_M(ext));
        const int samples = ps.samples(20);
        const std::uint64_t seed = ps.seed();
        const IsoReport r = for_extension(name, [&] { return verify_iso(ext, samples, M, seed); });
        json in = ext_inputs(es);
        in["M"] = M;
        in["samples"] = samples;
        in["seed"] = seed;
        json j = {{"task", "verify"},
                  {"inputs", in},
                  {"extension", r.ext},
                  {"ramification", r.ramification},
                  {"ell", r.ell},
                  {"break", r.break_index},
                  {"conductor", ext.conductor()},
                  {"M", r.M},
                  {"index", r.index_upper.bound},
                  {"index_certificate", {{"kind", r.index_upper.kind}, {"detail", r.index_upper.detail}}},
                  {"witness", r.witness},
                  {"witness_pairing", r.witness_pairing.to_string()},
                  {"psi_image_order", r.psi_image_order},
                  {"kernel_samples", r.kernel_samples},
                  {"kernel_passed", r.kernel_passed},
                  {"kernel_failures", r.kernel_failures},
                  {"verified", r.verified},
                  {"verdict", r.verdict}};
        std::ostringstream line;
        line << "verify " << name << ": " << r.ramification << ", break " << r.break_index << ", M " << r.M
             << ", index <= " << r.index_upper.bound << " (" << r.index_upper.kind << "), witness " << r.witness
             << " -> " << r.witness_pairing.to_string() << ", kernel " << r.kernel_passed << "/"
             << r.kernel_samples << ": " << r.verdict;
        out.push_back({j, line.str(), r.verified});
    }
    return out;
}

std::vector<TaskResult> do_pair(const SpecFile& spec, const Params& ps) {
    const std::string name = ps.required("extension");
    const std::string symbol = ps.required("symbol");
    const ExtSpec& es = spec.extension(name);
    const Tower& tw = spec.tower();
    // the class of the datum itself, so a trivial character pairs to 0
    const CohClass chi = for_extension(name, [&] {
        return make_class(parse_at(tw, es.a, tw.d(), "extension datum"), {}, es.ell);
    });
    std::vector<std::string> parts;
    if (!symbol.empty() && symbol.front() == '{')
        parts = split_symbol(symbol);
    else
        parts = {symbol};
    std::vector<Elem> entries;
    for (const auto& s : parts) {
        Elem x = parse_at(tw, s, tw.d(), "symbol entry");
        if (x.is_exact_zero()) throw DomainError("symbol entry '" + s + "' is zero");
        entries.push_back(x);
    }
    const int M = ps.M(std::max(1, for_extension(name, [&] { return conductor(chi); })));
    const KClass xi = KClass::symbol(entries, es.ell);
    const InvValue v = for_extension(name, [&] { return cup_pair(chi, xi, M); });
    json in = ext_inputs(es);
    in["symbol"] = symbol;
    in["M"] = M;
    json j = {{"task", "pair"},
              {"inputs", in},
              {"symbol", symbol_text(entries)},
              {"M", M},
              {"value", v.to_string()},
              {"psi", GaloisElem{v.num, es.ell}.to_string()}};
    return {{j, "pair " + name + " " + symbol_text(entries) + ": " + v.to_string() + " (M = " + std::to_string(M) + ")",
             true}};
}

std::vector<TaskResult> do_inv(const SpecFile& spec, const Params& ps) {
    const Tower& tw = spec.tower();
    const std::string text = ps.required("class");
    const int ell = ps.ell(tw.p());
    std::vector<Elem> entries;
    std::string_view rest = text;
    for (;;) {
        const auto k = rest.find("(x)");
        const std::string part = trim(rest.substr(0, k));
        if (part.empty()) throw ParseError("empty factor in class '" + text + "'");
        entries.push_back(parse_at(tw, part, tw.d(), "class factor"));
        if (k == std::string_view::npos) break;
        rest = rest.substr(k + 3);
    }
    if (static_cast<int>(entries.size()) != tw.d() + 1)
        throw DomainError("inv needs a class of degree " + std::to_string(tw.d() + 1) + ", got " +
                          std::to_string(entries.size()) + " factors");
    const Elem w = entries.front();
    entries.erase(entries.begin());
    const CohClass xi = make_class(w, entries, ell);
    const InvValue v = inv(xi);
    json j = {{"task", "inv"}, {"inputs", {{"class", text}, {"ell", ell}}}, {"class", xi.to_string()},
              {"value", v.to_string()}};
    return {{j, "inv " + text + ": " + v.to_string(), true}};
}

std::vector<TaskResult> do_classify(const SpecFile& spec, const Params& ps) {
    std::vector<TaskResult> out;
    for (const auto& name : ps.extension_names()) {
        const ExtSpec& es = spec.extension(name);
        const CyclicExt ext = build(spec, es);
        json j = for_extension(name, [&] {
            const ResidueData rd = ext.residue_data();
            const auto b = ext.b();
            return json{{"task", "classify"},
                        {"inputs", ext_inputs(es)},
                        {"extension", ext.describe()},
                        {"a_reduced", ext.a().to_string()},
                        {"ramification", to_string(ext.ramification())},
                        {"e", ext.e()},
                        {"f", ext.f()},
                        {"break", ext.break_index()},
                        {"conductor", ext.conductor()},
                        {"pi_L", rd.pi_L.to_string()},
                        {"residue_field", rd.field},
                        {"b", b ? json(b->to_string()) : json(nullptr)}};
        });
        std::ostringstream line;
        line << "classify " << name << ": " << j["ramification"].get<std::string>() << ", e " << ext.e() << ", f "
             << ext.f() << ", break " << ext.break_index() << ", conductor " << ext.conductor() << ", reduced a "
             << j["a_reduced"].get<std::string>();
        out.push_back({j, line.str(), true});
    }
    return out;
}

Elem sample_elem(Rng& rng, const Tower& tw, int level) {
    return level == 1 ? rng.nonzero_poly(tw, 1, -2, 5) : rng.nonzero_poly(tw, level, -1, 3);
}

std::vector<TaskResult> do_identity(const SpecFile& spec, const Params& ps) {
    const Tower& tw = spec.tower();
    if (tw.d() != 2) throw DomainError("the identity check needs a two-dimensional field");
    const int level = ps.integer("field_level", 2);
    if (level < 1 || level > 2) throw DomainError("field_level must be 1 or 2");
    std::vector<std::string> names;
    if (ps.has("probes")) {
        names = split_list(ps.str("probes"));
    } else {
        for (const auto& e : spec.extensions)
            if (e.kind == ExtKind::ArtinSchreier) names.push_back(e.name);
    }
    if (names.empty()) throw DomainError("the identity check needs at least one Artin-Schreier probe");
    std::vector<CyclicExt> probes;
    int M0 = 1;
    for (const auto& n : names) {
        probes.push_back(build(spec, spec.extension(n)));
        M0 = std::max(M0, probes.back().conductor());
    }
    const int M = ps.M(M0);
    const int samples = ps.samples(100);
    const std::uint64_t seed = ps.seed();
    Rng rng(seed);
    int checked = 0, vanish = 0, equal = 0, unresolved = 0, different = 0, skipped = 0;
    std::vector<std::string> failures;
    const Elem one = Elem::one(tw, level);
    while (checked < samples) {
        const Elem a = sample_elem(rng, tw, level), b = sample_elem(rng, tw, level);
        if ((a - one).is_exact_zero() || (b - one).is_exact_zero() || (a * b - one).is_exact_zero()) {
            ++skipped;
            continue;
        }
        const IdentityReport r = symbol_identity_check(a, b, tw.p(), probes, M);
        ++checked;
        vanish += r.pairings_vanish;
        switch (r.normal_forms) {
            case Comparison::Equal: ++equal; break;
            case Comparison::Unresolved: ++unresolved; break;
            case Comparison::Different: ++different; break;
        }
        if (!r.pairings_vanish || r.normal_forms == Comparison::Different)
            failures.push_back("alpha = " + a.to_string() + ", beta = " + b.to_string());
    }
    const bool ok = vanish == checked && different == 0;
    json j = {{"task", "identity"},
              {"inputs", {{"field_level", level}, {"probes", names}, {"M", M}, {"samples", samples}, {"seed", seed}}},
              {"field", tw.describe(level)},
              {"samples", checked},
              {"skipped", skipped},
              {"pairings_vanish", vanish},
              {"normal_forms", {{"equal", equal}, {"unresolved", unresolved}, {"different", different}}},
              {"failures", failures},
              {"passed", ok}};
    std::ostringstream line;
    line << "identity over " << tw.describe(level) << ": " << vanish << "/" << checked << " pairings vanish, normal forms "
         << equal << " equal, " << unresolved << " unresolved, " << different << " different: "
         << (ok ? "passed" : "FAILED");
    return {{j, line.str(), ok}};
}

std::vector<TaskResult> do_divisibility(const SpecFile& spec, const Params& ps) {
    const Tower& tw = spec.tower();
    const int level = ps.integer("field_level", 1);
    if (level < 1 || level > tw.d()) throw DomainError("field_level out of range");
    const int samples = ps.samples(100);
    const std::uint64_t seed = ps.seed();
    const int M = ps.M(-1);
    const DivisibilityReport r = p_divisibility_check(tw, level, samples, seed, M);
    const bool ok = r.nonzero == 0;
    json in = {{"field_level", level}, {"samples", samples}, {"seed", seed}};
    if (M >= 0) in["M"] = M;
    json j = {{"task", "divisibility"}, {"inputs", in},           {"field", tw.describe(level)},
              {"samples", r.samples},   {"zero", r.zero},         {"nonzero", r.nonzero},
              {"inconclusive", r.inconclusive}, {"failures", r.failures}, {"passed", ok}};
    std::ostringstream line;
    line << "divisibility K_2(" << tw.describe(level) << ")/" << tw.p() << ": " << r.zero << " zero, " << r.nonzero
         << " nonzero, " << r.inconclusive << " inconclusive of " << r.samples << ": " << (ok ? "passed" : "FAILED");
    return {{j, line.str(), ok}};
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"verify", {"extension", "samples", "M", "seed"}},
        {"pair", {"extension", "symbol", "M"}},
        {"inv", {"class", "ell"}},
        {"classify", {"extension"}},
        {"identity", {"field_level", "probes", "samples", "M", "seed"}},
        {"divisibility", {"field_level", "samples", "M", "seed"}}};
    return keys;
}

std::vector<TaskResult> dispatch(const SpecFile& spec, const TaskSpec& t, const Overrides& ov) {
    const Params ps(spec, t, allowed_keys().at(t.type), ov);
    if (t.type == "verify") return do_verify(spec, ps);
    if (t.type == "pair") return do_pair(spec, ps);
    if (t.type == "inv") return do_inv(spec, ps);
    if (t.type == "classify") return do_classify(spec, ps);
    if (t.type == "identity") return do_identity(spec, ps);
    return do_divisibility(spec, ps);
}

}  // namespace

std::vector<TaskResult> run_tasks(const SpecFile& spec, const std::string& command,
                                  const std::vector<std::string>& positional, const Overrides& ov) {
    std::vector<TaskSpec> tasks;
    if (!positional.empty()) {
        TaskSpec t;
        t.type = command;
        if (command == "verify" || command == "classify") {
            std::string names;
            for (const auto& p : positional) names += (names.empty() ? "" : ",") + p;
            t.params["extension"] = names;
        } else if (command == "pair") {
            if (positional.size() != 2) throw ParseError("pair takes an extension name and a symbol");
            t.params["extension"] = positional[0];
            t.params["symbol"] = positional[1];
        } else if (command == "inv") {
            if (positional.size() != 1) throw ParseError("inv takes one class expression");
            t.params["class"] = positional[0];
        } else {
            throw ParseError(command + " takes no positional arguments");
        }
        tasks.push_back(t);
    } else {
        for (const auto& t : spec.tasks)
            if (t.type == command) tasks.push_back(t);
        if (tasks.empty()) {
            if (command == "pair" || command == "inv")
                throw ParseError("no " + command + " tasks in " + spec.origin + " and no arguments given");
            TaskSpec t;
            t.type = command;
            tasks.push_back(t);
        }
    }
    std::vector<TaskResult> out;
    for (const auto& t : tasks) {
        auto r = dispatch(spec, t, ov);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

json field_json(const SpecFile& spec) {
    const Tower& tw = spec.tower();
    const FieldConfig& c = tw.config();
    json j = {{"p", c.p},
              {"f", c.f},
              {"q", tw.field().order()},
              {"vars", c.vars},
              {"prec", c.prec},
              {"description", tw.describe(tw.d())}};
    j["modulus"] = c.modulus.empty() ? json(nullptr) : json(c.modulus);
    return j;
}

json report_json(const SpecFile& spec, const std::string& command, const std::vector<TaskResult>& results) {
    json rs = json::array();
    for (const auto& r : results) rs.push_back(r.json);
    return {{"tool", kToolName}, {"version", kToolVersion}, {"command", command}, {"field", field_json(spec)},
            {"results", rs}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reciprocity checks for higher local fields F_q((t))((u))", kToolName};
    app.require_subcommand(1);
    std::string spec_path, json_path;
    std::uint64_t seed = 0;
    int level = 0, samples = 0, ell = 0;
    std::vector<std::string> positional;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"verify", "verify the reciprocity isomorphism for each extension"},
        {"pair", "pair an extension character with a symbol: pair EXT SYMBOL"},
        {"inv", "invariant of a top-degree class: inv CLASS"},
        {"classify", "ramification data of each extension"},
        {"identity", "the K_2 symbol identity on random samples"},
        {"divisibility", "p-divisibility of K_2 of a one-dimensional level"}};
    std::map<std::string, std::map<std::string, CLI::Option*>> opts;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        auto& o = opts[name];
        sub->add_option("--spec", spec_path, "spec file")->required();
        o["seed"] = sub->add_option("--seed", seed, "random seed (default 0)");
        o["level"] = sub->add_option("--level", level, "filtration bound M");
        o["samples"] = sub->add_option("--samples", samples, "number of random samples");
        sub->add_option("--json", json_path, "write the JSON report to PATH ('-' for stdout)");
        if (name == "inv") o["ell"] = sub->add_option("--ell", ell, "coefficient prime");
        sub->add_option("args", positional, "extension names, or the pair/inv arguments");
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << kToolName << ": " << e.what() << "\n";
        return kParseFailure;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    Overrides ov;
    if (opts[command]["seed"]->count()) ov.seed = seed;
    if (opts[command]["level"]->count()) ov.level = level;
    if (opts[command]["samples"]->count()) ov.samples = samples;
    if (command == "inv" && opts[command]["ell"]->count()) ov.ell = ell;

    try {
        const SpecFile spec = load_spec(spec_path);
        const std::vector<TaskResult> results = run_tasks(spec, command, positional, ov);
        const json report = report_json(spec, command, results);
        const std::string text = report.dump(2) + "\n";
        if (json_path == "-") {
            out << text;
        } else {
            for (const auto& r : results) out << r.line << "\n";
            if (!json_path.empty()) {
                std::ofstream f(json_path, std::ios::binary);
                if (!f) throw ParseError("cannot write '" + json_path + "'");
                f << text;
            }
        }
        const bool ok = std::all_of(results.begin(), results.end(), [](const TaskResult& r) { return r.ok; });
        return ok ? kOk : kVerificationFailed;
    } catch (const ParseError& e) {
        err << kToolName << ": parse error: " << e.what() << "\n";
        return kParseFailure;
    } catch (const DomainError& e) {
        err << kToolName << ": invalid input: " << e.what() << "\n";
        return kParseFailure;
    } catch (const FiltrationError& e) {
        err << kToolName << ": refused: " << e.what() << "\n";
        return kRefused;
    } catch (const PrecisionError& e) {
        err << kToolName << ": refused: " << e.what() << "\n";
        return kRefused;
    }
}

}  // namespace hlcf::cli
