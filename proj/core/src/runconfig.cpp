/**
 * @file runconfig.cpp
 * @brief INI-style configuration parsing and compatibility checks.
 */

#include "bsde/runconfig.hpp"
#include "bsde/errors.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace bsde::cli {

namespace {

struct RawValue {
    std::string text;
    int line = 0;
    mutable bool used = false;
};

using Section = std::map<std::string, RawValue>;
using Sections = std::map<std::string, Section>;

[[noreturn]] void fail_line(int line, const std::string& what) {
    std::ostringstream os;
    os << "config line " << line << ": " << what;
    throw ConfigError(os.str());
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

/// Strip a trailing comment starting at '#' or ';'.
std::string strip_comment(const std::string& s) {
    std::size_t pos = s.find_first_of("#;");
    return pos == std::string::npos ? s : s.substr(0, pos);
}

Sections parse_raw(const std::string& text) {
    static const std::set<std::string> kKnownSections = {"problem", "scheme", "output", "flags"};
    Sections sections;
    std::string current;
    std::istringstream in(text);
    std::string raw_line;
    int line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        std::string line = trim(strip_comment(raw_line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail_line(line_no, "unterminated section header");
            current = trim(line.substr(1, line.size() - 2));
            if (kKnownSections.count(current) == 0)
                fail_line(line_no, "unknown section [" + current + "]");
            sections[current];  // record even if empty
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail_line(line_no, "expected key = value");
        if (current.empty()) fail_line(line_no, "key outside of a [section]");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail_line(line_no, "empty key");
        if (value.empty()) fail_line(line_no, "empty value for key \"" + key + "\"");
        auto [it, inserted] = sections[current].emplace(key, RawValue{value, line_no});
        if (!inserted)
            fail_line(line_no, "duplicate key \"" + key + "\" (first on line " +
                                   std::to_string(it->second.line) + ")");
    }
    return sections;
}

/// Access helpers: mark keys as consumed so leftovers can be reported.
const RawValue* find(const Sections& sections, const std::string& section,
                     const std::string& key) {
    auto sit = sections.find(section);
    if (sit == sections.end()) return nullptr;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return nullptr;
    kit->second.used = true;
    return &kit->second;
}

double parse_double(const RawValue& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double out = std::stod(v.text, &pos);
        if (pos != v.text.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        fail_line(v.line, "key \"" + key + "\": not a number: \"" + v.text + "\"");
    }
}

int parse_int(const RawValue& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        int out = std::stoi(v.text, &pos);
        if (pos != v.text.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        fail_line(v.line, "key \"" + key + "\": not an integer: \"" + v.text + "\"");
    }
}

std::uint64_t parse_u64(const RawValue& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        unsigned long long out = std::stoull(v.text, &pos);
        if (pos != v.text.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        fail_line(v.line, "key \"" + key + "\": not an unsigned integer: \"" + v.text + "\"");
    }
}

bool parse_bool(const RawValue& v, const std::string& key) {
    if (v.text == "true" || v.text == "1" || v.text == "on" || v.text == "yes") return true;
    if (v.text == "false" || v.text == "0" || v.text == "off" || v.text == "no") return false;
    fail_line(v.line, "key \"" + key + "\": expected true/false: \"" + v.text + "\"");
}

expr::Expression parse_expr_value(const RawValue& v, const std::string& key,
                                  const std::string& vars) {
    try {
        return expr::parse(v.text, expr::VarSet::of(vars));
    } catch (const Error& e) {
        fail_line(v.line, "key \"" + key + "\": " + e.what());
    }
}

/// Build one driver from a key prefix ("", "g1_" or "g2_").
problem::Generator read_generator(const Sections& raw, const std::string& prefix, double T) {
    const RawValue* preset = find(raw, "problem", prefix + "preset");
    const RawValue* expression = find(raw, "problem", prefix + "generator");
    if (preset != nullptr && expression != nullptr)
        fail_line(expression->line,
                  "give either \"" + prefix + "preset\" or \"" + prefix + "generator\", not both");
    if (preset == nullptr && expression == nullptr)
        throw ConfigError("missing driver: set \"" + prefix + "preset\" or \"" + prefix +
                          "generator\" in [problem]");

    if (preset != nullptr) {
        auto number = [&](const char* name, double fallback) {
            const RawValue* v = find(raw, "problem", prefix + name);
            return v != nullptr ? parse_double(*v, prefix + name) : fallback;
        };
        if (preset->text == "linear")
            return problem::Generator::linear(number("b", 0.0), number("c", 0.0),
                                              number("r", 0.0));
        if (preset->text == "two-rates")
            return problem::Generator::two_rates(number("rate_low", 0.0),
                                                 number("rate_high", 0.0),
                                                 number("sigma_theta", 0.0));
        if (preset->text == "quadratic-z") return problem::Generator::quadratic_z();
        fail_line(preset->line, "unknown preset \"" + preset->text +
                                    "\" (expected linear, two-rates or quadratic-z)");
    }

    expr::Expression body = parse_expr_value(*expression, prefix + "generator", "tyz");
    const RawValue* mu = find(raw, "problem", prefix + "mu");
    if (mu != nullptr)
        return problem::Generator::from_expression(std::move(body), parse_double(*mu, "mu"));
    // No mu given: estimate it over t in [0, T], y and z in [-10, 10].
    problem::Generator probe =
        problem::Generator::from_expression(body, 1.0, problem::MuSource::estimated);
    problem::SampleBox box;
    box.t_hi = T;
    double estimate = problem::lipschitz_estimate(probe, box);
    return probe.with_mu(std::max(estimate, 1e-12), problem::MuSource::estimated);
}

bool has_prefixed_keys(const Sections& raw, const std::string& prefix) {
    auto sit = raw.find("problem");
    if (sit == raw.end()) return false;
    for (const auto& [key, value] : sit->second)
        if (key.rfind(prefix, 0) == 0) return true;
    return false;
}

void report_unused(const Sections& raw) {
    for (const auto& [section, keys] : raw)
        for (const auto& [key, value] : keys)
            if (!value.used)
                fail_line(value.line, "unknown key \"" + key + "\" in section [" + section + "]");
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    Sections raw = parse_raw(text);
    RunConfig config;

    // --- [problem] ---
    const RawValue* T = find(raw, "problem", "T");
    config.problem.T = T != nullptr ? parse_double(*T, "T") : 1.0;
    if (!(config.problem.T > 0.0)) throw ConfigError("T must be positive");

    const bool split = has_prefixed_keys(raw, "g1_") || has_prefixed_keys(raw, "g2_");
    if (split) {
        problem::Generator g1 = read_generator(raw, "g1_", config.problem.T);
        problem::Generator g2 = read_generator(raw, "g2_", config.problem.T);
        config.problem.generator = problem::Generator::split(std::move(g1), std::move(g2));
    } else {
        config.problem.generator = read_generator(raw, "", config.problem.T);
    }

    const RawValue* terminal = find(raw, "problem", "terminal");
    if (terminal == nullptr) throw ConfigError("missing key \"terminal\" in [problem]");
    config.problem.terminal = parse_expr_value(*terminal, "terminal", "x");

    if (const RawValue* barrier = find(raw, "problem", "barrier"))
        config.problem.barrier = problem::Barrier{parse_expr_value(*barrier, "barrier", "tx")};

    const RawValue* ca = find(raw, "problem", "constraint_a");
    const RawValue* cb = find(raw, "problem", "constraint_b");
    const RawValue* phi = find(raw, "problem", "phi");
    if ((ca == nullptr) != (cb == nullptr))
        throw ConfigError("z-interval constraint needs both constraint_a and constraint_b");
    if (ca != nullptr && phi != nullptr)
        throw ConfigError("give either a z-interval constraint or phi, not both");
    if (ca != nullptr)
        config.problem.constraint = problem::ZInterval(parse_double(*ca, "constraint_a"),
                                                       parse_double(*cb, "constraint_b"));
    else if (phi != nullptr)
        config.problem.constraint =
            problem::PhiReflection{parse_expr_value(*phi, "phi", "z")};

    // --- [scheme] ---
    const RawValue* scheme = find(raw, "scheme", "scheme");
    if (scheme == nullptr) throw ConfigError("missing key \"scheme\" in [scheme]");
    config.scheme_id = scheme->text;
    if (!problem::scheme_known(config.scheme_id))
        fail_line(scheme->line, "unknown scheme \"" + config.scheme_id + "\"");

    const RawValue* n = find(raw, "scheme", "n");
    if (n == nullptr) throw ConfigError("missing key \"n\" in [scheme]");
    config.n = parse_int(*n, "n");
    if (config.n < 1) fail_line(n->line, "n must be at least 1");

    if (const RawValue* p = find(raw, "scheme", "p")) {
        config.problem.p = parse_double(*p, "p");
        if (!(*config.problem.p > 0.0)) fail_line(p->line, "p must be positive");
    }

    // --- [output] ---
    if (const RawValue* v = find(raw, "output", "surface_csv")) config.output.surface_csv = v->text;
    if (const RawValue* v = find(raw, "output", "summary_json"))
        config.output.summary_json = v->text;
    if (const RawValue* v = find(raw, "output", "gnuplot")) config.output.gnuplot = v->text;
    if (const RawValue* v = find(raw, "output", "sample_paths")) {
        config.output.sample_paths = parse_int(*v, "sample_paths");
        if (config.output.sample_paths < 0) fail_line(v->line, "sample_paths must be >= 0");
    }
    if (const RawValue* v = find(raw, "output", "seed")) config.output.seed = parse_u64(*v, "seed");

    // --- [flags] ---
    if (const RawValue* v = find(raw, "flags", "strict")) config.strict = parse_bool(*v, "strict");

    report_unused(raw);
    check_compatibility(config);
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void check_compatibility(const RunConfig& config) {
    const std::string& id = config.scheme_id;
    const problem::ProblemSpec& spec = config.problem;
    if (!problem::scheme_known(id)) throw ConfigError("unknown scheme \"" + id + "\"");

    if (spec.barrier && spec.constraint)
        throw ConfigError("a problem may have a barrier or a constraint, not both");

    if (problem::scheme_uses_barrier(id) && !spec.barrier)
        throw ConfigError("scheme \"" + id + "\" requires a barrier");
    if (!problem::scheme_uses_barrier(id) && spec.barrier)
        throw ConfigError("scheme \"" + id + "\" does not use the configured barrier");

    if (problem::scheme_uses_z_constraint(id) &&
        (!spec.constraint || !std::holds_alternative<problem::ZInterval>(*spec.constraint)))
        throw ConfigError("scheme \"" + id + "\" requires the z-interval constraint");
    if (problem::scheme_uses_phi_constraint(id) &&
        (!spec.constraint || !std::holds_alternative<problem::PhiReflection>(*spec.constraint)))
        throw ConfigError("scheme \"" + id + "\" requires the phi constraint");
    if (!problem::scheme_uses_z_constraint(id) && !problem::scheme_uses_phi_constraint(id) &&
        spec.constraint)
        throw ConfigError("scheme \"" + id + "\" does not use the configured constraint");

    if (problem::scheme_uses_p(id) && !spec.p)
        throw ConfigError("scheme \"" + id + "\" requires the penalization parameter p");
    if (!problem::scheme_uses_p(id) && spec.p)
        throw ConfigError("scheme \"" + id + "\" does not use the configured p");

    if (id == "split" && !spec.generator.is_split())
        throw ConfigError("the split scheme requires a split driver (g1_*/g2_* keys)");
    if (id != "split" && spec.generator.is_split())
        throw ConfigError("a split driver requires the split scheme");
}

} // namespace bsde::cli
