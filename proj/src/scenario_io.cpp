#include "gwi/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "gwi/detail/format.hpp"
#include "gwi/error.hpp"

namespace gwi {

namespace {

using detail::fmt17;

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

// Raised by the value parsers; rethrown with line and key context.
struct BadValue {
    std::string what;
};

double to_double(std::string_view s)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw BadValue{"expected a finite number, got '" + std::string(s) + "'"};
    return v;
}

template <class T>
T to_integer(std::string_view s)
{
    T v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw BadValue{"expected a nonnegative integer, got '" + std::string(s) + "'"};
    return v;
}

bool to_bool(std::string_view s)
{
    if (s == "true")
        return true;
    if (s == "false")
        return false;
    throw BadValue{"expected true or false, got '" + std::string(s) + "'"};
}

std::vector<double> to_doubles(std::string_view s)
{
    std::vector<double> out;
    if (s.empty())
        return out;
    for (auto part : split(s, ','))
        out.push_back(to_double(part));
    return out;
}

std::vector<std::size_t> to_sizes(std::string_view s)
{
    std::vector<std::size_t> out;
    if (s.empty())
        return out;
    for (auto part : split(s, ','))
        out.push_back(to_integer<std::size_t>(part));
    return out;
}

std::vector<SequenceRule::Term> to_terms(std::string_view s)
{
    std::vector<SequenceRule::Term> out;
    for (auto part : split(s, ',')) {
        const auto fields = split(part, ':');
        if (fields.size() != 2)
            throw BadValue{"expected coef:exponent, got '" + std::string(part) + "'"};
        out.push_back({to_double(fields[0]), to_double(fields[1])});
    }
    return out;
}

std::vector<std::vector<double>> to_table(std::string_view s)
{
    std::vector<std::vector<double>> out;
    for (auto row : split(s, ';'))
        out.push_back(to_doubles(row));
    return out;
}

template <class E>
E to_enum(std::string_view s, std::initializer_list<std::pair<const char*, E>> names)
{
    std::string allowed;
    for (const auto& [name, value] : names) {
        if (s == name)
            return value;
        allowed += allowed.empty() ? name : std::string("|") + name;
    }
    throw BadValue{"expected one of " + allowed + ", got '" + std::string(s) + "'"};
}

SequenceRule::Kind to_rule_kind(std::string_view s)
{
    using K = SequenceRule::Kind;
    return to_enum<K>(s, {{"constant", K::constant}, {"proportional", K::proportional}, {"power_sum", K::power_sum}});
}

const char* name_of(SequenceRule::Kind k)
{
    switch (k) {
    case SequenceRule::Kind::constant:
        return "constant";
    case SequenceRule::Kind::proportional:
        return "proportional";
    case SequenceRule::Kind::power_sum:
        return "power_sum";
    }
    return "";
}

const char* name_of(OffspringKind k)
{
    switch (k) {
    case OffspringKind::bernoulli:
        return "bernoulli";
    case OffspringKind::quadratic:
        return "quadratic";
    case OffspringKind::linear_fractional:
        return "linear_fractional";
    case OffspringKind::custom:
        return "custom";
    }
    return "";
}

const char* name_of(ImmigrationKind k)
{
    switch (k) {
    case ImmigrationKind::bernoulli:
        return "bernoulli";
    case ImmigrationKind::poisson:
        return "poisson";
    case ImmigrationKind::custom:
        return "custom";
    }
    return "";
}

const char* name_of(LambdaRule::Kind k)
{
    switch (k) {
    case LambdaRule::Kind::none:
        return "none";
    case LambdaRule::Kind::list:
        return "list";
    case LambdaRule::Kind::log2:
        return "log2";
    case LambdaRule::Kind::negative_binomial:
        return "negative_binomial";
    case LambdaRule::Kind::geometric:
        return "geometric";
    }
    return "";
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + fmt17(v[i]);
    return s;
}

std::string join(const std::vector<std::size_t>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

using Setter = std::function<void(ScenarioSpec&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> m;
        m["name"] = [](ScenarioSpec& s, std::string_view v) { s.name = std::string(v); };
        m["offspring.family"] = [](ScenarioSpec& s, std::string_view v) {
            s.offspring.kind = to_enum<OffspringKind>(v, {{"bernoulli", OffspringKind::bernoulli},
                                                          {"quadratic", OffspringKind::quadratic},
                                                          {"linear_fractional", OffspringKind::linear_fractional},
                                                          {"custom", OffspringKind::custom}});
        };
        m["offspring.rho.c"] = [](ScenarioSpec& s, std::string_view v) { s.offspring.rho.c = to_double(v); };
        m["offspring.rho.gamma"] = [](ScenarioSpec& s, std::string_view v) { s.offspring.rho.gamma = to_double(v); };
        m["offspring.rho.n0"] = [](ScenarioSpec& s, std::string_view v) { s.offspring.rho.n0 = to_double(v); };
        m["offspring.nu"] = [](ScenarioSpec& s, std::string_view v) { s.offspring.nu = to_double(v); };
        m["offspring.table"] = [](ScenarioSpec& s, std::string_view v) { s.offspring.table = to_table(v); };
        m["immigration.family"] = [](ScenarioSpec& s, std::string_view v) {
            s.immigration.kind = to_enum<ImmigrationKind>(v, {{"bernoulli", ImmigrationKind::bernoulli},
                                                              {"poisson", ImmigrationKind::poisson},
                                                              {"custom", ImmigrationKind::custom}});
        };
        for (const char* prefix : {"immigration.m1.", "immigration.weight."}) {
            const std::string p = prefix;
            m[p + "rule"] = [](ScenarioSpec& s, std::string_view v) { s.immigration.rate.kind = to_rule_kind(v); };
            m[p + "a"] = [](ScenarioSpec& s, std::string_view v) { s.immigration.rate.a = to_double(v); };
            m[p + "terms"] = [](ScenarioSpec& s, std::string_view v) { s.immigration.rate.terms = to_terms(v); };
        }
        m["immigration.base"] = [](ScenarioSpec& s, std::string_view v) { s.immigration.base = to_doubles(v); };
        m["limits.lambda"] = [](ScenarioSpec& s, std::string_view v) { s.declared.lambda = to_double(v); };
        m["limits.nu"] = [](ScenarioSpec& s, std::string_view v) { s.declared.nu = to_double(v); };
        m["limits.divergent"] = [](ScenarioSpec& s, std::string_view v) { s.declared.divergent = to_bool(v); };
        m["limits.lambda_l.rule"] = [](ScenarioSpec& s, std::string_view v) {
            using K = LambdaRule::Kind;
            s.declared.lambda_l.kind = to_enum<K>(v, {{"none", K::none},
                                                      {"list", K::list},
                                                      {"log2", K::log2},
                                                      {"negative_binomial", K::negative_binomial},
                                                      {"geometric", K::geometric}});
        };
        m["limits.lambda_l.values"] = [](ScenarioSpec& s, std::string_view v) {
            s.declared.lambda_l.values = to_doubles(v);
        };
        m["limits.lambda_l.lambda"] = [](ScenarioSpec& s, std::string_view v) {
            s.declared.lambda_l.lambda = to_double(v);
        };
        m["limits.lambda_l.nu"] = [](ScenarioSpec& s, std::string_view v) { s.declared.lambda_l.nu = to_double(v); };
        m["limits.lambda_l.c"] = [](ScenarioSpec& s, std::string_view v) { s.declared.lambda_l.c = to_double(v); };
        m["run.n"] = [](ScenarioSpec& s, std::string_view v) { s.run.horizon = to_integer<std::size_t>(v); };
        m["run.K"] = [](ScenarioSpec& s, std::string_view v) { s.run.truncation = to_integer<std::size_t>(v); };
        m["run.reps"] = [](ScenarioSpec& s, std::string_view v) { s.run.reps = to_integer<std::size_t>(v); };
        m["run.seed"] = [](ScenarioSpec& s, std::string_view v) { s.run.seed = to_integer<std::uint64_t>(v); };
        m["run.n_grid"] = [](ScenarioSpec& s, std::string_view v) { s.run.n_grid = to_sizes(v); };
        m["run.x_grid"] = [](ScenarioSpec& s, std::string_view v) { s.run.x_grid = to_doubles(v); };
        m["run.tol"] = [](ScenarioSpec& s, std::string_view v) { s.run.tol = to_double(v); };
        return m;
    }();
    return table;
}

} // namespace

ScenarioSpec parse_scenario(std::string_view text, std::string_view source)
{
    ScenarioSpec spec;
    std::set<std::string, std::less<>> seen;
    bool m1_keys = false;
    bool weight_keys = false;
    std::size_t line_no = 0;
    auto fail = [&](std::string_view key, const std::string& what) {
        std::string msg = std::string(source) + ":" + std::to_string(line_no) + ": ";
        if (!key.empty())
            msg += std::string(key) + ": ";
        throw ParseError(msg + what);
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            fail({}, "expected 'key = value', got '" + std::string(line) + "'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            fail(key, "unknown key");
        if (!seen.insert(std::string(key)).second)
            fail(key, "duplicate key");
        m1_keys = m1_keys || key.starts_with("immigration.m1.");
        weight_keys = weight_keys || key.starts_with("immigration.weight.");
        if (m1_keys && weight_keys)
            fail(key, "immigration.m1.* and immigration.weight.* are mutually exclusive");
        try {
            it->second(spec, value);
        } catch (const BadValue& e) {
            fail(key, e.what);
        }
    }
    line_no = 0;
    if (weight_keys && spec.immigration.kind != ImmigrationKind::custom)
        fail("immigration.weight", "weights apply to custom immigration only; use immigration.m1.*");
    if (m1_keys && spec.immigration.kind == ImmigrationKind::custom)
        fail("immigration.m1", "custom immigration is driven by immigration.weight.*");
    validate(spec);
    return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ParseError(path.string() + ": cannot open scenario file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str(), path.string());
}

std::string serialize_scenario(const ScenarioSpec& spec)
{
    std::string out;
    auto put = [&](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };

    put("name", spec.name);
    const auto& off = spec.offspring;
    put("offspring.family", name_of(off.kind));
    put("offspring.rho.c", fmt17(off.rho.c));
    put("offspring.rho.gamma", fmt17(off.rho.gamma));
    put("offspring.rho.n0", fmt17(off.rho.n0));
    put("offspring.nu", fmt17(off.nu));
    if (!off.table.empty()) {
        std::string t;
        for (std::size_t i = 0; i < off.table.size(); ++i)
            t += (i ? ";" : "") + join(off.table[i]);
        put("offspring.table", t);
    }

    const auto& imm = spec.immigration;
    put("immigration.family", name_of(imm.kind));
    const std::string prefix = imm.kind == ImmigrationKind::custom ? "immigration.weight." : "immigration.m1.";
    put(prefix + "rule", name_of(imm.rate.kind));
    put(prefix + "a", fmt17(imm.rate.a));
    if (!imm.rate.terms.empty()) {
        std::string t;
        for (std::size_t i = 0; i < imm.rate.terms.size(); ++i)
            t += (i ? "," : "") + fmt17(imm.rate.terms[i].coef) + ":" + fmt17(imm.rate.terms[i].exponent);
        put(prefix + "terms", t);
    }
    if (!imm.base.empty())
        put("immigration.base", join(imm.base));

    const auto& d = spec.declared;
    put("limits.lambda", fmt17(d.lambda));
    put("limits.nu", fmt17(d.nu));
    put("limits.divergent", d.divergent ? "true" : "false");
    put("limits.lambda_l.rule", name_of(d.lambda_l.kind));
    if (!d.lambda_l.values.empty())
        put("limits.lambda_l.values", join(d.lambda_l.values));
    if (d.lambda_l.lambda != 0.0)
        put("limits.lambda_l.lambda", fmt17(d.lambda_l.lambda));
    if (d.lambda_l.nu != 0.0)
        put("limits.lambda_l.nu", fmt17(d.lambda_l.nu));
    if (d.lambda_l.c != 0.0)
        put("limits.lambda_l.c", fmt17(d.lambda_l.c));

    const auto& r = spec.run;
    put("run.n", std::to_string(r.horizon));
    put("run.K", std::to_string(r.truncation));
    put("run.reps", std::to_string(r.reps));
    put("run.seed", std::to_string(r.seed));
    if (!r.n_grid.empty())
        put("run.n_grid", join(r.n_grid));
    if (!r.x_grid.empty())
        put("run.x_grid", join(r.x_grid));
    put("run.tol", fmt17(r.tol));
    return out;
}

} // namespace gwi
