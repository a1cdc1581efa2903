#include "gwi/cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gwi/detail/format.hpp"
#include "gwi/diagnostics.hpp"
#include "gwi/engine.hpp"
#include "gwi/error.hpp"
#include "gwi/limits.hpp"
#include "gwi/scenario_io.hpp"

#include "json.hpp"

namespace gwi {

namespace {

using detail::fmt17;
using Json = nlohmann::ordered_json;

struct Resolved {
    ScenarioSpec spec;
    std::vector<std::size_t> n_grid;
    std::size_t n = 0;
    std::size_t K = 0;
    std::size_t reps = 0;
    bool reps_given = false;
    std::uint64_t seed = 0;
    std::vector<double> x_grid;
    double tol = 0.0;
};

Resolved resolve(const RunConfig& c, const ScenarioSpec& spec)
{
    Resolved r;
    r.spec = spec;
    r.n = c.n.value_or(spec.run.horizon);
    if (!c.n_grid.empty())
        r.n_grid = c.n_grid;
    else if (c.n)
        r.n_grid = {*c.n};
    else if (!spec.run.n_grid.empty())
        r.n_grid = spec.run.n_grid;
    else
        r.n_grid = {r.n};
    r.K = c.K.value_or(spec.run.truncation);
    if (r.K == 0 && !c.K)
        r.K = default_truncation(regime_classify(spec));
    r.reps_given = c.reps.has_value();
    r.reps = c.reps.value_or(spec.run.reps);
    r.seed = c.seed.value_or(spec.run.seed);
    r.x_grid = !c.x_grid.empty() ? c.x_grid : spec.run.x_grid;
    if (r.x_grid.empty())
        for (int i = 0; i <= 10; ++i)
            r.x_grid.push_back(i / 10.0);
    r.tol = c.tol.value_or(spec.run.tol);
    if (r.K == 0)
        throw InvalidArgument("--K must be at least 1");
    if (r.reps == 0)
        throw InvalidArgument("--reps must be at least 1");
    if (!(r.tol > 0.0))
        throw InvalidArgument("--tol must be positive");
    for (double x : r.x_grid)
        if (!(x >= 0.0 && x <= 1.0))
            throw InvalidArgument("--x-grid values must lie in [0, 1]");
    return r;
}

std::string do_classify(const Resolved& r, Format f)
{
    const auto law = regime_classify(r.spec);
    if (f == Format::csv)
        return describe(law) + "\n";
    Json j;
    j["scenario"] = r.spec.name;
    j["law"] = describe(law);
    return j.dump(2) + "\n";
}

std::string do_propagate(const Resolved& r, Format f)
{
    auto grid = r.n_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const auto states = propagate_grid(r.spec, grid, r.K);
    if (f == Format::csv) {
        std::string s = "n,k,p\n";
        for (const auto& st : states)
            for (std::size_t k = 0; k < st.pmf.size(); ++k)
                s += std::to_string(st.n) + ',' + std::to_string(k) + ',' + fmt17(st.pmf[k]) + '\n';
        return s;
    }
    Json j;
    j["scenario"] = r.spec.name;
    j["truncation"] = r.K;
    auto& rows = j["rows"] = Json::array();
    for (const auto& st : states) {
        Json o;
        o["n"] = st.n;
        o["pmf"] = std::vector<double>(st.pmf.coeffs().begin(), st.pmf.coeffs().end());
        o["deficiency"] = st.pmf.deficiency();
        o["truncated"] = st.truncation_alarm;
        rows.push_back(std::move(o));
    }
    return j.dump(2) + "\n";
}

std::string do_simulate(const Resolved& r, Format f)
{
    const auto res = simulate_detailed(r.spec, r.n, r.reps, r.seed);
    if (f == Format::csv) {
        std::string s = "k,count,frequency\n";
        for (std::size_t k = 0; k < res.counts.size(); ++k)
            s += std::to_string(k) + ',' + std::to_string(res.counts[k]) + ',' + fmt17(res.empirical[k]) + '\n';
        return s;
    }
    Json j;
    j["scenario"] = r.spec.name;
    j["n"] = r.n;
    j["reps"] = r.reps;
    j["seed"] = r.seed;
    j["counts"] = res.counts;
    return j.dump(2) + "\n";
}

std::string do_report(const Resolved& r, Format f)
{
    ReportOptions opt;
    opt.K = r.K;
    opt.reps = r.reps_given ? r.reps : 0;
    opt.seed = r.seed;
    opt.x_grid = r.x_grid;
    opt.tol = r.tol;
    const auto rep = report(r.spec, r.n_grid, opt);
    return f == Format::csv ? report_csv(rep) : report_json(rep);
}

std::string do_limits(const Resolved& r, Format f)
{
    const auto law = regime_classify(r.spec);
    if (const auto* u = std::get_if<Unclassified>(&law))
        throw WrongRegime("no limit law: " + u->reason);
    std::vector<double> pgf;
    for (double x : r.x_grid)
        pgf.push_back(limit_pgf(law, r.spec, x, r.tol));
    const auto m = limit_moments(law, r.spec, r.tol);
    std::optional<Pmf> pmf;
    if (!std::holds_alternative<ProductLaw>(law))
        pmf = limit_pmf(law, r.K);

    if (f == Format::csv) {
        std::string s = "quantity,arg,value\n";
        s += "m1,," + fmt17(m.m1) + '\n';
        s += "m2,," + fmt17(m.m2) + '\n';
        for (std::size_t i = 0; i < pgf.size(); ++i)
            s += "pgf," + fmt17(r.x_grid[i]) + ',' + fmt17(pgf[i]) + '\n';
        if (pmf)
            for (std::size_t k = 0; k < pmf->size(); ++k)
                s += "pmf," + std::to_string(k) + ',' + fmt17((*pmf)[k]) + '\n';
        return s;
    }
    Json j;
    j["scenario"] = r.spec.name;
    j["law"] = describe(law);
    j["m1"] = m.m1;
    j["m2"] = m.m2;
    j["x_grid"] = r.x_grid;
    j["pgf"] = pgf;
    if (pmf)
        j["pmf"] = std::vector<double>(pmf->coeffs().begin(), pmf->coeffs().end());
    return j.dump(2) + "\n";
}

} // namespace

int exit_code_for_current_exception(std::ostream& err)
{
    try {
        throw;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return exit_code::parse;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return exit_code::validation;
    } catch (const InvalidArgument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return exit_code::validation;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return exit_code::numeric;
    } catch (const WrongRegime& e) {
        err << "wrong regime: " << e.what() << '\n';
        return exit_code::wrong_regime;
    } catch (const UnsupportedFamily& e) {
        err << "wrong regime: " << e.what() << '\n';
        return exit_code::wrong_regime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::failure;
    }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        if (config.scenario.empty())
            throw InvalidArgument("--scenario is required");
        const ScenarioSpec spec = load_scenario(config.scenario);
        for (const auto& w : validate(spec))
            err << "warning: " << w << '\n';
        const Resolved r = resolve(config, spec);
        std::string text;
        switch (config.command) {
        case Command::classify:
            text = do_classify(r, config.format);
            break;
        case Command::propagate:
            text = do_propagate(r, config.format);
            break;
        case Command::simulate:
            text = do_simulate(r, config.format);
            break;
        case Command::report:
            text = do_report(r, config.format);
            break;
        case Command::limits:
            text = do_limits(r, config.format);
            break;
        }
        if (config.out.empty()) {
            out << text;
        } else {
            std::ofstream f(config.out, std::ios::binary);
            if (!f)
                throw Error("cannot open output file " + config.out);
            f << text;
            if (!f)
                throw Error("failed writing " + config.out);
        }
        return exit_code::ok;
    } catch (...) {
        return exit_code_for_current_exception(err);
    }
}

} // namespace gwi
