// Command-line front end: flat frames, verification suites, structure-matrix
// recovery, the explicit projective-space solution, and the hypergeometric
// cross-check.  Reports go to stdout (or --output) as JSON or CSV, with the
// effective configuration always embedded in the report header.
//
// Exit codes: 0 success, 1 verification failure, 2 input error,
//             3 convergence failure.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dubrovin/dubrovin.hpp"

namespace {

using namespace dubrovin;

constexpr int kExitVerification = 1;
constexpr int kExitInput = 2;
constexpr int kExitConvergence = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// complex scalars on the command line: "1.5", "-2i", "0.3+0.2i", "1-i", "i"
Complex parse_complex_arg(const std::string& s0) {
    std::string s;
    for (char c : s0)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw InputError("empty complex literal");

    auto parse_real = [](const std::string& txt, double& out) {
        if (txt.empty()) return false;
        std::size_t pos = 0;
        try {
            out = std::stod(txt, &pos);
        } catch (...) {
            return false;
        }
        return pos == txt.size();
    };
    auto parse_imag_coeff = [&](std::string txt, double& out) {
        // txt ends with 'i'; empty / "+" / "-" coefficients mean 1
        txt.pop_back();
        if (txt.empty() || txt == "+") { out = 1.0; return true; }
        if (txt == "-") { out = -1.0; return true; }
        return parse_real(txt, out);
    };

    double re = 0.0, im = 0.0;
    if (s.back() == 'i' || s.back() == 'I') {
        s.back() = 'i';
        // split at the last +/- that is not an exponent sign and not leading
        std::size_t split = std::string::npos;
        for (std::size_t p = s.size() - 1; p > 0; --p) {
            const char c = s[p];
            if ((c == '+' || c == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
                split = p;
                break;
            }
        }
        if (split == std::string::npos) {
            if (!parse_imag_coeff(s, im))
                throw InputError("bad complex literal '" + s0 + "'");
        } else {
            if (!parse_real(s.substr(0, split), re) ||
                !parse_imag_coeff(s.substr(split), im))
                throw InputError("bad complex literal '" + s0 + "'");
        }
    } else if (!parse_real(s, re)) {
        throw InputError("bad complex literal '" + s0 + "'");
    }
    return {re, im};
}

std::vector<Complex> parse_complex_list(const std::string& s) {
    std::vector<Complex> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_complex_arg(item));
    if (out.empty()) throw InputError("empty parameter list");
    return out;
}

Complex parse_hbar_arg(const std::string& s) {
    // RE,IM pair; a single token is taken as a plain complex literal
    const auto comma = s.find(',');
    if (comma == std::string::npos) return parse_complex_arg(s);
    const Complex re = parse_complex_arg(s.substr(0, comma));
    const Complex im = parse_complex_arg(s.substr(comma + 1));
    if (re.imag() != 0.0 || im.imag() != 0.0)
        throw InputError("--hbar takes RE,IM with real components");
    return {re.real(), im.real()};
}

struct Options {
    std::string input, output;
    int pm = 1;
    bool pm_set = false;
    std::string hbar_str = "0,1";
    std::string t_str;
    int order = 25, kmax = 25, jmax = 25, dmax = 8;
    double tol = 1e-8;
    std::string format = "json";
};

struct CheckLine {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
};

json config_json(const Options& o, Complex hbar, const std::vector<Complex>& t) {
    json cfg;
    cfg["hbar"] = complex_json(hbar);
    cfg["order"] = o.order;
    cfg["kmax"] = o.kmax;
    cfg["jmax"] = o.jmax;
    cfg["dmax"] = o.dmax;
    cfg["tol"] = o.tol;
    json tj = json::array();
    for (Complex z : t) tj.push_back(complex_json(z));
    cfg["t"] = std::move(tj);
    cfg["source"] = o.input.empty() ? ("builtin projective space m=" + std::to_string(o.pm))
                                    : o.input;
    return cfg;
}

void emit(const Options& o, const json& report) {
    std::ostringstream os;
    if (o.format == "json") {
        os << report.dump(2) << '\n';
    } else {  // csv
        os.precision(17);
        if (report.contains("config"))
            for (auto it = report["config"].begin(); it != report["config"].end(); ++it)
                os << "# " << it.key() << "=" << it.value().dump() << '\n';
        if (report.contains("checks"))
            for (const auto& c : report["checks"])
                os << "check," << c["name"].get<std::string>() << ','
                   << c["value"].get<double>() << ',' << c["limit"].get<double>() << ','
                   << (c["pass"].get<bool>() ? "pass" : "fail") << '\n';
        if (report.contains("matrices"))
            for (auto it = report["matrices"].begin(); it != report["matrices"].end();
                 ++it) {
                const json& rows = it.value();
                for (std::size_t i = 0; i < rows.size(); ++i)
                    for (std::size_t j = 0; j < rows[i].size(); ++j)
                        os << it.key() << ',' << i << ',' << j << ','
                           << rows[i][j][0].get<double>() << ','
                           << rows[i][j][1].get<double>() << '\n';
            }
        for (auto it = report.begin(); it != report.end(); ++it)
            if (it.value().is_number())
                os << "result," << it.key() << ',' << it.value().dump() << '\n';
    }
    if (o.output.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(o.output);
        if (!f) throw InputError("cannot open output file " + o.output);
        f << os.str();
    }
}

json checks_json(const std::vector<CheckLine>& checks, bool& all_pass) {
    json arr = json::array();
    all_pass = true;
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        arr.push_back(json{{"name", c.name},
                           {"value", c.value},
                           {"limit", c.limit},
                           {"pass", c.pass}});
    }
    return arr;
}

GwData resolve_data(const Options& o) {
    if (!o.input.empty()) return parse_gw_data(load_json_file(o.input));
    if (o.pm < 1) throw InputError("--pm must be >= 1");
    return pm_gw_data(o.pm);
}

std::vector<Complex> resolve_t(const Options& o, std::size_t count, Complex fallback) {
    std::vector<Complex> t;
    if (!o.t_str.empty()) t = parse_complex_list(o.t_str);
    if (t.empty()) t.assign(count, fallback);
    if (t.size() != count)
        throw InputError("--t needs " + std::to_string(count) + " entries, got " +
                         std::to_string(t.size()));
    return t;
}

// ---------------------------------------------------------------------------

int cmd_flat(const Options& o) {
    const GwData data = resolve_data(o);
    const Complex hbar = parse_hbar_arg(o.hbar_str);
    const std::vector<Complex> t =
        resolve_t(o, static_cast<std::size_t>(data.h2_rank), Complex(0.1, 0.0));

    const FlatFrame frame = frobenius_chain(data, t, hbar, {o.kmax, o.jmax, o.tol});
    const double resid = nabla_residual(
        [&](const std::vector<Complex>& tt) {
            return frobenius_chain(data, tt, hbar, {o.kmax, o.jmax, o.tol}).g_inv;
        },
        [&](const std::vector<Complex>& tt) { return quantum_connection_matrices(data, tt); },
        t, hbar);

    json report;
    report["command"] = "flat";
    report["config"] = config_json(o, hbar, t);
    report["flatness_residual"] = resid;
    report["matrices"] = json{{"g", matrix_json(frame.g)}, {"g_inv", matrix_json(frame.g_inv)}};
    emit(o, report);
    return 0;
}

int cmd_verify(const Options& o) {
    const GwData data = resolve_data(o);
    const Complex hbar = parse_hbar_arg(o.hbar_str);
    const std::vector<Complex> t =
        resolve_t(o, static_cast<std::size_t>(data.h2_rank), Complex(0.1, 0.0));
    std::vector<CheckLine> checks;

    const FrobeniusCheck fc = check_frobenius(data.cup, o.tol);
    checks.push_back({"constant_product_frobenius", fc.max_residual, o.tol, fc.ok});

    // the three one-direction solvers against each other and the oracle
    double cross = 0.0;
    for (int i = 1; i <= data.h2_rank; ++i) {
        std::vector<Complex> frozen(t.begin(), t.begin() + (i - 1));
        const ExpOdeSystem sys = quantum_ode_system(data, i, frozen, hbar);
        const Complex ti = t[static_cast<std::size_t>(i) - 1];
        const CMatrix tab = evaluate(exp_log_series(sys, o.kmax, o.jmax), ti).value;
        const CMatrix blk = solve_via_block_exp(sys, ti, o.kmax, o.tol);
        const CMatrix ork = rk_solve(sys, {ti, 2048}).value;
        cross = std::max({cross, max_diff(tab, blk), max_diff(tab, ork)});
    }
    checks.push_back({"one_direction_solvers_agree", cross, o.tol, cross <= o.tol});

    const double flat = nabla_residual(
        [&](const std::vector<Complex>& tt) {
            return frobenius_chain(data, tt, hbar, {o.kmax, o.jmax, o.tol}).g_inv;
        },
        [&](const std::vector<Complex>& tt) { return quantum_connection_matrices(data, tt); },
        t, hbar);
    const double flat_limit = std::max(o.tol, 1e-6);  // finite-difference floor
    checks.push_back({"chained_frame_flatness", flat, flat_limit, flat <= flat_limit});

    if (o.input.empty()) {  // builtin projective space: extra closed-form checks
        const PmSystem s = pm_system(o.pm, hbar);
        const ExpOdeSystem sys = pm_ode_system(s);
        const Complex tc(0.3, 0.2);
        const CMatrix closed = pm_closed_form(s, tc, o.order);
        const CMatrix blk = solve_via_block_exp(sys, tc, o.kmax, o.tol);
        const CMatrix egt = solve_via_egt(sys, tc, o.kmax, o.tol);
        const double d = std::max(max_diff(closed, blk), max_diff(closed, egt));
        checks.push_back({"closed_form_cross_method", d, o.tol, d <= o.tol});

        const double gres = givental_identity_residual(
            givental_truncation(o.pm, hbar, o.dmax), s, Complex(-1.0, 0.0), o.order);
        checks.push_back({"hypergeometric_identity", gres, o.tol, gres <= o.tol});
    }

    bool all_pass = false;
    json report;
    report["command"] = "verify";
    report["config"] = config_json(o, hbar, t);
    report["checks"] = checks_json(checks, all_pass);
    report["all_pass"] = all_pass;
    emit(o, report);
    return all_pass ? 0 : kExitVerification;
}

int cmd_gw_recover(const Options& o) {
    const GwData data = resolve_data(o);
    const Complex hbar = parse_hbar_arg(o.hbar_str);
    std::vector<CheckLine> checks;
    json matrices;

    double worst = 0.0;
    for (int i = 1; i <= data.h2_rank; ++i) {
        // frozen parameters at zero: class scales reduce to hbar
        const std::vector<Complex> frozen(static_cast<std::size_t>(i) - 1,
                                          Complex(0.0, 0.0));
        const ExpOdeSystem sys = quantum_ode_system(data, i, frozen, hbar);
        const ExpLogSeries series = exp_log_series(sys, o.kmax, o.jmax);

        std::vector<int> exponents;
        for (const auto& tm : sys.terms)
            if (std::find(exponents.begin(), exponents.end(), tm.exponent) ==
                exponents.end())
                exponents.push_back(tm.exponent);

        for (int a : exponents) {
            const CMatrix rec = recover_structure_matrix(series, a);
            // invariants have one index lowered against the recovered matrix
            CMatrix inv_rec(data.dim, data.dim);
            for (int j = 0; j < data.dim; ++j)
                for (int l = 0; l < data.dim; ++l) {
                    Complex v = 0.0;
                    for (int r = 0; r < data.dim; ++r)
                        v += rec(j, r) * data.cup.pairing(r, l);
                    inv_rec(j, l) = v / hbar;
                }
            CMatrix inv_ref(data.dim, data.dim);
            for (std::size_t c = 0; c < data.classes.size(); ++c)
                if (data.classes[c].exponents[static_cast<std::size_t>(i) - 1] == a)
                    for (int j = 0; j < data.dim; ++j)
                        for (int l = 0; l < data.dim; ++l)
                            inv_ref(j, l) += data.inv_at(c, j, i, l);
            worst = std::max(worst, max_diff(inv_rec, inv_ref));
            matrices["direction_" + std::to_string(i) + "_degree_" + std::to_string(a) +
                     "_invariants"] = matrix_json(inv_rec);
        }
    }
    checks.push_back({"invariant_round_trip", worst, o.tol, worst <= o.tol});

    bool all_pass = false;
    json report;
    report["command"] = "gw-recover";
    report["config"] = config_json(o, hbar, {});
    report["checks"] = checks_json(checks, all_pass);
    report["matrices"] = std::move(matrices);
    emit(o, report);
    return all_pass ? 0 : kExitVerification;
}

int cmd_pm_closed_form(const Options& o) {
    if (!o.input.empty())
        throw InputError("pm-closed-form works on the builtin family; use --pm");
    const Complex hbar = parse_hbar_arg(o.hbar_str);
    const std::vector<Complex> t = resolve_t(o, 1, Complex(0.1, 0.0));
    const PmSystem s = pm_system(o.pm, hbar);

    const CMatrix b = pm_closed_form(s, t[0], o.order);
    const CMatrix blk = solve_via_block_exp(pm_ode_system(s), t[0], o.kmax, o.tol);
    const double d = max_diff(b, blk);

    std::vector<CheckLine> checks{{"closed_form_vs_block_exp", d, o.tol, d <= o.tol}};
    bool all_pass = false;
    json report;
    report["command"] = "pm-closed-form";
    report["config"] = config_json(o, hbar, t);
    report["checks"] = checks_json(checks, all_pass);
    report["matrices"] = json{{"solution", matrix_json(b)}};
    emit(o, report);
    return all_pass ? 0 : kExitVerification;
}

int cmd_givental_check(const Options& o) {
    if (!o.input.empty())
        throw InputError("givental-check works on the builtin family; use --pm");
    const Complex hbar = parse_hbar_arg(o.hbar_str);
    const std::vector<Complex> t = resolve_t(o, 1, Complex(-1.0, 0.0));
    const PmSystem s = pm_system(o.pm, hbar);

    const double resid = givental_identity_residual(
        givental_truncation(o.pm, hbar, o.dmax), s, t[0], o.order);
    const double resid_half = givental_identity_residual(
        givental_truncation(o.pm, hbar, o.dmax / 2), s, t[0], o.order);

    std::vector<CheckLine> checks{
        {"identity_residual", resid, o.tol, resid <= o.tol},
        {"residual_decreases_with_degree", resid, resid_half,
         resid <= resid_half || resid <= o.tol}};
    bool all_pass = false;
    json report;
    report["command"] = "givental-check";
    report["config"] = config_json(o, hbar, t);
    report["residual_at_half_dmax"] = resid_half;
    report["checks"] = checks_json(checks, all_pass);
    emit(o, report);
    return all_pass ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Flat frames and series solutions for deformed products "
        "(constant, one-direction quantum, chained, and closed-form families)"};
    app.require_subcommand(1);

    Options o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", o.input, "JSON file with deformation data");
        sub->add_option("--pm", o.pm, "builtin projective-space rank m (default 1)");
        sub->add_option("--hbar", o.hbar_str, "weight as RE,IM (default 0,1)");
        sub->add_option("--t", o.t_str,
                        "comma-separated complex parameters, e.g. 0.3+0.2i,-0.1");
        sub->add_option("--order", o.order, "series order (default 25)");
        sub->add_option("--kmax", o.kmax, "exponential truncation (default 25)");
        sub->add_option("--jmax", o.jmax, "polynomial truncation (default 25)");
        sub->add_option("--dmax", o.dmax, "degree truncation (default 8)");
        sub->add_option("--tol", o.tol, "tolerance (default 1e-8)");
        sub->add_option("--format", o.format, "json or csv (default json)")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--output", o.output, "write the report to a file");
    };

    CLI::App* c_flat = app.add_subcommand("flat", "chained flat frame for deformation data");
    CLI::App* c_verify = app.add_subcommand("verify", "run the verification suite");
    CLI::App* c_recover =
        app.add_subcommand("gw-recover", "recover structure matrices from the series");
    CLI::App* c_pcf =
        app.add_subcommand("pm-closed-form", "closed-form solution for projective space");
    CLI::App* c_giv =
        app.add_subcommand("givental-check", "hypergeometric identity residual");
    for (CLI::App* sub : {c_flat, c_verify, c_recover, c_pcf, c_giv}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (app.got_subcommand(c_flat)) return cmd_flat(o);
        if (app.got_subcommand(c_verify)) return cmd_verify(o);
        if (app.got_subcommand(c_recover)) return cmd_gw_recover(o);
        if (app.got_subcommand(c_pcf)) return cmd_pm_closed_form(o);
        if (app.got_subcommand(c_giv)) return cmd_givental_check(o);
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << " (tail " << e.tail << ")\n";
        return kExitConvergence;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
