#include "vim/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include "vim/bounds.hpp"
#include "vim/oracle.hpp"
#include "vim/system.hpp"

namespace vim::cli {

namespace {

std::string format_double(double v, int precision) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

// JSON numbers must be finite; report any saturated value as null.
std::string json_number(double v, int precision) {
    if (!std::isfinite(v)) return "null";
    return format_double(v, precision);
}

double parse_double_arg(const std::string& flag, const std::string& text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw UsageError("flag " + flag + ": not a number: '" + text + "'");
    }
    return v;
}

int parse_int_arg(const std::string& flag, const std::string& text) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw UsageError("flag " + flag + ": not an integer: '" + text + "'");
    }
    return v;
}

void parse_orders(const std::string& text, std::vector<int>& out) {
    auto dots = text.find("..");
    if (dots == std::string::npos) {
        out.push_back(parse_int_arg("--n", text));
        return;
    }
    int lo = parse_int_arg("--n", text.substr(0, dots));
    int hi = parse_int_arg("--n", text.substr(dots + 2));
    if (lo > hi) throw UsageError("flag --n: empty range '" + text + "'");
    for (int n = lo; n <= hi; ++n) out.push_back(n);
}

}  // namespace

std::string usage() {
    return
        "usage: vimsolve <command> [flags]\n"
        "\n"
        "commands:\n"
        "  solve          solve a scalar initial value problem\n"
        "  solve-system   solve a first-order system\n"
        "  compare        solve, then report the deviation from a fine-grid\n"
        "                 Runge-Kutta reference\n"
        "  bound          evaluate the factorial error bound\n"
        "  list-builtins  list the registered test problems\n"
        "\n"
        "problem flags (solve, solve-system, compare):\n"
        "  --problem NAME     builtin problem (see list-builtins), or\n"
        "  --f EXPR           right-hand side, repeat once per equation\n"
        "  --df EXPR          derivative override, all equations or none\n"
        "  --x0 VALUE         initial value, repeat once per equation\n"
        "  --t0 VALUE         interval start (default 0)\n"
        "  --tf VALUE         interval end (default 1)\n"
        "  --exact EXPR       closed-form solution in t, for error reporting\n"
        "\n"
        "iteration flags:\n"
        "  --grid N           grid points (default 100)\n"
        "  --tol T            stopping tolerance (default 1e-5)\n"
        "  --max-iters K      iteration cap (default 5)\n"
        "  --keep-iterates    also write one csv per iterate\n"
        "\n"
        "output flags:\n"
        "  --out-csv PATH     write the solution as csv\n"
        "  --out-json PATH    write the run report as json\n"
        "  --precision D      significant digits in outputs, 6..17 (default 17)\n"
        "\n"
        "bound flags:\n"
        "  --L VALUE          Lipschitz constant (> 0)\n"
        "  --T VALUE          interval length (> 0)\n"
        "  --dim D            system dimension (default 1)\n"
        "  --e0 VALUE         initial error norm (default 1)\n"
        "  --n N | N0..N1     iteration index, repeatable\n"
        "\n"
        "exit status: 0 converged/success, 2 completed without convergence,\n"
        "1 usage, parse or evaluation error\n";
}

RunManifest parse_args(std::span<const std::string> args) {
    if (args.empty()) throw UsageError("missing command\n" + usage());

    RunManifest m;
    const std::string& cmd = args[0];
    if (cmd == "solve") {
        m.command = Command::Solve;
    } else if (cmd == "solve-system") {
        m.command = Command::SolveSystem;
    } else if (cmd == "bound") {
        m.command = Command::Bound;
    } else if (cmd == "compare") {
        m.command = Command::Compare;
    } else if (cmd == "list-builtins") {
        m.command = Command::ListBuiltins;
    } else if (cmd == "--help" || cmd == "help") {
        throw UsageError(usage());
    } else {
        throw UsageError("unknown command '" + cmd + "'\n" + usage());
    }

    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& flag = args[i];
        if (flag == "--keep-iterates") {
            m.keep_iterates = true;
            continue;
        }
        if (i + 1 >= args.size()) throw UsageError("flag " + flag + " needs a value");
        const std::string& val = args[++i];

        if (flag == "--problem") {
            m.builtin_name = val;
        } else if (flag == "--f") {
            m.f_sources.push_back(val);
        } else if (flag == "--df") {
            m.df_sources.push_back(val);
        } else if (flag == "--exact") {
            m.exact_sources.push_back(val);
        } else if (flag == "--x0") {
            m.x0.push_back(parse_double_arg(flag, val));
        } else if (flag == "--t0") {
            m.t0 = parse_double_arg(flag, val);
        } else if (flag == "--tf") {
            m.tf = parse_double_arg(flag, val);
        } else if (flag == "--grid") {
            m.config.n_points = parse_int_arg(flag, val);
        } else if (flag == "--tol") {
            m.config.tol = parse_double_arg(flag, val);
        } else if (flag == "--max-iters") {
            m.config.max_iters = parse_int_arg(flag, val);
        } else if (flag == "--out-csv") {
            m.out_csv = val;
        } else if (flag == "--out-json") {
            m.out_json = val;
        } else if (flag == "--precision") {
            m.precision = parse_int_arg(flag, val);
        } else if (flag == "--L") {
            m.lipschitz = parse_double_arg(flag, val);
        } else if (flag == "--T") {
            m.interval = parse_double_arg(flag, val);
        } else if (flag == "--dim") {
            m.dimension = parse_int_arg(flag, val);
        } else if (flag == "--e0") {
            m.e0_norm = parse_double_arg(flag, val);
        } else if (flag == "--n") {
            parse_orders(val, m.bound_orders);
        } else {
            throw UsageError("unknown flag '" + flag + "'");
        }
    }

    if (m.precision < 6 || m.precision > 17) {
        throw UsageError("--precision must lie in 6..17");
    }

    bool wants_problem = m.command == Command::Solve || m.command == Command::SolveSystem ||
                         m.command == Command::Compare;
    if (wants_problem) {
        bool has_builtin = !m.builtin_name.empty();
        bool has_exprs = !m.f_sources.empty();
        if (has_builtin == has_exprs) {
            throw UsageError("give exactly one problem source: --problem or --f");
        }
        if (has_builtin && (!m.x0.empty() || !m.df_sources.empty() || !m.exact_sources.empty())) {
            throw UsageError("--problem already fixes x0, derivatives and the exact solution");
        }
        if (has_exprs) {
            if (m.x0.size() != m.f_sources.size()) {
                throw UsageError("need one --x0 per --f (got " + std::to_string(m.x0.size()) +
                                 " for " + std::to_string(m.f_sources.size()) + " equations)");
            }
            if (!m.df_sources.empty() && m.df_sources.size() != m.f_sources.size()) {
                throw UsageError("--df must be given for all equations or none");
            }
            if (!m.exact_sources.empty() && m.exact_sources.size() != m.f_sources.size()) {
                throw UsageError("--exact must be given for all equations or none");
            }
            if (m.command == Command::Solve && m.f_sources.size() != 1) {
                throw UsageError("solve takes one equation; use solve-system");
            }
        }
        if (m.config.n_points < 2) throw UsageError("--grid must be >= 2");
        if (!(m.config.tol > 0.0)) throw UsageError("--tol must be > 0");
        if (m.config.max_iters < 1) throw UsageError("--max-iters must be >= 1");
        if (!(m.t0 < m.tf)) throw UsageError("require --t0 < --tf");
    }

    if (m.command == Command::Bound) {
        if (!(m.lipschitz > 0.0)) throw UsageError("bound needs --L > 0");
        if (!(m.interval > 0.0)) throw UsageError("bound needs --T > 0");
        if (m.dimension < 1) throw UsageError("--dim must be >= 1");
        if (m.e0_norm < 0.0) throw UsageError("--e0 must be >= 0");
        if (m.bound_orders.empty()) throw UsageError("bound needs at least one --n");
        for (int n : m.bound_orders) {
            if (n < 0) throw UsageError("--n must be >= 0");
        }
    }
    return m;
}

namespace {

using ExactFn = std::function<std::vector<double>(double)>;

struct ResolvedProblem {
    std::optional<ScalarIvp> scalar;
    std::optional<SystemIvp> system;
    ExactFn exact;  // may be empty
    std::string label;

    int dimension() const { return scalar ? 1 : system->dimension; }
};

Expr parse_time_only(const std::string& source) {
    Expr e = parse_expression(source, 1);
    if (max_state_index(e) != 0) {
        throw UsageError("--exact must be an expression in t only: '" + source + "'");
    }
    return e;
}

ResolvedProblem resolve_problem(const RunManifest& m, bool force_scalar) {
    ResolvedProblem r;
    if (!m.builtin_name.empty()) {
        BuiltinProblem b = builtin(m.builtin_name);
        r.label = b.name;
        r.exact = b.exact;
        if (const auto* s = std::get_if<ScalarIvp>(&b.problem)) {
            r.scalar = *s;
        } else {
            if (force_scalar) {
                throw UsageError("builtin '" + b.name + "' is a system; use solve-system");
            }
            r.system = std::get<SystemIvp>(b.problem);
        }
        return r;
    }

    const auto d = static_cast<int>(m.f_sources.size());
    std::vector<Expr> f;
    f.reserve(m.f_sources.size());
    for (const std::string& s : m.f_sources) f.push_back(parse_expression(s, d));
    std::vector<Expr> df;
    for (const std::string& s : m.df_sources) df.push_back(parse_expression(s, d));

    if (d == 1) {
        if (df.empty()) {
            r.scalar = ScalarIvp(f[0], m.x0[0], m.t0, m.tf);
        } else {
            r.scalar = ScalarIvp(f[0], df[0], m.x0[0], m.t0, m.tf);
        }
        r.label = m.f_sources[0];
    } else {
        if (df.empty()) {
            r.system = SystemIvp(f, m.x0, m.t0, m.tf);
        } else {
            r.system = SystemIvp(f, df, m.x0, m.t0, m.tf);
        }
        std::string label;
        for (const std::string& s : m.f_sources) {
            if (!label.empty()) label += "; ";
            label += s;
        }
        r.label = label;
    }

    if (!m.exact_sources.empty()) {
        std::vector<Expr> exact;
        exact.reserve(m.exact_sources.size());
        for (const std::string& s : m.exact_sources) exact.push_back(parse_time_only(s));
        r.exact = [exact](double t) {
            std::vector<double> out;
            out.reserve(exact.size());
            for (const Expr& e : exact) out.push_back(eval_expression(e, t, {}));
            return out;
        };
    }
    return r;
}

struct SolveOutcome {
    std::vector<GridFunction> solution;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residuals;
    std::vector<std::vector<GridFunction>> iterates;
};

SolveOutcome run_solver(const ResolvedProblem& p, const SolveConfig& config,
                        bool keep_iterates) {
    SolveOutcome o;
    if (p.scalar) {
        SolveReport rep = vim_solve_scalar(*p.scalar, config, keep_iterates);
        o.solution.push_back(std::move(rep.solution));
        o.iterations = rep.iterations;
        o.converged = rep.converged;
        o.residuals = std::move(rep.residual_history);
        for (GridFunction& it : rep.iterates) {
            o.iterates.push_back({std::move(it)});
        }
    } else {
        SystemSolveReport rep = vim_solve_system(*p.system, config, keep_iterates);
        o.solution = std::move(rep.solution);
        o.iterations = rep.iterations;
        o.converged = rep.converged;
        o.residuals = std::move(rep.residual_history);
        o.iterates = std::move(rep.iterates);
    }
    return o;
}

double max_error_vs(const std::vector<GridFunction>& solution, const ExactFn& reference) {
    const Grid& grid = solution.front().grid;
    double m = 0.0;
    for (int j = 0; j < grid.n_points; ++j) {
        std::vector<double> ref = reference(grid.node(j));
        for (std::size_t k = 0; k < solution.size(); ++k) {
            m = std::max(m, std::abs(solution[k].values[static_cast<std::size_t>(j)] - ref[k]));
        }
    }
    return m;
}

// Reference run on a 10x finer grid whose nodes contain the working nodes.
double max_error_vs_rk4(const ResolvedProblem& p, const std::vector<GridFunction>& solution) {
    const Grid& grid = solution.front().grid;
    int fine_points = 10 * (grid.n_points - 1) + 1;
    std::vector<GridFunction> ref =
        p.scalar ? std::vector<GridFunction>{rk4_solve(*p.scalar, fine_points)}
                 : rk4_solve(*p.system, fine_points);
    double m = 0.0;
    for (int j = 0; j < grid.n_points; ++j) {
        for (std::size_t k = 0; k < solution.size(); ++k) {
            m = std::max(m, std::abs(solution[k].values[static_cast<std::size_t>(j)] -
                                     ref[k].values[static_cast<std::size_t>(10 * j)]));
        }
    }
    return m;
}

void write_csv_file(const std::string& path, const std::vector<GridFunction>& components,
                    int precision) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write csv file '" + path + "'");
    out << "t";
    if (components.size() == 1) {
        out << ",u";
    } else {
        for (std::size_t k = 1; k <= components.size(); ++k) out << ",u" << k;
    }
    out << "\n";
    const Grid& grid = components.front().grid;
    for (int j = 0; j < grid.n_points; ++j) {
        out << format_double(grid.node(j), precision);
        for (const GridFunction& u : components) {
            out << ',' << format_double(u.values[static_cast<std::size_t>(j)], precision);
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("failed while writing csv file '" + path + "'");
}

std::string iterate_csv_path(const std::string& base, std::size_t index) {
    auto dot = base.find_last_of('.');
    auto slash = base.find_last_of('/');
    bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    std::string stem = has_ext ? base.substr(0, dot) : base;
    std::string ext = has_ext ? base.substr(dot) : std::string(".csv");
    return stem + "_iter" + std::to_string(index) + ext;
}

std::string command_name(Command c) {
    switch (c) {
        case Command::Solve: return "solve";
        case Command::SolveSystem: return "solve-system";
        case Command::Bound: return "bound";
        case Command::Compare: return "compare";
        case Command::ListBuiltins: return "list-builtins";
    }
    return "";
}

void write_solve_json(const std::string& path, const RunManifest& m,
                      const std::string& problem_label, const SolveOutcome& o,
                      std::optional<double> err_exact, std::optional<double> err_rk4) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write json file '" + path + "'");
    int p = m.precision;
    out << "{\n";
    out << "  \"command\": \"" << json_escape(command_name(m.command)) << "\",\n";
    out << "  \"problem\": \"" << json_escape(problem_label) << "\",\n";
    out << "  \"config\": {\"n_points\": " << m.config.n_points
        << ", \"tol\": " << json_number(m.config.tol, p)
        << ", \"max_iters\": " << m.config.max_iters << "},\n";
    out << "  \"iterations\": " << o.iterations << ",\n";
    out << "  \"converged\": " << (o.converged ? "true" : "false") << ",\n";
    out << "  \"residual_history\": [";
    for (std::size_t i = 0; i < o.residuals.size(); ++i) {
        if (i) out << ", ";
        out << json_number(o.residuals[i], p);
    }
    out << "]";
    if (err_exact) out << ",\n  \"max_error_vs_exact\": " << json_number(*err_exact, p);
    if (err_rk4) out << ",\n  \"max_error_vs_rk4\": " << json_number(*err_rk4, p);
    out << "\n}\n";
    if (!out) throw std::runtime_error("failed while writing json file '" + path + "'");
}

void write_bound_json(const std::string& path, const RunManifest& m,
                      const std::vector<double>& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write json file '" + path + "'");
    out << "{\n  \"command\": \"bound\",\n  \"bound_values\": [";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ", ";
        out << json_number(values[i], m.precision);
    }
    out << "]\n}\n";
    if (!out) throw std::runtime_error("failed while writing json file '" + path + "'");
}

int run_solve_like(const RunManifest& m, std::ostream& out) {
    ResolvedProblem p = resolve_problem(m, m.command == Command::Solve);
    if (m.command == Command::SolveSystem && p.scalar) {
        // solve-system on a scalar builtin runs it as a one-equation system
        p.system = SystemIvp({p.scalar->f}, {p.scalar->f_x}, {p.scalar->x0}, p.scalar->t0,
                             p.scalar->tf);
        p.scalar.reset();
    }

    SolveOutcome o = run_solver(p, m.config, m.keep_iterates);

    std::optional<double> err_exact;
    if (p.exact) err_exact = max_error_vs(o.solution, p.exact);
    std::optional<double> err_rk4;
    if (m.command == Command::Compare) err_rk4 = max_error_vs_rk4(p, o.solution);

    const int prec = m.precision;
    out << "problem: " << p.label << "\n";
    out << "config: grid=" << m.config.n_points << " tol=" << format_double(m.config.tol, prec)
        << " max-iters=" << m.config.max_iters << "\n";
    out << "iterations: " << o.iterations << "\n";
    out << "converged: " << (o.converged ? "yes" : "no") << "\n";
    out << "residuals:";
    for (double r : o.residuals) out << ' ' << format_double(r, prec);
    out << "\n";
    if (err_exact) out << "max error vs exact: " << format_double(*err_exact, prec) << "\n";
    if (err_rk4) out << "max error vs rk4: " << format_double(*err_rk4, prec) << "\n";

    if (!m.out_csv.empty()) {
        write_csv_file(m.out_csv, o.solution, prec);
        out << "wrote csv: " << m.out_csv << "\n";
        if (m.keep_iterates) {
            for (std::size_t i = 0; i < o.iterates.size(); ++i) {
                write_csv_file(iterate_csv_path(m.out_csv, i), o.iterates[i], prec);
            }
            out << "wrote " << o.iterates.size() << " iterate csv files\n";
        }
    }
    if (!m.out_json.empty()) {
        write_solve_json(m.out_json, m, p.label, o, err_exact, err_rk4);
        out << "wrote json: " << m.out_json << "\n";
    }
    return o.converged ? 0 : 2;
}

int run_bound(const RunManifest& m, std::ostream& out) {
    out << "L=" << format_double(m.lipschitz, m.precision)
        << " T=" << format_double(m.interval, m.precision) << " dim=" << m.dimension
        << " e0=" << format_double(m.e0_norm, m.precision) << "\n";
    std::vector<double> values;
    values.reserve(m.bound_orders.size());
    for (int n : m.bound_orders) {
        double b = error_bound(BoundInput{m.lipschitz, m.interval, m.dimension, m.e0_norm, n});
        values.push_back(b);
        out << "n=" << n << " bound=" << format_double(b, m.precision) << "\n";
    }
    if (!m.out_json.empty()) {
        write_bound_json(m.out_json, m, values);
        out << "wrote json: " << m.out_json << "\n";
    }
    return 0;
}

int run_list_builtins(std::ostream& out) {
    for (const std::string& name : builtin_names()) {
        BuiltinProblem b = builtin(name);
        out << name << "  (" << b.dimension() << "d)  " << b.source << "\n";
    }
    return 0;
}

}  // namespace

int run(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
    try {
        switch (manifest.command) {
            case Command::Solve:
            case Command::SolveSystem:
            case Command::Compare:
                return run_solve_like(manifest, out);
            case Command::Bound:
                return run_bound(manifest, out);
            case Command::ListBuiltins:
                return run_list_builtins(out);
        }
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace vim::cli
