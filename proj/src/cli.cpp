#include "impdiff/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "impdiff/hideriv.hpp"
#include "impdiff/implicit.hpp"
#include "impdiff/oracle.hpp"
#include "impdiff/problemfile.hpp"
#include "impdiff/verify.hpp"

namespace impdiff {

namespace {

std::string fmt(double v, bool machine) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), machine ? "%.17g" : "%.15g", v);
    return buf;
}

MultiIndex parse_order(const std::string& text) {
    std::vector<int> coords;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) coords.push_back(std::stoi(token));
    if (coords.empty()) throw InvalidArgument("empty multi-index: " + text);
    return MultiIndex(std::move(coords));
}

// "(0,0) (1,0) (2,0)" -> points
std::vector<MultiIndex> parse_point_list(const std::string& text) {
    std::vector<MultiIndex> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t open = text.find('(', pos);
        if (open == std::string::npos) break;
        const std::size_t close = text.find(')', open);
        if (close == std::string::npos)
            throw InvalidArgument("unbalanced parentheses in point list: " + text);
        out.push_back(parse_order(text.substr(open + 1, close - open - 1)));
        pos = close + 1;
    }
    if (out.empty()) throw InvalidArgument("empty point list: " + text);
    return out;
}

std::vector<double> parse_reals(const std::string& text, char sep) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, sep))
        if (!token.empty()) out.push_back(std::stod(token));
    return out;
}

std::string machine_name(std::string s) {
    for (char& c : s)
        if (c == ' ') c = '_';
    return s;
}

// Divided difference of the stored y samples over the index window [0, n].
double oracle_value(const ImplicitProblem& problem, const MultiIndex& n) {
    const Grid window = problem.grid().window(MultiIndex::zero(problem.dim()), n);
    std::vector<int> dims;
    for (int j = 0; j < window.dim(); ++j) dims.push_back(window.size(j));
    Tensor values(dims);
    std::vector<int> idx(static_cast<std::size_t>(window.dim()), 0);
    while (true) {
        MultiIndex mi{std::vector<int>(idx)};
        values.at(mi) = problem.y_at(mi);
        int j = window.dim() - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == n[j]) idx[static_cast<std::size_t>(j--)] = 0;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
    }
    return divided_difference(values, window);
}

double evaluate_method(const ImplicitProblem& problem, const MultiIndex& n,
                       const std::string& method) {
    if (n.order() == 1) {
        // Every form reduces to the first-order rule at |n| = 1.
        if (method == "oracle") return oracle_value(problem, n);
        return first_order_dd(problem, MultiIndex::zero(problem.dim()), *n.unit_axis());
    }
    if (method == "recursive") return recursive_dd(problem, n);
    if (method == "polygon") return polygon_dd(problem, n);
    if (method == "tree") return tree_dd(problem, n);
    if (method == "oracle") return oracle_value(problem, n);
    throw InvalidArgument("unknown method: " + method);
}

Grid default_case_grid(const TestCase& tc, const MultiIndex& n) {
    std::vector<std::vector<double>> axes;
    for (int j = 0; j < tc.dim; ++j) {
        const auto& [lo, hi] = tc.box[static_cast<std::size_t>(j)];
        const int count = n[j] + 1;
        std::vector<double> nodes;
        // Evenly spaced interior nodes of the case's box.
        for (int i = 0; i < count; ++i)
            nodes.push_back(lo + (hi - lo) * (i + 1.0) / (count + 1.0));
        axes.push_back(std::move(nodes));
    }
    return Grid(std::move(axes));
}

struct DivdiffOptions {
    std::string file;
    std::string case_name;
    std::string order_text;
    std::string grid_text;
    std::string method = "recursive";
    std::string format = "text";
    bool all = false;
    bool terms = false;
};

int cmd_divdiff(const DivdiffOptions& opt) {
    const bool machine = opt.format == "machine";
    if (opt.file.empty() == opt.case_name.empty())
        throw InvalidArgument("divdiff: give exactly one of a problem file or --case");

    MultiIndex n{{0}};
    bool have_n = false;
    if (!opt.order_text.empty()) {
        n = parse_order(opt.order_text);
        have_n = true;
    }

    std::optional<ImplicitProblem> problem;
    if (!opt.file.empty()) {
        ProblemFile pf = load_problem_file(opt.file);
        if (!have_n) {
            if (!pf.target) throw InvalidArgument("divdiff: no n in the file and no --n");
            n = *pf.target;
        }
        problem.emplace(build_problem(pf));
    } else {
        const TestCase& tc = find_case(opt.case_name);
        if (!have_n) throw InvalidArgument("divdiff: --case needs --n");
        if (n.dim() != tc.dim) throw InvalidArgument("divdiff: n dimension does not match case");
        Grid grid = opt.grid_text.empty() ? default_case_grid(tc, n) : [&] {
            std::vector<std::vector<double>> axes;
            std::istringstream in(opt.grid_text);
            std::string axis_text;
            while (std::getline(in, axis_text, ';')) axes.push_back(parse_reals(axis_text, ','));
            return Grid(std::move(axes));
        }();
        problem.emplace(make_problem(tc, grid));
    }

    if (n.dim() != problem->dim()) throw InvalidArgument("divdiff: n dimension mismatch");
    if (n.order() < 1) throw InvalidArgument("divdiff: |n| >= 1 required");
    if (!partial_leq(n, problem->grid().max_order()))
        throw InvalidArgument("divdiff: grid does not cover order " + n.to_string());

    if (opt.terms) {
        if (opt.method != "polygon" && opt.method != "tree")
            throw InvalidArgument("divdiff: --terms requires --method polygon or tree");
        const TermMode mode = opt.method == "polygon" ? TermMode::polygon : TermMode::tree;
        for (const TermExpr& term : emit_terms(n, mode)) {
            if (machine)
                std::cout << "term method=" << opt.method << " text=\"" << term.to_string()
                          << "\"\n";
            else
                std::cout << term.to_string() << "\n";
        }
    }

    if (opt.all) {
        const std::vector<std::string> methods{"recursive", "polygon", "tree", "oracle"};
        std::vector<double> values;
        for (const auto& method : methods) values.push_back(evaluate_method(*problem, n, method));
        double lo = values[0], hi = values[0], scale = 1.0;
        for (double v : values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            scale = std::max(scale, std::abs(v));
        }
        const double deviation = (hi - lo) / scale;
        for (std::size_t i = 0; i < methods.size(); ++i) {
            if (machine)
                std::cout << "divdiff method=" << methods[i] << " n=" << n.to_string()
                          << " value=" << fmt(values[i], true) << "\n";
            else
                std::cout << methods[i] << " " << fmt(values[i], false) << "\n";
        }
        if (machine)
            std::cout << "deviation value=" << fmt(deviation, true) << "\n";
        else
            std::cout << "max pairwise deviation " << fmt(deviation, false) << "\n";
        return 0;
    }

    const double value = evaluate_method(*problem, n, opt.method);
    if (machine)
        std::cout << "divdiff method=" << opt.method << " n=" << n.to_string()
                  << " value=" << fmt(value, true) << "\n";
    else
        std::cout << fmt(value, false) << "\n";
    return 0;
}

struct DerivativeOptions {
    std::string file;
    std::string case_name;
    std::string point_text;
    std::string order_text;
    std::string format = "text";
    int dim = 0;
    bool symbolic = false;
};

int cmd_derivative(const DerivativeOptions& opt) {
    const bool machine = opt.format == "machine";
    if (opt.order_text.empty()) throw InvalidArgument("derivative: --n is required");
    const MultiIndex n = parse_order(opt.order_text);
    if (n.order() < 1) throw InvalidArgument("derivative: |n| >= 1 required");

    if (opt.symbolic) {
        const std::string formula = derivative_formula(n);
        if (machine)
            std::cout << "derivative n=" << n.to_string() << " formula=\"" << formula << "\"\n";
        else
            std::cout << formula << "\n";
        return 0;
    }

    if (opt.point_text.empty()) throw InvalidArgument("derivative: --point is required");
    const std::vector<double> x = parse_reals(opt.point_text, ',');

    std::shared_ptr<const GProvider> provider;
    SolveSpec spec;
    if (!opt.case_name.empty()) {
        const TestCase& tc = find_case(opt.case_name);
        provider = tc.provider();
        spec = tc.solve;
    } else if (!opt.file.empty()) {
        ProblemFile pf = load_problem_file(opt.file);
        provider = std::make_shared<ExprProvider>(Expr::parse(pf.g_text, pf.dim));
        if (!pf.spec.bracket && !pf.spec.guess)
            throw InvalidArgument("derivative: the problem file has no bracket or guess");
        spec = pf.spec;
    } else {
        throw InvalidArgument("derivative: give a problem file or --case");
    }
    if (static_cast<int>(x.size()) != provider->dim())
        throw InvalidArgument("derivative: point dimension mismatch");
    if (n.dim() != provider->dim()) throw InvalidArgument("derivative: n dimension mismatch");

    const double y = solve_y(*provider, x, spec);
    const double value = derivative_from_partials(*provider, x, y, n);
    if (machine)
        std::cout << "derivative n=" << n.to_string() << " value=" << fmt(value, true) << "\n";
    else
        std::cout << fmt(value, false) << "\n";
    return 0;
}

struct EnumerateOptions {
    std::string kind;
    std::string from_text, to_text, path_text, order_text;
    int vertices = 0;
    int k = 0;
    bool count_only = false;
};

int cmd_enumerate(const EnumerateOptions& opt) {
    std::vector<std::string> lines;
    if (opt.kind == "paths") {
        if (opt.from_text.empty() || opt.to_text.empty())
            throw InvalidArgument("enumerate paths: --from and --to are required");
        const MultiIndex from = parse_order(opt.from_text);
        const MultiIndex to = parse_order(opt.to_text);
        const auto paths = opt.k > 0 ? enumerate_increasing_paths(from, to, opt.k)
                                     : enumerate_unit_paths(from, to);
        for (const auto& path : paths) lines.push_back(path.to_string());
    } else if (opt.kind == "partitions" || opt.kind == "trees") {
        int vertex_count = opt.vertices;
        if (vertex_count == 0 && !opt.path_text.empty())
            vertex_count = static_cast<int>(parse_point_list(opt.path_text).size());
        if (vertex_count == 0)
            throw InvalidArgument("enumerate " + opt.kind + ": --vertices or --path is required");
        if (opt.kind == "partitions")
            for (const auto& partition : enumerate_partitions(vertex_count))
                lines.push_back(partition.to_string());
        else
            for (const auto& tree : enumerate_trees(vertex_count))
                lines.push_back(tree.to_string());
    } else if (opt.kind == "tprime") {
        if (opt.path_text.empty()) throw InvalidArgument("enumerate tprime: --path is required");
        for (const auto& tree : enumerate_tprime(parse_point_list(opt.path_text)))
            lines.push_back(tree.to_string());
    } else if (opt.kind == "tuples") {
        if (opt.path_text.empty()) throw InvalidArgument("enumerate tuples: --path is required");
        const LatticePath path{parse_point_list(opt.path_text)};
        for (const auto& tuple : compatible_tuples(path)) lines.push_back(tuple.to_string());
    } else if (opt.kind == "derivparts") {
        if (opt.order_text.empty()) throw InvalidArgument("enumerate derivparts: --n is required");
        for (const auto& p : enumerate_deriv_partitions(parse_order(opt.order_text)))
            lines.push_back(p.to_string());
    } else {
        throw InvalidArgument("enumerate: unknown kind '" + opt.kind + "'");
    }

    if (opt.count_only) {
        std::cout << lines.size() << "\n";
    } else {
        for (const auto& line : lines) std::cout << line << "\n";
    }
    return 0;
}

struct VerifyOptions {
    std::string suite = "all";
    std::string format = "text";
    std::uint64_t seed = 12345;
    int max_order = 4;
};

int cmd_verify(const VerifyOptions& opt) {
    const bool machine = opt.format == "machine";
    std::vector<CheckResult> results;
    auto append = [&](std::vector<CheckResult> r) {
        results.insert(results.end(), r.begin(), r.end());
    };
    const bool all = opt.suite == "all";
    if (all || opt.suite == "counts") append(verify_counts());
    if (all || opt.suite == "equivalence") append(verify_equivalence(opt.seed, opt.max_order));
    if (all || opt.suite == "oracle") append(verify_oracle(opt.seed, opt.max_order));
    if (all || opt.suite == "coefficients") append(verify_coefficients(opt.seed, opt.max_order));
    if (all || opt.suite == "fixtures") append(verify_fixtures());
    if (all || opt.suite == "limit") append(verify_limit());
    if (results.empty()) throw InvalidArgument("verify: unknown suite '" + opt.suite + "'");

    int failures = 0;
    for (const CheckResult& r : results) {
        if (!r.pass) ++failures;
        if (machine) {
            std::cout << "check name=" << machine_name(r.name) << " pass="
                      << (r.pass ? "true" : "false") << " worst=" << fmt(r.worst, true) << "\n";
        } else {
            std::cout << (r.pass ? "ok   " : "FAIL ") << r.name;
            if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
            std::cout << "\n";
        }
    }
    if (!machine)
        std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " failures")
                  << "\n";
    return failures == 0 ? 0 : 1;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"divided differences and derivatives of implicit functions"};
    app.require_subcommand(1);

    DivdiffOptions divdiff;
    CLI::App* cmd_dd = app.add_subcommand("divdiff", "evaluate [x:0,n]y from g");
    cmd_dd->add_option("file", divdiff.file, "problem file");
    cmd_dd->add_option("--case", divdiff.case_name, "built-in test case name");
    cmd_dd->add_option("--n", divdiff.order_text, "target order, e.g. 2,1");
    cmd_dd->add_option("--grid", divdiff.grid_text, "explicit grid: axes ';', nodes ','");
    cmd_dd->add_option("--method", divdiff.method, "recursive|polygon|tree|oracle")
        ->check(CLI::IsMember({"recursive", "polygon", "tree", "oracle"}));
    cmd_dd->add_flag("--all", divdiff.all, "run all four methods and report the spread");
    cmd_dd->add_flag("--terms", divdiff.terms, "print the symbolic term list");
    cmd_dd->add_option("--format", divdiff.format, "text|machine")
        ->check(CLI::IsMember({"text", "machine"}));

    DerivativeOptions derivative;
    CLI::App* cmd_dv = app.add_subcommand("derivative", "evaluate y_n from partials of g");
    cmd_dv->add_option("file", derivative.file, "problem file");
    cmd_dv->add_option("--case", derivative.case_name, "built-in test case name");
    cmd_dv->add_option("--point", derivative.point_text, "evaluation point, e.g. 0.3,0.4");
    cmd_dv->add_option("--n", derivative.order_text, "derivative order, e.g. 1,1");
    cmd_dv->add_flag("--symbolic", derivative.symbolic, "print the collected formula");
    cmd_dv->add_option("--q", derivative.dim, "dimension for --symbolic without a case");
    cmd_dv->add_option("--format", derivative.format, "text|machine")
        ->check(CLI::IsMember({"text", "machine"}));

    EnumerateOptions enumerate;
    CLI::App* cmd_en = app.add_subcommand("enumerate", "list combinatorial structures");
    cmd_en->add_option("kind", enumerate.kind,
                       "paths|partitions|trees|tprime|tuples|derivparts")
        ->required();
    cmd_en->add_option("--from", enumerate.from_text, "path start, e.g. 0,0");
    cmd_en->add_option("--to", enumerate.to_text, "path end, e.g. 2,1");
    cmd_en->add_option("--k", enumerate.k, "steps for increasing paths (unit paths if absent)");
    cmd_en->add_option("--vertices", enumerate.vertices, "polygon vertex count");
    cmd_en->add_option("--path", enumerate.path_text, "path points, e.g. \"(0,0) (1,0)\"");
    cmd_en->add_option("--n", enumerate.order_text, "order for derivparts");
    cmd_en->add_flag("--count", enumerate.count_only, "print only the count");

    VerifyOptions verify;
    CLI::App* cmd_vf = app.add_subcommand("verify", "run verification sweeps");
    cmd_vf->add_option("--suite", verify.suite,
                       "equivalence|oracle|coefficients|counts|fixtures|limit|all")
        ->check(CLI::IsMember(
            {"equivalence", "oracle", "coefficients", "counts", "fixtures", "limit", "all"}));
    cmd_vf->add_option("--seed", verify.seed, "random seed");
    cmd_vf->add_option("--max-order", verify.max_order, "largest |n| in the sweeps");
    cmd_vf->add_option("--format", verify.format, "text|machine")
        ->check(CLI::IsMember({"text", "machine"}));

    try {
        app.parse(argc, argv);
        if (cmd_dd->parsed()) return cmd_divdiff(divdiff);
        if (cmd_dv->parsed()) return cmd_derivative(derivative);
        if (cmd_en->parsed()) return cmd_enumerate(enumerate);
        if (cmd_vf->parsed()) return cmd_verify(verify);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const SingularError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DuplicateYError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CoincidentNodesError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SolveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace impdiff
