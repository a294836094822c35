#include "sigtree/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sigtree/cc_norm.hpp"
#include "sigtree/errors.hpp"
#include "sigtree/free_lie.hpp"
#include "sigtree/inverse_system.hpp"
#include "sigtree/json_io.hpp"
#include "sigtree/kernels.hpp"
#include "sigtree/limit_space.hpp"
#include "sigtree/signature.hpp"

namespace sigtree::cli {

namespace {

using nlohmann::json;
namespace sj = sigtree::json;

enum class Verb { none, sig, logsig, lift, reduce, dist, ccnorm, remark, right_translation, tree_axioms,
                  geodesic, system_check, system_limit, system_counterexample };

struct Options {
    int dim = 2;
    int step = 2;
    int segments = 0;
    int starts = 8;
    std::uint64_t seed = 1;
    double tol = 1e-6;
    std::string out;
    std::string format;  // empty: the verb's default

    std::vector<std::string> inputs;
    int samples = 10;
    std::string base;
    std::string trace;
    std::vector<int> n_values = {1, 2, 4, 8, 16};
    int count = 32;
    int quadruples = 1000;
    int triples = 1000;
    int max_segments = 5;
    std::vector<int> steps = {2, 3, 4};
    double radius = 1.0;
    std::size_t levels = 5;
    bool step_given = false;
    bool dim_given = false;
};

std::string num(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

std::string read_text(const std::string& path, std::istream& in) {
    std::ostringstream ss;
    if (path == "-") {
        ss << in.rdbuf();
    } else {
        std::ifstream f(path);
        if (!f) throw ParseError("cannot open " + path);
        ss << f.rdbuf();
    }
    return ss.str();
}

json read_json(const std::string& path, std::istream& in) { return sj::parse(read_text(path, in)); }

bool is_tensor_json(const json& j) { return j.is_object() && j.contains("levels"); }

PLPath read_path(const std::string& path, std::istream& in, const Options& o) {
    PLPath p = sj::path_from_json(read_json(path, in));
    if (o.dim_given && p.dim() != o.dim)
        throw ShapeError("path dimension " + std::to_string(p.dim()) + " does not match --dim " +
                         std::to_string(o.dim));
    return p;
}

void check_step(const Options& o) {
    if (o.step < 1) throw DomainError("--step must be >= 1");
}

// Group element from path JSON (its signature) or tensor JSON (as given).
GroupElement read_element(const std::string& path, std::istream& in, const Options& o) {
    const json j = read_json(path, in);
    if (is_tensor_json(j)) {
        auto t = sj::tensor_from_json(j);
        if (o.step_given && t.step() != o.step) t = project(t, o.step);
        return GroupElement::from_tensor(std::move(t));
    }
    check_step(o);
    return signature(sj::path_from_json(j), o.step);
}

CCNormOptions optimizer_options(const Options& o) {
    CCNormOptions c;
    c.segments = o.segments;
    c.starts = o.starts;
    c.seed = o.seed;
    c.tolerance = o.tol;
    return c;
}

std::string trace_csv(const OptimizerReport& r) {
    std::ostringstream s;
    s << "start_index,mu,length,violation\n";
    for (const auto& row : r.trace)
        s << row.start_index << ',' << num(row.mu) << ',' << num(row.length) << ',' << num(row.violation) << '\n';
    return s.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write " + path);
    f << text;
}

struct Output {
    std::string text;
    std::string summary;
    bool converged = true;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Output do_sig(const Options& o, std::istream& in) {
    check_step(o);
    const auto p = read_path(o.inputs.at(0), in, o);
    const auto g = signature(p, o.step);
    return {dump(sj::tensor_to_json(g.tensor())),
            "signature: dim " + std::to_string(p.dim()) + ", step " + std::to_string(o.step) + ", " +
                std::to_string(p.segment_count()) + " segments, residual " + num(g.membership_residual())};
}

Output do_logsig(const Options& o, std::istream& in) {
    const auto g = read_element(o.inputs.at(0), in, o);
    const auto basis = lyndon_basis(g.dim(), g.step());
    const auto coords = basis->log_signature(g.tensor());
    std::string summary = "log-signature: " + std::to_string(basis->words().size()) + " Lyndon coordinates, residual " +
                          num(coords.residual);
    if (coords.residual > kMembershipTol) summary += " (input is not a group element)";
    return {dump(sj::logsig_to_json(*basis, coords)), summary};
}

Output do_lift(const Options& o, std::istream& in) {
    check_step(o);
    const auto p = read_path(o.inputs.at(0), in, o);
    if (o.samples < 1) throw DomainError("--samples must be >= 1");
    GroupElement g = o.base.empty() ? GroupElement::from_tensor(segment_exp(p.start(), o.step))
                                    : GroupElement::from_tensor(sj::tensor_from_json(read_json(o.base, in)));
    const bool anchored = o.base.empty();
    const auto samples = lift(p, g, o.samples, anchored);
    json arr = json::array();
    for (const auto& s : samples) arr.push_back({{"t", s.t}, {"value", sj::tensor_to_json(s.value.tensor())}});
    return {dump({{"samples", arr}}), "lift: " + std::to_string(samples.size()) + " samples at step " +
                                          std::to_string(o.step)};
}

Output do_reduce(const Options& o, std::istream& in) {
    const auto p = read_path(o.inputs.at(0), in, o);
    const auto r = tree_reduce(p);
    return {dump(sj::path_to_json(r)), "reduce: " + std::to_string(p.segment_count()) + " -> " +
                                             std::to_string(r.segment_count()) + " segments, length " +
                                             num(p.length()) + " -> " + num(r.length())};
}

Output do_dist(const Options& o, std::istream& in) {
    if (o.inputs.size() != 2) throw DomainError("dist needs two path files");
    const auto x = LimitElement::from_path(read_path(o.inputs[0], in, o));
    const auto y = LimitElement::from_path(read_path(o.inputs[1], in, o));
    if (x.dim() != y.dim()) throw ShapeError("dist: dimension mismatch");
    const double d = d_infinity(x, y);
    Output r;
    r.summary = "d_inf = " + num(d);
    if (o.format == "csv")
        r.text = "d_inf\n" + num(d) + "\n";
    else
        r.text = dump({{"d_inf", d}});
    return r;
}

Output do_ccnorm(const Options& o, std::istream& in) {
    const auto g = read_element(o.inputs.at(0), in, o);
    const auto est = cc_norm(g, optimizer_options(o));
    const auto& rep = est.report;
    const std::string csv = trace_csv(rep);
    if (!o.trace.empty()) write_file(o.trace, csv);
    Output r;
    r.converged = rep.converged;
    r.summary = "cc norm in [" + num(est.lower) + ", " + num(est.upper) + "], violation " + num(rep.violation) +
                ", best start " + std::to_string(rep.best_start) + (rep.converged ? "" : " (NOT converged)");
    if (o.format == "csv") {
        r.text = csv;
    } else {
        r.text = dump({{"lower", est.lower},
                       {"upper", est.upper},
                       {"violation", rep.violation},
                       {"converged", rep.converged},
                       {"iterations", rep.iterations},
                       {"best_start", rep.best_start},
                       {"witness", sj::path_to_json(est.witness)}});
    }
    return r;
}

Output do_remark(const Options& o) {
    const int max_step = o.step_given ? o.step : 4;
    const auto rep = remark_experiment(o.n_values, max_step);
    std::vector<double> limit_lower;
    for (int k = 1; k <= max_step; ++k) limit_lower.push_back(certified_lower_bound(signature(remark_limit_path(), k).tensor()));
    Output r;
    if (o.format == "json") {
        json rows = json::array();
        for (const auto& row : rep.rows) rows.push_back({{"n", row.n}, {"d_inf", row.d_inf}, {"lower", row.level_lower}});
        r.text = dump({{"rows", rows}, {"limit", {{"d_inf", rep.limit_d_inf}, {"lower", limit_lower}}}});
    } else {
        std::ostringstream s;
        s << "n,d_inf";
        for (int k = 1; k <= max_step; ++k) s << ",d" << k << "_lower";
        s << '\n';
        for (const auto& row : rep.rows) {
            s << row.n << ',' << num(row.d_inf);
            for (double l : row.level_lower) s << ',' << num(l);
            s << '\n';
        }
        s << "inf," << num(rep.limit_d_inf);
        for (double l : limit_lower) s << ',' << num(l);
        s << '\n';
        r.text = s.str();
    }
    r.summary = "remark: " + std::to_string(rep.rows.size()) + " paths, limit path d_inf = " + num(rep.limit_d_inf);
    return r;
}

Output do_right_translation(const Options& o) {
    if (o.count < 1) throw DomainError("--count must be >= 1");
    const auto g = LimitElement::from_path(PLPath::from_vertices({{0.0, 0.0}, {0.0, 1.0}}));
    const auto ys = shrinking_segments(o.count);
    const auto rows = right_translation_experiment(g, ys);
    Output r;
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& row : rows)
            arr.push_back({{"n", row.n}, {"d_y_identity", row.d_y_identity}, {"d_right", row.d_right},
                           {"d_left", row.d_left}});
        r.text = dump(arr);
    } else {
        std::ostringstream s;
        s << "n,d_y_identity,d_right,d_left\n";
        for (const auto& row : rows)
            s << row.n << ',' << num(row.d_y_identity) << ',' << num(row.d_right) << ',' << num(row.d_left) << '\n';
        r.text = s.str();
    }
    r.summary = "right translation: at n = " + std::to_string(rows.back().n) + ", d(y_n, 1) = " +
                num(rows.back().d_y_identity) + " but d(y_n g, g) = " + num(rows.back().d_right);
    return r;
}

Output do_tree_axioms(const Options& o) {
    const auto rep = tree_axioms_experiment(o.dim, o.quadruples, o.triples, o.max_segments, o.seed);
    Output r;
    if (o.format == "json") {
        r.text = dump({{"quadruples", rep.quadruples},
                       {"triples", rep.triples},
                       {"four_point_failures", rep.four_point_failures},
                       {"metric_failures", rep.metric_failures},
                       {"max_four_point_excess", rep.max_four_point_excess},
                       {"max_triangle_excess", rep.max_triangle_excess}});
    } else {
        r.text = "quadruples,triples,four_point_failures,metric_failures,max_four_point_excess,max_triangle_excess\n" +
                 std::to_string(rep.quadruples) + ',' + std::to_string(rep.triples) + ',' +
                 std::to_string(rep.four_point_failures) + ',' + std::to_string(rep.metric_failures) + ',' +
                 num(rep.max_four_point_excess) + ',' + num(rep.max_triangle_excess) + '\n';
    }
    r.summary = "tree axioms: " + std::to_string(rep.four_point_failures) + " four-point and " +
                std::to_string(rep.metric_failures) + " metric failures";
    return r;
}

Output do_geodesic(const Options& o, std::istream& in) {
    const PLPath p = o.inputs.empty() ? PLPath::from_vertices({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}})
                                      : tree_reduce(read_path(o.inputs[0], in, o));
    const auto rows = geodesic_projection_experiment(p, o.steps, optimizer_options(o));
    Output r;
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& row : rows)
            arr.push_back({{"step", row.step}, {"witness_length", row.witness_length}, {"deviation", row.deviation},
                           {"violation", row.violation}, {"converged", row.converged},
                           {"witness", sj::path_to_json(row.witness)}});
        r.text = dump(arr);
    } else {
        std::ostringstream s;
        s << "step,witness_length,deviation,violation,converged\n";
        for (const auto& row : rows)
            s << row.step << ',' << num(row.witness_length) << ',' << num(row.deviation) << ','
              << num(row.violation) << ',' << (row.converged ? 1 : 0) << '\n';
        r.text = s.str();
    }
    for (const auto& row : rows) r.converged = r.converged && row.converged;
    r.summary = "geodesic projections for " + std::to_string(rows.size()) + " steps";
    return r;
}

json certificate_json(const SubmetryResult& s) {
    if (s.is_submetry) return {{"is_submetry", true}};
    const auto& c = *s.certificate;
    return {{"is_submetry", false},
            {"certificate",
             {{"reason", c.reason}, {"x", c.x}, {"x_prime", c.x_prime}, {"y", c.y}, {"y_prime", c.y_prime},
              {"required", c.required}, {"best", c.best}}}};
}

json violation_json(const ChainViolation& v) {
    return {{"kind", v.kind}, {"level", v.level}, {"points", v.points}, {"domain_distance", v.domain_distance},
            {"codomain_distance", v.codomain_distance}, {"message", v.message}};
}

Output do_system_check(const Options& o, std::istream& in) {
    const auto chain = sj::chain_from_json(read_json(o.inputs.at(0), in));
    const auto rep = validate_chain(chain);
    json viol = json::array();
    for (const auto& v : rep.violations) viol.push_back(violation_json(v));
    json sub = json::array();
    if (rep.valid())
        for (std::size_t i = 0; i < chain.maps.size(); ++i)
            sub.push_back(certificate_json(is_submetry(chain.maps[i], chain.spaces[i + 1], chain.spaces[i])));
    Output r;
    r.text = dump({{"valid", rep.valid()}, {"violations", viol}, {"submetries", sub}});
    r.summary = rep.valid() ? "chain valid (" + std::to_string(chain.levels()) + " levels)"
                            : "chain invalid: " + std::to_string(rep.violations.size()) + " violations";
    return r;
}

json limit_json(const FiniteLimit& lim) {
    json j = sj::space_to_json(lim.space);
    j["threads"] = lim.threads;
    j["stabilizes_at"] = lim.stabilizes_at ? json(*lim.stabilizes_at + 1) : json(nullptr);
    return j;
}

Output do_system_limit(const Options& o, std::istream& in) {
    const auto chain = sj::chain_from_json(read_json(o.inputs.at(0), in));
    const auto lim = finite_inverse_limit(chain, o.radius);
    return {dump(limit_json(lim)), "finite limit: " + std::to_string(lim.space.size()) + " threads within radius " +
                                       num(o.radius)};
}

Output do_system_counterexample(const Options& o) {
    if (o.levels < 2) throw DomainError("--levels must be >= 2");
    const std::size_t n = o.levels;
    const std::size_t m = n - 1;
    const auto chain = counterexample_chain(n);
    const auto y = counterexample_receiver(m, 2.0);
    const auto y_prime = counterexample_receiver(m, 1.5);
    const auto family = counterexample_family(m, n);
    const auto lim = finite_inverse_limit(chain, o.radius);

    json fam = json::array();
    for (std::size_t i = 0; i < family.size(); ++i) {
        fam.push_back({{"map", family[i]},
                       {"Y", certificate_json(is_submetry(family[i], y, chain.spaces[i]))},
                       {"Y_prime", certificate_json(is_submetry(family[i], y_prime, chain.spaces[i]))}});
    }
    const auto u = universal_map(chain, lim, y, family);
    json uj = {{"ok", u.ok()}, {"unique", u.unique}, {"lipschitz", u.lipschitz}, {"base_preserving", u.base_preserving}};
    if (u.ok()) {
        uj["map"] = u.map;
        uj["submetry"] = certificate_json(is_submetry(u.map, y, lim.space));
    }
    Output r;
    r.text = dump({{"chain", sj::chain_to_json(chain)},
                   {"chain_valid", validate_chain(chain).valid()},
                   {"Y", sj::space_to_json(y)},
                   {"Y_prime", sj::space_to_json(y_prime)},
                   {"family", fam},
                   {"limit", limit_json(lim)},
                   {"universal_map", uj}});
    r.summary = "counterexample: " + std::to_string(n) + " levels, receiver size " + std::to_string(y.size());
    return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    if (const char* t = std::getenv("SIGTREE_THREADS")) kernels::set_threads(std::atoi(t));

    Options o;
    Verb verb = Verb::none;
    CLI::App app{"Truncated signatures, CC norms and the tree metric of the limit space", "sigtree"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--dim", o.dim, "Ambient dimension n (validates inputs; tree-axioms samples)")->capture_default_str();
    app.add_option("--step", o.step, "Truncation step k (remark: largest level, default 4)")->capture_default_str();
    app.add_option("--segments", o.segments, "Optimizer segments m (0 selects 2k+4)")->capture_default_str();
    app.add_option("--starts", o.starts, "Optimizer multistarts")->capture_default_str();
    app.add_option("--seed", o.seed, "Seed for optimizer starts and random samples")->capture_default_str();
    app.add_option("--tol", o.tol, "Required constraint violation of optimizer witnesses")->capture_default_str();
    app.add_option("--out", o.out, "Write machine-readable output to a file instead of stdout");
    app.add_option("--format", o.format, "Output format (default json; csv for experiments)")
        ->check(CLI::IsMember({"json", "csv"}));

    auto input = [&](CLI::App* sub, const char* what) {
        sub->add_option("input", o.inputs, what)->required()->expected(1);
    };
    auto on = [&](CLI::App* sub, Verb v) { sub->callback([&verb, v] { verb = v; }); };

    auto* sig = app.add_subcommand("sig", "Step-k signature of a path (tensor JSON)");
    input(sig, "Path JSON ('-' for stdin)");
    on(sig, Verb::sig);

    auto* logsig = app.add_subcommand("logsig", "Lyndon coordinates of log S_k (path or tensor JSON)");
    input(logsig, "Path or tensor JSON ('-' for stdin)");
    on(logsig, Verb::logsig);

    auto* lft = app.add_subcommand("lift", "Horizontal lift g * S_k(p)_{0,t} at t = i/samples");
    input(lft, "Path JSON ('-' for stdin)");
    lft->add_option("--samples", o.samples, "Number of sample intervals")->capture_default_str();
    lft->add_option("--base", o.base, "Tensor JSON for g (default exp(start of the path))");
    on(lft, Verb::lift);

    auto* red = app.add_subcommand("reduce", "Tree-reduce a path");
    input(red, "Path JSON ('-' for stdin)");
    on(red, Verb::reduce);

    auto* dst = app.add_subcommand("dist", "Tree distance d_inf between two paths");
    dst->add_option("inputs", o.inputs, "Two path JSON files")->required()->expected(2);
    on(dst, Verb::dist);

    auto* cc = app.add_subcommand("ccnorm", "Bounds on the CC norm of S_k(path) or of a tensor");
    input(cc, "Path or tensor JSON ('-' for stdin)");
    cc->add_option("--trace", o.trace, "Write the convergence trace CSV here");
    on(cc, Verb::ccnorm);

    auto* exp = app.add_subcommand("experiment", "Numerical experiments (CSV by default)");
    exp->require_subcommand(1);
    auto* rem = exp->add_subcommand("remark", "d_inf of the hinged paths and their level lower bounds");
    rem->add_option("--n", o.n_values, "Values of n")->delimiter(',')->capture_default_str();
    on(rem, Verb::remark);
    auto* rt = exp->add_subcommand("right-translation", "Shrinking segments under left and right translation");
    rt->add_option("--count", o.count, "Largest n")->capture_default_str();
    on(rt, Verb::right_translation);
    auto* ta = exp->add_subcommand("tree-axioms", "Four-point and metric checks on random elements");
    ta->add_option("--quadruples", o.quadruples)->capture_default_str();
    ta->add_option("--triples", o.triples)->capture_default_str();
    ta->add_option("--max-segments", o.max_segments)->capture_default_str();
    on(ta, Verb::tree_axioms);
    auto* geo = exp->add_subcommand("geodesic", "CC geodesic witnesses versus a reduced path (default: L-path)");
    geo->add_option("input", o.inputs, "Path JSON")->expected(0, 1);
    geo->add_option("--steps", o.steps, "Steps k")->delimiter(',')->capture_default_str();
    on(geo, Verb::geodesic);

    auto* sys = app.add_subcommand("system", "Finite inverse systems");
    sys->require_subcommand(1);
    auto* chk = sys->add_subcommand("check", "Validate a chain and test each bonding map for submetry");
    input(chk, "Chain JSON");
    on(chk, Verb::system_check);
    auto* lim = sys->add_subcommand("limit", "Threads of a chain within a radius");
    input(lim, "Chain JSON");
    lim->add_option("--radius", o.radius)->capture_default_str();
    on(lim, Verb::system_limit);
    auto* ce = sys->add_subcommand("counterexample", "Built-in submetry counterexample fixtures");
    ce->add_option("--levels", o.levels, "Chain length N (receivers use N-1)")->capture_default_str();
    ce->add_option("--radius", o.radius)->capture_default_str();
    on(ce, Verb::system_counterexample);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    o.step_given = app.get_option("--step")->count() > 0;
    o.dim_given = app.get_option("--dim")->count() > 0;

    const bool experiment = verb == Verb::remark || verb == Verb::right_translation || verb == Verb::tree_axioms ||
                            verb == Verb::geodesic;
    if (o.format.empty()) o.format = experiment ? "csv" : "json";

    try {
        Output r;
        switch (verb) {
            case Verb::sig: r = do_sig(o, in); break;
            case Verb::logsig: r = do_logsig(o, in); break;
            case Verb::lift: r = do_lift(o, in); break;
            case Verb::reduce: r = do_reduce(o, in); break;
            case Verb::dist: r = do_dist(o, in); break;
            case Verb::ccnorm: r = do_ccnorm(o, in); break;
            case Verb::remark: r = do_remark(o); break;
            case Verb::right_translation: r = do_right_translation(o); break;
            case Verb::tree_axioms: r = do_tree_axioms(o); break;
            case Verb::geodesic: r = do_geodesic(o, in); break;
            case Verb::system_check: r = do_system_check(o, in); break;
            case Verb::system_limit: r = do_system_limit(o, in); break;
            case Verb::system_counterexample: r = do_system_counterexample(o); break;
            case Verb::none: err << app.help(); return kExitInvalid;
        }
        if (o.out.empty())
            out << r.text;
        else
            write_file(o.out, r.text);
        err << r.summary << '\n';
        return r.converged ? kExitOk : kExitNotConverged;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
}

}  // namespace sigtree::cli
