#include "cli.hpp"

#include "bivirus/analysis.hpp"
#include "bivirus/csv.hpp"
#include "bivirus/dynamics.hpp"
#include "bivirus/graph.hpp"
#include "bivirus/random.hpp"
#include "bivirus/spectral.hpp"
#include "bivirus/sweep.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace bivirus::cli {

namespace fs = std::filesystem;

namespace {

struct Config {
    std::string graph_a;
    std::string graph_b;
    std::string rates1 = "linear:beta=1,delta=1";
    std::string rates2 = "linear:beta=1,delta=1";
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    double t_max = 1e4;
    double conv_tol = 1e-10;
    double eps = 1e-8;
    std::size_t samples = 16;
    std::size_t dfr_samples = 100;
    std::size_t starts = 1;
    std::string init = "random";
    std::size_t grid1 = 41;
    std::size_t grid2 = 41;
    std::string tau1_range;
    std::string tau2_range;
    unsigned threads = 0;
    double radius = 1e-4;
};

std::map<std::string, double> parse_params(const std::string& body, const std::string& spec) {
    std::map<std::string, double> params;
    std::stringstream in(body);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("rate spec '" + spec + "': expected key=value, got '" + item + "'");
        }
        const std::string key = item.substr(0, eq);
        try {
            params[key] = csv::parse_double(item.substr(eq + 1));
        } catch (const Error&) {
            throw ConfigError("rate spec '" + spec + "': bad value for '" + key + "'");
        }
    }
    return params;
}

double take(std::map<std::string, double>& params, const std::string& key, const std::string& spec) {
    const auto it = params.find(key);
    if (it == params.end()) {
        throw ConfigError("rate spec '" + spec + "' is missing '" + key + "'");
    }
    const double v = it->second;
    params.erase(it);
    return v;
}

Range parse_range(const std::string& text, const char* flag) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ConfigError(std::string(flag) + " expects lo:hi");
    }
    try {
        const Range r{csv::parse_double(text.substr(0, colon)), csv::parse_double(text.substr(colon + 1))};
        if (!(r.lo > 0.0 && r.hi > r.lo)) {
            throw ConfigError(std::string(flag) + " needs 0 < lo < hi");
        }
        return r;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error&) {
        throw ConfigError(std::string(flag) + " expects lo:hi");
    }
}

std::shared_ptr<const Graph> load_graph(const std::string& path) {
    return std::make_shared<const Graph>(load_edge_list(fs::path(path)));
}

struct Loaded {
    std::shared_ptr<const Graph> a;
    std::shared_ptr<const Graph> b;
    std::optional<BiVirusSystem> sys;
};

Loaded load_system(const Config& c) {
    Loaded l;
    l.a = load_graph(c.graph_a);
    l.b = load_graph(c.graph_b);
    auto [g, r] = parse_rates(c.rates1, l.a);
    auto [h, s] = parse_rates(c.rates2, l.b);
    l.sys.emplace(l.a, l.b, std::move(g), std::move(r), std::move(h), std::move(s));
    return l;
}

std::ofstream open_output(const Config& c, const std::string& name) {
    fs::create_directories(c.out_dir);
    const fs::path path = fs::path(c.out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error("cannot write " + path.string());
    }
    return f;
}

void write_metadata(const Config& c, const std::string& command) {
    auto f = open_output(c, "metadata.txt");
    f << "command=" << command << '\n'
      << "seed=" << c.seed << '\n'
      << "prng=" << Rng::kAlgorithm << '\n';
}

int cmd_spectra(const Config& c, std::ostream& out) {
    auto report = [&](const std::string& path, const char* name) {
        const auto g = load_graph(path);
        const auto pf = pf_eigen(g->adjacency());
        const auto d = degrees(*g);
        out << "lambda_" << name << '=' << csv::format_double(pf.value) << '\n'
            << "n_" << name << '=' << g->size() << '\n'
            << "edges_" << name << '=' << g->edge_count() << '\n'
            << "dmin_" << name << '=' << d.min << '\n'
            << "dmax_" << name << '=' << d.max << '\n';
    };
    report(c.graph_a, "A");
    if (!c.graph_b.empty()) {
        report(c.graph_b, "B");
    }
    return kOk;
}

void print_assumptions(std::ostream& out, const char* label, const AssumptionReport& rep) {
    out << label << ':';
    for (std::size_t k = 0; k < kAssumptionCount; ++k) {
        out << ' ' << to_string(static_cast<Assumption>(k)) << '='
            << (rep.passed[k] ? "pass" : "FAIL");
    }
    out << '\n';
    for (const auto& w : rep.witnesses) {
        out << "  witness " << to_string(w.id) << " sample=" << w.sample << " entry=(" << w.row
            << ',' << w.col << ',' << w.aux << ") value=" << csv::format_double(w.value) << '\n';
    }
}

int cmd_check(const Config& c, std::ostream& out) {
    AssumptionOptions opts;
    opts.samples = c.samples;
    opts.seed = c.seed;
    auto check_pair = [&](const std::string& graph, const std::string& rates, const char* label) {
        const auto g = load_graph(graph);
        const auto [f, q] = parse_rates(rates, g);
        print_assumptions(out, label, check_assumptions(f, q, opts));
        const auto dfr = check_dfr(q, c.dfr_samples);
        out << label << ": dfr=" << (dfr.satisfied ? "satisfied" : "violated")
            << " min_margin=" << csv::format_double(dfr.min_margin)
            << " argmin=" << csv::format_double(dfr.argmin) << '\n';
    };
    check_pair(c.graph_a, c.rates1, "virus1");
    if (!c.graph_b.empty()) {
        check_pair(c.graph_b, c.rates2, "virus2");
    }
    out << "a3_interpretation=sum_{j!=i} |dq_i/dx_j| < dq_i/dx_i\n";
    return kOk;
}

int cmd_classify(const Config& c, std::ostream& out) {
    const auto l = load_system(c);
    ClassifyOptions opts;
    opts.eps = c.eps;
    const auto v = classify(*l.sys, opts);
    {
        auto f = open_output(c, "verdict.csv");
        csv::write_verdict(f, v);
    }
    out << "outcome=" << to_string(v.outcome) << '\n'
        << "lambda_g0=" << csv::format_double(v.lambda_g0) << '\n'
        << "lambda_h0=" << csv::format_double(v.lambda_h0) << '\n'
        << "lambda_u=" << csv::format_double(v.lambda_u) << '\n'
        << "lambda_v=" << csv::format_double(v.lambda_v) << '\n';
    return kOk;
}

StateD initial_state(const Config& c, std::size_t n, Rng& rng) {
    if (c.init == "random") {
        return random_interior_state(n, rng);
    }
    if (c.init == "zero") {
        return StateD::zeros(n);
    }
    // "x=..,y=.." sets every node to the same pair.
    std::map<std::string, double> p = parse_params(c.init, c.init);
    const double x = take(p, "x", c.init);
    const double y = take(p, "y", c.init);
    if (!p.empty()) {
        throw ConfigError("--init: unknown key '" + p.begin()->first + "'");
    }
    StateD s{Vector::Constant(static_cast<Eigen::Index>(n), x),
             Vector::Constant(static_cast<Eigen::Index>(n), y)};
    if (!in_domain(s, 0.0)) {
        throw ConfigError("--init: state lies outside D");
    }
    return s;
}

int cmd_simulate(const Config& c, std::ostream& out) {
    const auto l = load_system(c);
    IntegratorOptions opts;
    opts.t_max = c.t_max;
    opts.conv_tol = c.conv_tol;
    Rng rng(c.seed);
    std::vector<Trajectory> trajs;
    for (std::size_t k = 0; k < c.starts; ++k) {
        const StateD s0 = initial_state(c, l.sys->size(), rng);
        trajs.push_back(integrate(*l.sys, s0, opts));
        auto f = open_output(c, "trajectory_" + std::to_string(k) + ".csv");
        csv::write_trajectory(f, trajs.back());
    }
    {
        auto f = open_output(c, "summary.csv");
        csv::write_summary(f, trajs);
    }
    write_metadata(c, "simulate");
    for (std::size_t k = 0; k < trajs.size(); ++k) {
        const auto& t = trajs[k];
        out << "start=" << k << " t_final=" << csv::format_double(t.final_time())
            << " avgX=" << csv::format_double(t.final_state().avg_x())
            << " avgY=" << csv::format_double(t.final_state().avg_y())
            << " reason=" << to_string(t.reason) << '\n';
    }
    return kOk;
}

int cmd_sweep(const Config& c, std::ostream& out) {
    const auto a = load_graph(c.graph_a);
    const auto b = load_graph(c.graph_b);
    const double la = pf_eigen(a->adjacency()).value;
    const double lb = pf_eigen(b->adjacency()).value;
    const Range r1 = c.tau1_range.empty() ? default_range(la) : parse_range(c.tau1_range, "--tau1-range");
    const Range r2 = c.tau2_range.empty() ? default_range(lb) : parse_range(c.tau2_range, "--tau2-range");
    SweepOptions opts;
    opts.eps = c.eps;
    opts.threads = c.threads;
    const auto tau2 = linspace(r2, c.grid2);
    const auto grid = sweep_linear(a, b, linspace(r1, c.grid1), tau2, opts);
    const auto curves = threshold_curves(a, b, tau2);
    {
        auto f = open_output(c, "regions.csv");
        csv::write_regions(f, grid);
    }
    {
        auto f = open_output(c, "curves.csv");
        csv::write_curves(f, curves);
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& cell : grid.cells) {
        ++counts[to_string(cell.region)];
    }
    for (const auto& [name, count] : counts) {
        out << name << '=' << count << '\n';
    }
    return kOk;
}

int cmd_bracket(const Config& c, std::ostream& out) {
    const auto l = load_system(c);
    ClassifyOptions copts;
    copts.eps = c.eps;
    const auto v = classify(*l.sys, copts);
    BracketOptions bopts;
    bopts.r = c.radius;
    const auto br = bracket_coexistence(*l.sys, v, bopts);
    {
        auto f = open_output(c, "bracket.csv");
        csv::write_bracket(f, br);
    }
    out << "outcome=" << to_string(v.outcome) << '\n'
        << "lower_avgX=" << csv::format_double(br.lower.avg_x())
        << " lower_avgY=" << csv::format_double(br.lower.avg_y()) << '\n'
        << "upper_avgX=" << csv::format_double(br.upper.avg_x())
        << " upper_avgY=" << csv::format_double(br.upper.avg_y()) << '\n';
    return kOk;
}

}  // namespace

std::pair<RateModel, RateModel> parse_rates(const std::string& spec,
                                            std::shared_ptr<const Graph> graph) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("rate spec '" + spec + "' needs the form kind:key=value,...");
    }
    const std::string kind = spec.substr(0, colon);
    auto params = parse_params(spec.substr(colon + 1), spec);
    const auto n = graph->size();
    std::optional<std::pair<RateModel, RateModel>> out;
    try {
        if (kind == "linear") {
            const double beta = take(params, "beta", spec);
            const double delta = take(params, "delta", spec);
            out.emplace(RateModel::linear_infection(graph, beta), RateModel::linear_recovery(n, delta));
        } else if (kind == "case2") {
            const double alpha = take(params, "alpha", spec);
            const double delta = take(params, "delta", spec);
            out.emplace(RateModel::log_infection(graph, alpha), RateModel::linear_recovery(n, delta));
        } else if (kind == "case3") {
            const double alpha = take(params, "alpha", spec);
            const double k = take(params, "k", spec);
            out.emplace(RateModel::log_infection(graph, alpha), RateModel::poly_recovery(n, k));
        } else {
            throw ConfigError("unknown rate kind '" + kind + "' (expected linear, case2 or case3)");
        }
    } catch (const RateError& e) {
        throw ConfigError("rate spec '" + spec + "': " + e.what());
    }
    if (!params.empty()) {
        throw ConfigError("rate spec '" + spec + "': unknown key '" + params.begin()->first + "'");
    }
    return std::move(*out);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Config c;
    CLI::App app{"Bi-virus SIS epidemics on overlaid graphs"};
    app.require_subcommand(1);

    auto graph_a = [&](CLI::App* sub) {
        sub->add_option("--graph-a", c.graph_a, "edge list of graph A")->required()->check(CLI::ExistingFile);
    };
    auto graph_b = [&](CLI::App* sub, bool required) {
        auto* o = sub->add_option("--graph-b", c.graph_b, "edge list of graph B")->check(CLI::ExistingFile);
        if (required) {
            o->required();
        }
    };
    auto rates = [&](CLI::App* sub) {
        sub->add_option("--rates1", c.rates1, "virus 1 rates, e.g. linear:beta=1,delta=1")->capture_default_str();
        sub->add_option("--rates2", c.rates2, "virus 2 rates, e.g. case3:alpha=2,k=2")->capture_default_str();
    };
    auto out_dir = [&](CLI::App* sub) {
        sub->add_option("--out", c.out_dir, "output directory")->capture_default_str();
    };
    auto eps = [&](CLI::App* sub) {
        sub->add_option("--eps", c.eps, "classification tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    };

    auto* spectra = app.add_subcommand("spectra", "spectral radius and degree range of the graphs");
    graph_a(spectra);
    graph_b(spectra, false);

    auto* check = app.add_subcommand("check-assumptions", "sample the rate assumptions and the DFR condition");
    graph_a(check);
    graph_b(check, false);
    rates(check);
    check->add_option("--samples", c.samples, "sample points")->capture_default_str()->check(CLI::PositiveNumber);
    check->add_option("--dfr-samples", c.dfr_samples, "DFR grid size")->capture_default_str()->check(CLI::PositiveNumber);
    check->add_option("--seed", c.seed, "sampling seed")->capture_default_str();

    auto* cls = app.add_subcommand("classify", "classify the long-run outcome");
    graph_a(cls);
    graph_b(cls, true);
    rates(cls);
    out_dir(cls);
    eps(cls);

    auto* sim = app.add_subcommand("simulate", "integrate trajectories");
    graph_a(sim);
    graph_b(sim, true);
    rates(sim);
    out_dir(sim);
    sim->add_option("--t-max", c.t_max, "time horizon")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--conv-tol", c.conv_tol, "stop when the field max-norm drops below this (0 disables)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sim->add_option("--starts", c.starts, "number of initial points")->capture_default_str()->check(CLI::Range(1, 100000));
    sim->add_option("--init", c.init, "random, zero, or x=..,y=..")->capture_default_str();
    sim->add_option("--seed", c.seed, "seed for random initial points")->capture_default_str();

    auto* sw = app.add_subcommand("sweep", "region map of the (tau1, tau2) plane for linear rates");
    graph_a(sw);
    graph_b(sw, true);
    out_dir(sw);
    eps(sw);
    sw->add_option("--tau1-range", c.tau1_range, "lo:hi (default 0.5/lambda(A):4/lambda(A))");
    sw->add_option("--tau2-range", c.tau2_range, "lo:hi (default 0.5/lambda(B):4/lambda(B))");
    sw->add_option("--grid1", c.grid1, "tau1 points")->capture_default_str()->check(CLI::Range(2, 100000));
    sw->add_option("--grid2", c.grid2, "tau2 points")->capture_default_str()->check(CLI::Range(2, 100000));
    sw->add_option("--threads", c.threads, "worker threads (0: all cores)")->capture_default_str();

    auto* br = app.add_subcommand("bracket", "bracket the coexistence equilibria");
    graph_a(br);
    graph_b(br, true);
    rates(br);
    out_dir(br);
    eps(br);
    br->add_option("--r", c.radius, "perturbation radius in (0, 1e-3]")->capture_default_str()->check(CLI::Range(1e-12, 1e-3));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kConfigError;
    }

    try {
        if (spectra->parsed()) return cmd_spectra(c, out);
        if (check->parsed()) return cmd_check(c, out);
        if (cls->parsed()) return cmd_classify(c, out);
        if (sim->parsed()) return cmd_simulate(c, out);
        if (sw->parsed()) return cmd_sweep(c, out);
        if (br->parsed()) return cmd_bracket(c, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kModuleError;
    }
    return kConfigError;
}

}  // namespace bivirus::cli
