#include "adapted_ot/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "adapted_ot/acceptance.hpp"
#include "adapted_ot/errors.hpp"
#include "adapted_ot/estimate.hpp"
#include "adapted_ot/io.hpp"
#include "adapted_ot/lattice.hpp"
#include "adapted_ot/sde.hpp"
#include "adapted_ot/transport.hpp"

#ifndef ADAPTED_OT_VERSION
#define ADAPTED_OT_VERSION "0.0.0"
#endif
#ifndef ADAPTED_OT_REVISION
#define ADAPTED_OT_REVISION "unknown"
#endif

namespace aot::cli {

using io::json;

std::string sidecar_path(const std::string& output) { return output + ".meta.json"; }

namespace {

struct Common {
    std::uint64_t seed = 1;
    int substeps = 16;
    int threads = 0;
    std::string out;
};

struct SimulateOpts {
    std::string drift = "kind=constant,c=0";
    std::string vol = "kind=constant,c=1";
    double x0 = 0.0;
    int n_steps = 64;
    std::string scheme = "monotone-em";
    double trunc_k = 4.0;
    std::int64_t samples = 10;
};

struct LatticeOpts {
    std::string drift = "kind=constant,c=0";
    std::string vol = "kind=constant,c=1";
    double x0 = 0.0;
    int n_steps = 8;
    int atoms = 5;
    int max_support = 40;
    double trunc_k = 4.0;
};

struct AwOpts {
    std::string lattice_x;
    std::string lattice_y;
    double p = 2.0;
    bool scaled = false;
};

struct MetricsOpts {
    std::string tree_mu;
    std::string tree_nu;
    double p = 2.0;
};

struct PairOpts {
    std::string preset;
    std::string drift_x;
    std::string vol_x;
    std::string drift_y;
    std::string vol_y;
    double x0 = 0.0;
};

struct RhoScanOpts {
    std::string rho = "-1,-0.5,0,0.5,0.9,1";
    int n_steps = 64;
    double p = 2.0;
    std::int64_t samples = 20000;
    std::string scheme = "monotone-em";
    double trunc_k = 4.0;
};

struct ConvergenceOpts {
    std::string n_list = "2,4,8,16";
    double p = 2.0;
    int atoms = 5;
    int max_support = 40;
    double trunc_k = 4.0;
    std::int64_t samples = 20000;
};

struct StabilityOpts {
    std::string kind = "drift";
    int max_level = 6;
    int n_steps = 64;
    double p = 2.0;
    std::int64_t samples = 20000;
    double radius = 64.0;
};

struct CounterexampleOpts {
    double C = 5.0;
    double h_sw = 0.1;
    int n_steps = 100;
    double p = 2.0;
    std::int64_t samples = 100000;
};

struct SelftestOpts {
    bool quick = false;
};

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(what + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw ConfigError(what + " is empty");
    return out;
}

std::vector<int> parse_ints(const std::string& text, const std::string& what) {
    std::vector<int> out;
    for (double v : parse_doubles(text, what)) {
        if (v != std::floor(v)) throw ConfigError(what + ": " + io::format_double(v) + " is not an integer");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::pair<SdeSpec, SdeSpec> resolve_pair(const PairOpts& o) {
    const bool explicit_coefs = !o.drift_x.empty() || !o.vol_x.empty() || !o.drift_y.empty() || !o.vol_y.empty();
    if (!o.preset.empty()) {
        if (explicit_coefs) throw ConfigError("--preset cannot be combined with coefficient flags");
        const Preset& p = find_preset(o.preset);
        return {p.x, p.y};
    }
    if (o.drift_x.empty() || o.vol_x.empty() || o.drift_y.empty() || o.vol_y.empty()) {
        throw ConfigError("give --preset or all of --drift-x, --vol-x, --drift-y, --vol-y");
    }
    SdeSpec x{io::parse_coefficient(o.drift_x, CoefficientRole::drift),
              io::parse_coefficient(o.vol_x, CoefficientRole::diffusion), o.x0};
    SdeSpec y{io::parse_coefficient(o.drift_y, CoefficientRole::drift),
              io::parse_coefficient(o.vol_y, CoefficientRole::diffusion), o.x0};
    return {x, y};
}

McConfig mc_from(const Common& c, int n_steps, double p, std::int64_t samples, const std::string& scheme,
                 double trunc_k) {
    McConfig m;
    m.n_steps = n_steps;
    m.p = p;
    m.n_samples = samples;
    m.scheme = parse_scheme(scheme);
    m.trunc_k = trunc_k;
    m.substeps = c.substeps;
    m.seed = c.seed;
    m.threads = c.threads;
    return m;
}

// Resolved option values of the selected subcommand, in declaration order.
std::vector<std::pair<std::string, std::string>> resolved_options(const CLI::App* sub) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help") continue;
        if (opt->get_type_size() == 0) {
            if (opt->count() > 0) out.emplace_back(name, "true");
            continue;
        }
        std::string value;
        if (opt->count() > 0) {
            value = opt->results().back();
        } else {
            value = opt->get_default_str();
        }
        if (!value.empty()) out.emplace_back(name, value);
    }
    return out;
}

class Sidecar {
public:
    Sidecar(const std::string& program, const CLI::App* sub) {
        doc_["tool"] = "adapted-ot";
        doc_["version"] = ADAPTED_OT_VERSION;
        doc_["revision"] = ADAPTED_OT_REVISION;
        doc_["command"] = sub->get_name();
        json cmd = json::array({program, sub->get_name()});
        json config = json::object();
        for (const auto& [name, value] : resolved_options(sub)) {
            config[name] = value;
            if (value == "true" && sub->get_option("--" + name)->get_type_size() == 0) {
                cmd.push_back("--" + name);
            } else {
                cmd.push_back("--" + name + "=" + value);
            }
        }
        doc_["config"] = config;
        doc_["command_line"] = cmd;
        if (config.contains("seed")) doc_["seed"] = std::stoull(config["seed"].get<std::string>());
        doc_["outputs"] = json::array();
    }

    json& results() { return doc_["results"]; }

    void write(const std::string& output) {
        doc_["outputs"].push_back(output);
        io::write_json_file(sidecar_path(output), doc_);
    }

private:
    json doc_;
};

std::string d(double v) { return io::format_double(v); }

// ---------------------------------------------------------------------------

int cmd_simulate(const Common& c, const SimulateOpts& o, Sidecar& meta) {
    const SdeSpec s{io::parse_coefficient(o.drift, CoefficientRole::drift),
                    io::parse_coefficient(o.vol, CoefficientRole::diffusion), o.x0};
    const McConfig mc = mc_from(c, o.n_steps, 2.0, o.samples, o.scheme, o.trunc_k);
    const TimeGrid grid(o.n_steps);
    const double A = mc.scheme == Scheme::em ? std::numeric_limits<double>::infinity()
                                             : truncation_level(grid.h(), o.trunc_k);
    std::optional<ZvonkinTransform> transform;
    if (mc.scheme == Scheme::zvonkin_em) transform.emplace(s.drift, s.vol, s.x0);
    std::vector<SamplePath> paths(static_cast<std::size_t>(o.samples));
    parallel_for(o.samples, c.threads, [&](std::int64_t i) {
        RandomStream rng(c.seed, static_cast<std::uint64_t>(i));
        std::vector<double> inc(static_cast<std::size_t>(o.n_steps));
        for (double& v : inc) {
            const TruncatedIncrement t = sample_truncated_increment(grid.h(), A, c.substeps, rng);
            v = mc.scheme == Scheme::em ? t.unstopped : t.value;
        }
        auto& out = paths[static_cast<std::size_t>(i)];
        switch (mc.scheme) {
            case Scheme::em:
                out = euler_maruyama(s.drift, s.vol, grid, s.x0, inc);
                break;
            case Scheme::monotone_em:
                out = monotone_em(s.drift, s.vol, grid, o.trunc_k, s.x0, inc);
                break;
            case Scheme::zvonkin_em:
                out = transformed_monotone_em(*transform, grid, o.trunc_k, s.x0, inc);
                break;
        }
    });
    io::CsvWriter csv(c.out, {"replicate", "t", "value"});
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (int k = 0; k <= o.n_steps; ++k) {
            csv.row({std::to_string(i), d(grid.time(k)), d(paths[i].values[static_cast<std::size_t>(k)])});
        }
    }
    csv.close();
    meta.write(c.out);
    std::cout << "wrote " << paths.size() << " paths to " << c.out << '\n';
    return kExitOk;
}

int cmd_lattice(const Common& c, const LatticeOpts& o, Sidecar& meta) {
    LatticeConfig lc;
    lc.n_steps = o.n_steps;
    lc.atoms = o.atoms;
    lc.max_support = o.max_support;
    lc.trunc_k = o.trunc_k;
    lc.x0 = o.x0;
    const MarkovLattice lattice = build_lattice(io::parse_coefficient(o.drift, CoefficientRole::drift),
                                                io::parse_coefficient(o.vol, CoefficientRole::diffusion), lc);
    io::write_json_file(c.out, io::lattice_to_json(lattice));
    const FosdReport rep = check_fosd(lattice);
    meta.results()["fosd_certified"] = rep.certified;
    if (rep.witness) {
        meta.results()["fosd_witness"] = {{"stage", rep.witness->stage},
                                          {"lower", rep.witness->lower},
                                          {"upper", rep.witness->upper},
                                          {"threshold", rep.witness->threshold}};
    }
    meta.write(c.out);
    std::size_t largest = 0;
    for (const auto& st : lattice.stages) largest = std::max(largest, st.support.size());
    std::cout << "lattice with " << lattice.n_stages() << " stages, largest support " << largest
              << ", FOSD " << (rep.certified ? "certified" : "violated") << '\n';
    return kExitOk;
}

int cmd_aw(const Common& c, const AwOpts& o, Sidecar& meta) {
    const MarkovLattice lx = io::lattice_from_json(io::read_json_file(o.lattice_x));
    const MarkovLattice ly = io::lattice_from_json(io::read_json_file(o.lattice_y));
    const BicausalSolution sol = bicausal_dp(lx, ly, o.p, o.scaled);
    const double kr = coupled_cost(kr_coupling(lx, ly), o.p, o.scaled);
    const bool fx = check_fosd(lx).certified;
    const bool fy = check_fosd(ly).certified;
    json result = {{"value", sol.value},
                   {"distance", std::pow(std::max(0.0, sol.value), 1.0 / o.p)},
                   {"p", o.p},
                   {"scaled", o.scaled},
                   {"policy_size", sol.policy_size()},
                   {"kr_cost", kr},
                   {"fosd_certified", fx && fy},
                   {"fosd_x", fx},
                   {"fosd_y", fy}};
    io::write_json_file(c.out, result);
    meta.results() = result;
    meta.write(c.out);
    std::cout << "AW_p^p = " << d(sol.value) << " (KR " << d(kr) << ")\n";
    return kExitOk;
}

int cmd_metrics(const Common& c, const MetricsOpts& o, Sidecar& meta) {
    const DiscretePathMeasure mu = io::path_measure_from_json(io::read_json_file(o.tree_mu));
    const DiscretePathMeasure nu = io::path_measure_from_json(io::read_json_file(o.tree_nu));
    const MetricValues m = metric_suite(mu, nu, o.p);
    auto root = [&](double v) { return std::pow(std::max(0.0, v), 1.0 / o.p); };
    json result = {{"p", o.p},
                   {"power",
                    {{"W", m.w}, {"CW_forward", m.cw_forward}, {"CW_backward", m.cw_backward}, {"SCW", m.scw},
                     {"AW", m.aw}}},
                   {"distance",
                    {{"W", root(m.w)},
                     {"CW_forward", root(m.cw_forward)},
                     {"CW_backward", root(m.cw_backward)},
                     {"SCW", root(m.scw)},
                     {"AW", root(m.aw)}}}};
    io::write_json_file(c.out, result);
    meta.results() = result;
    meta.write(c.out);
    std::cout << "W^p=" << d(m.w) << " CW^p=" << d(m.cw_forward) << " CW'^p=" << d(m.cw_backward)
              << " SCW^p=" << d(m.scw) << " AW^p=" << d(m.aw) << '\n';
    return kExitOk;
}

int cmd_rho_scan(const Common& c, const PairOpts& pair, const RhoScanOpts& o, Sidecar& meta) {
    const auto [x, y] = resolve_pair(pair);
    const auto rhos = parse_doubles(o.rho, "--rho");
    for (double r : rhos) {
        if (!(r >= -1.0 && r <= 1.0)) throw ConfigError("rho values must lie in [-1, 1]");
    }
    const auto rows = rho_scan(x, y, rhos, mc_from(c, o.n_steps, o.p, o.samples, o.scheme, o.trunc_k));
    io::CsvWriter csv(c.out, {"rho", "estimate", "stderr", "closed_form"});
    for (const auto& row : rows) {
        const auto cf = closed_form_cost(x, y, row.rho, o.p);
        csv.row({d(row.rho), d(row.cost.estimate), d(row.cost.stderr_), cf ? d(*cf) : ""});
    }
    csv.close();
    meta.write(c.out);
    for (const auto& row : rows) std::cout << "rho=" << d(row.rho) << " cost=" << d(row.cost.estimate) << '\n';
    return kExitOk;
}

int cmd_convergence(const Common& c, const PairOpts& pair, const ConvergenceOpts& o, Sidecar& meta) {
    const auto [x, y] = resolve_pair(pair);
    ConvergenceConfig cc;
    cc.n_list = parse_ints(o.n_list, "--n-list");
    cc.atoms = o.atoms;
    cc.max_support = o.max_support;
    cc.trunc_k = o.trunc_k;
    cc.p = o.p;
    cc.mc = mc_from(c, 2, o.p, o.samples, "monotone-em", o.trunc_k);
    const ConvergenceResult res = convergence_study(x, y, cc);
    io::CsvWriter csv(c.out, {"N", "h", "dp_scaled", "kr_cost", "mc_sync", "mc_stderr"});
    json flags = json::array();
    for (const auto& row : res.rows) {
        csv.row({std::to_string(row.n), d(row.h), d(row.dp_scaled), d(row.kr_cost), d(row.mc_sync),
                 d(row.mc_stderr)});
        flags.push_back({{"N", row.n}, {"fosd_condition", row.fosd_condition}, {"fosd_certified", row.fosd_certified}});
    }
    csv.close();
    meta.results()["fosd"] = flags;
    meta.results()["warnings"] = res.warnings;
    if (const auto cf = closed_form_cost(x, y, o.p)) meta.results()["closed_form"] = *cf;
    meta.write(c.out);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& row : res.rows) {
        std::cout << "N=" << row.n << " dp=" << d(row.dp_scaled) << " kr=" << d(row.kr_cost)
                  << " mc=" << d(row.mc_sync) << '\n';
    }
    return kExitOk;
}

int cmd_stability(const Common& c, const StabilityOpts& o, Sidecar& meta) {
    if (o.max_level < 0 || o.max_level > 12) throw ConfigError("--max-level must lie in [0, 12]");
    SdeSpec target;
    SdeSpec reference;
    std::vector<SdeSpec> approx;
    if (o.kind == "drift") {
        // |x| is itself piecewise linear with a knot at 0.
        target.drift = CoefficientSpec::table({-o.radius, 0.0, o.radius}, {o.radius, 0.0, o.radius});
        target.vol = CoefficientSpec::constant(1.0, CoefficientRole::diffusion);
        for (int j = 0; j <= o.max_level; ++j) {
            SdeSpec a = target;
            a.drift = abs_table(j, o.radius, CoefficientRole::drift);
            approx.push_back(a);
        }
    } else if (o.kind == "vol") {
        // sqrt(0.1 + |x|) has no exact table; the reference level is six finer.
        target.drift = CoefficientSpec::constant(0.0);
        target.vol = sqrt_abs_table(o.max_level + 6, 0.1, o.radius);
        for (int j = 0; j <= o.max_level; ++j) {
            SdeSpec a = target;
            a.vol = sqrt_abs_table(j, 0.1, o.radius);
            approx.push_back(a);
        }
    } else {
        throw ConfigError("--kind must be drift or vol");
    }
    reference.drift = CoefficientSpec::constant(0.0);
    reference.vol = CoefficientSpec::constant(1.0, CoefficientRole::diffusion);
    const StabilityResult res =
        stability_study(target, approx, reference, mc_from(c, o.n_steps, o.p, o.samples, "monotone-em", 4.0));
    io::CsvWriter csv(c.out, {"level", "spacing", "cost", "gap", "gap_stderr", "target_cost", "target_stderr"});
    for (const auto& row : res.rows) {
        csv.row({std::to_string(row.level), d(std::ldexp(1.0, -row.level)), d(row.cost), d(row.gap),
                 d(row.gap_stderr), d(res.target.estimate), d(res.target.stderr_)});
    }
    csv.close();
    meta.write(c.out);
    for (const auto& row : res.rows) std::cout << "level " << row.level << " gap " << d(row.gap) << '\n';
    return kExitOk;
}

int cmd_counterexample(const Common& c, const CounterexampleOpts& o, Sidecar& meta) {
    const CounterexampleResult res =
        counterexample_nonmarkov(o.C, o.h_sw, o.p, mc_from(c, o.n_steps, o.p, o.samples, "em", 4.0));
    io::CsvWriter csv(c.out, {"coupling", "estimate", "stderr", "closed_form"});
    const bool quadratic = o.p == 2.0;
    csv.row({"sync", d(res.sync.estimate), d(res.sync.stderr_), quadratic ? d(res.sync_closed_form) : ""});
    csv.row({"async", d(res.async.estimate), d(res.async.stderr_), quadratic ? d(res.async_closed_form) : ""});
    csv.close();
    meta.write(c.out);
    std::cout << "sync " << d(res.sync.estimate) << " async " << d(res.async.estimate) << '\n';
    return kExitOk;
}

int cmd_selftest(const Common& c, const SelftestOpts& o, Sidecar& meta) {
    AcceptanceOptions ao;
    ao.quick = o.quick;
    ao.threads = c.threads;
    ao.seed = c.seed;
    const auto results = run_acceptance(ao, [](const CriterionResult& r) {
        std::cout << format_result(r) << std::endl;
    });
    bool pass = true;
    json report = json::array();
    for (const auto& r : results) {
        pass = pass && r.pass;
        report.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
    }
    if (!c.out.empty()) {
        io::write_json_file(c.out, report);
        meta.results()["pass"] = pass;
        meta.write(c.out);
    }
    return pass ? kExitOk : kExitAcceptance;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Adapted Wasserstein distances between laws of one-dimensional SDEs"};
    app.require_subcommand(1);
    const std::string program = args.empty() ? "adapted-ot" : args.front();

    Common common;
    SimulateOpts sim;
    LatticeOpts lat;
    AwOpts aw;
    MetricsOpts met;
    PairOpts pair;
    RhoScanOpts rs;
    ConvergenceOpts conv;
    StabilityOpts stab;
    CounterexampleOpts cex;
    SelftestOpts st;

    auto common_opts = [&](CLI::App* s, const std::string& default_out, bool random) {
        if (random) {
            s->add_option("--seed", common.seed, "master seed")->capture_default_str();
            s->add_option("--substeps", common.substeps, "Gaussian substeps per step")
                ->capture_default_str()
                ->check(CLI::PositiveNumber);
        }
        s->add_option("--threads", common.threads, "worker threads (0: all cores)")
            ->envname("ADAPTED_OT_THREADS")
            ->check(CLI::NonNegativeNumber);
        s->add_option("--out", common.out, "output file")->default_str(default_out);
    };
    auto pair_opts = [&](CLI::App* s) {
        s->add_option("--preset", pair.preset, "named coefficient pair");
        s->add_option("--drift-x", pair.drift_x, "drift of X");
        s->add_option("--vol-x", pair.vol_x, "volatility of X");
        s->add_option("--drift-y", pair.drift_y, "drift of Y");
        s->add_option("--vol-y", pair.vol_y, "volatility of Y");
        s->add_option("--x0", pair.x0, "common initial value")->capture_default_str();
    };

    auto* s_sim = app.add_subcommand("simulate", "simulate sample paths");
    s_sim->add_option("--drift", sim.drift)->capture_default_str();
    s_sim->add_option("--vol", sim.vol)->capture_default_str();
    s_sim->add_option("--x0", sim.x0)->capture_default_str();
    s_sim->add_option("--n-steps", sim.n_steps)->capture_default_str()->check(CLI::PositiveNumber);
    s_sim->add_option("--scheme", sim.scheme)
        ->capture_default_str()
        ->check(CLI::IsMember({"em", "monotone-em", "zvonkin-em"}));
    s_sim->add_option("--trunc-k", sim.trunc_k)->capture_default_str();
    s_sim->add_option("--samples", sim.samples)->capture_default_str()->check(CLI::PositiveNumber);
    common_opts(s_sim, "paths.csv", true);

    auto* s_lat = app.add_subcommand("lattice", "build a monotone EM lattice");
    s_lat->add_option("--drift", lat.drift)->capture_default_str();
    s_lat->add_option("--vol", lat.vol)->capture_default_str();
    s_lat->add_option("--x0", lat.x0)->capture_default_str();
    s_lat->add_option("--n-steps", lat.n_steps)->capture_default_str()->check(CLI::Range(2, 1 << 20));
    s_lat->add_option("--atoms", lat.atoms)->capture_default_str()->check(CLI::Range(2, 1000));
    s_lat->add_option("--max-support", lat.max_support)->capture_default_str()->check(CLI::PositiveNumber);
    s_lat->add_option("--trunc-k", lat.trunc_k)->capture_default_str();
    common_opts(s_lat, "lattice.json", false);

    auto* s_aw = app.add_subcommand("aw-distance", "bi-causal DP between two lattices");
    s_aw->add_option("--lattice-x", aw.lattice_x)->required();
    s_aw->add_option("--lattice-y", aw.lattice_y)->required();
    s_aw->add_option("--p", aw.p)->capture_default_str();
    s_aw->add_flag("--scaled", aw.scaled, "stage weights h instead of 1");
    common_opts(s_aw, "result.json", false);

    auto* s_met = app.add_subcommand("metrics", "W, CW, SCW and AW on small trees");
    s_met->add_option("--tree-mu", met.tree_mu)->required();
    s_met->add_option("--tree-nu", met.tree_nu)->required();
    s_met->add_option("--p", met.p)->capture_default_str();
    common_opts(s_met, "metrics.json", false);

    auto* s_rho = app.add_subcommand("rho-scan", "coupled cost over constant correlations");
    pair_opts(s_rho);
    s_rho->add_option("--rho", rs.rho, "comma-separated correlations")->capture_default_str();
    s_rho->add_option("--n-steps", rs.n_steps)->capture_default_str();
    s_rho->add_option("--p", rs.p)->capture_default_str();
    s_rho->add_option("--samples", rs.samples)->capture_default_str();
    s_rho->add_option("--scheme", rs.scheme)
        ->capture_default_str()
        ->check(CLI::IsMember({"em", "monotone-em", "zvonkin-em"}));
    s_rho->add_option("--trunc-k", rs.trunc_k)->capture_default_str();
    common_opts(s_rho, "rho_scan.csv", true);

    auto* s_conv = app.add_subcommand("convergence", "scaled DP, KR and MC costs over N");
    pair_opts(s_conv);
    s_conv->add_option("--n-list", conv.n_list)->capture_default_str();
    s_conv->add_option("--p", conv.p)->capture_default_str();
    s_conv->add_option("--atoms", conv.atoms)->capture_default_str();
    s_conv->add_option("--max-support", conv.max_support)->capture_default_str();
    s_conv->add_option("--trunc-k", conv.trunc_k)->capture_default_str();
    s_conv->add_option("--samples", conv.samples)->capture_default_str();
    common_opts(s_conv, "convergence.csv", true);

    auto* s_stab = app.add_subcommand("stability", "sync costs along table refinements");
    s_stab->add_option("--kind", stab.kind)->capture_default_str()->check(CLI::IsMember({"drift", "vol"}));
    s_stab->add_option("--max-level", stab.max_level)->capture_default_str();
    s_stab->add_option("--n-steps", stab.n_steps)->capture_default_str();
    s_stab->add_option("--p", stab.p)->capture_default_str();
    s_stab->add_option("--samples", stab.samples)->capture_default_str();
    s_stab->add_option("--radius", stab.radius)->capture_default_str();
    common_opts(s_stab, "stability.csv", true);

    auto* s_cex = app.add_subcommand("counterexample", "sync and async couplings of the sign-switch drift");
    s_cex->add_option("--C", cex.C)->capture_default_str();
    s_cex->add_option("--h-sw", cex.h_sw)->capture_default_str();
    s_cex->add_option("--n-steps", cex.n_steps)->capture_default_str();
    s_cex->add_option("--p", cex.p)->capture_default_str();
    s_cex->add_option("--samples", cex.samples)->capture_default_str();
    common_opts(s_cex, "counterexample.csv", true);

    auto* s_self = app.add_subcommand("selftest", "run the acceptance suite");
    s_self->add_flag("--quick", st.quick, "reduced sample counts");
    s_self->add_option("--seed", common.seed)->capture_default_str();
    s_self->add_option("--threads", common.threads)->envname("ADAPTED_OT_THREADS");
    s_self->add_option("--out", common.out, "optional JSON report");

    std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (common.out.empty() && sub != s_self) common.out = sub->get_option("--out")->get_default_str();
        Sidecar meta(program, sub);
        if (sub == s_sim) return cmd_simulate(common, sim, meta);
        if (sub == s_lat) return cmd_lattice(common, lat, meta);
        if (sub == s_aw) return cmd_aw(common, aw, meta);
        if (sub == s_met) return cmd_metrics(common, met, meta);
        if (sub == s_rho) return cmd_rho_scan(common, pair, rs, meta);
        if (sub == s_conv) return cmd_convergence(common, pair, conv, meta);
        if (sub == s_stab) return cmd_stability(common, stab, meta);
        if (sub == s_cex) return cmd_counterexample(common, cex, meta);
        if (sub == s_self) return cmd_selftest(common, st, meta);
        throw InternalError("unhandled subcommand");
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const RangeError& e) {
        std::cerr << "range error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int run(int argc, const char* const* argv) {
    return run(std::vector<std::string>(argv, argv + argc));
}

}  // namespace aot::cli
