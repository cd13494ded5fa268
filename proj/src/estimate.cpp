#include "adapted_ot/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "adapted_ot/errors.hpp"
#include "adapted_ot/sde.hpp"
#include "adapted_ot/transport.hpp"

namespace aot {

std::string scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::em:
            return "em";
        case Scheme::monotone_em:
            return "monotone-em";
        case Scheme::zvonkin_em:
            return "zvonkin-em";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "em") return Scheme::em;
    if (name == "monotone-em") return Scheme::monotone_em;
    if (name == "zvonkin-em") return Scheme::zvonkin_em;
    throw ConfigError("unknown scheme '" + name + "' (expected em, monotone-em or zvonkin-em)");
}

void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
    if (n <= 0) return;
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
    constexpr std::int64_t kChunk = 256;
    workers = static_cast<unsigned>(std::min<std::int64_t>(workers, (n + kChunk - 1) / kChunk));
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        try {
            for (std::int64_t start = next.fetch_add(kChunk); start < n; start = next.fetch_add(kChunk)) {
                const std::int64_t stop = std::min(n, start + kChunk);
                for (std::int64_t i = start; i < stop; ++i) fn(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(n);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

McEstimate summarize(const std::vector<double>& values) {
    McEstimate out;
    std::vector<double> valid;
    valid.reserve(values.size());
    for (double v : values) {
        if (std::isnan(v)) {
            ++out.diverged;
        } else {
            valid.push_back(v);
        }
    }
    const auto n = static_cast<std::int64_t>(valid.size());
    out.n_samples = n;
    if (n == 0) return out;
    double sum = 0.0;
    for (double v : valid) sum += v;
    out.estimate = sum / static_cast<double>(n);
    if (n < 2 * kBatchCount) {
        if (n < 2) return out;
        double ss = 0.0;
        for (double v : valid) ss += (v - out.estimate) * (v - out.estimate);
        out.stderr_ = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
        return out;
    }
    std::vector<double> means(kBatchCount, 0.0);
    for (int b = 0; b < kBatchCount; ++b) {
        const std::int64_t lo = n * b / kBatchCount;
        const std::int64_t hi = n * (b + 1) / kBatchCount;
        double s = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) s += valid[static_cast<std::size_t>(i)];
        means[static_cast<std::size_t>(b)] = s / static_cast<double>(hi - lo);
    }
    double mbar = 0.0;
    for (double m : means) mbar += m;
    mbar /= kBatchCount;
    double ss = 0.0;
    for (double m : means) ss += (m - mbar) * (m - mbar);
    out.stderr_ = std::sqrt(ss / (kBatchCount - 1) / kBatchCount);
    return out;
}

double step_cost(double a, double b, double v, double h, double p) {
    if (p == 2.0) return h * (a * a + a * b + b * b) / 3.0 + v * h * h / 6.0;
    return 0.5 * h * (std::pow(std::abs(a), p) + std::pow(std::abs(b), p));
}

namespace {

bool diverged(double x) { return !std::isfinite(x) || std::abs(x) > kDivergenceThreshold; }

void check_config(const McConfig& config) {
    if (config.n_steps < 1) throw ConfigError("n_steps must be positive");
    if (config.n_samples < 1) throw ConfigError("n_samples must be positive");
    if (config.substeps < 1) throw ConfigError("substeps must be positive");
    if (!(config.p >= 1.0)) throw ConfigError("cost order p must be >= 1");
    if (config.scheme != Scheme::em && config.n_steps < 2) {
        throw ConfigError("monotone schemes need N >= 2 so that h < 1");
    }
}

void check_divergence(const std::vector<double>& costs, const std::vector<int>& first_stage) {
    std::int64_t count = 0;
    int stage = -1;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (std::isnan(costs[i])) {
            ++count;
            if (stage < 0) stage = first_stage[i];
        }
    }
    if (static_cast<double>(count) > kMaxDivergedFraction * static_cast<double>(costs.size())) {
        throw DivergenceError(std::to_string(count) + " of " + std::to_string(costs.size()) +
                                  " replicates left |x| <= 1e8; first divergence at stage " + std::to_string(stage),
                              stage);
    }
}

class CoupledSimulator {
public:
    CoupledSimulator(const SdeSpec& x, const SdeSpec& y, const McConfig& config) : x_(x), y_(y), config_(config),
                                                                                    grid_(config.n_steps) {
        check_config(config);
        A_ = config.scheme == Scheme::em ? std::numeric_limits<double>::infinity()
                                         : truncation_level(grid_.h(), config.trunc_k);
        if (config.scheme == Scheme::zvonkin_em) {
            tx_.emplace(x.drift, x.vol, x.x0);
            ty_.emplace(y.drift, y.vol, y.x0);
        }
    }

    // One replicate; NaN on divergence and `stage` set to the offending step.
    double replicate(const RhoControl& rho, std::int64_t index, int& stage) const {
        RandomStream rng(config_.seed, static_cast<std::uint64_t>(index));
        const int N = grid_.n_steps();
        const double h = grid_.h();
        std::vector<double> xs(static_cast<std::size_t>(N) + 1);
        std::vector<double> ys(xs.size());
        xs[0] = x_.x0;
        ys[0] = y_.x0;
        double cost = 0.0;
        for (int k = 0; k < N; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            // rho is held at its value at the start of each step.
            const double r = rho.at(grid_.time(k));
            const CoupledStep step = sample_coupled_step(h, r, A_, config_.substeps, rng);
            const double dw = config_.scheme == Scheme::em ? step.w.unstopped : step.w.value;
            const double dwb = config_.scheme == Scheme::em ? step.w_bar.unstopped : step.w_bar.value;
            const std::span<const double> px(xs.data(), ku + 1);
            const std::span<const double> py(ys.data(), ku + 1);
            const double sx = eval_coefficient(x_.vol, grid_, k, px);
            const double sy = eval_coefficient(y_.vol, grid_, k, py);
            if (tx_) {
                xs[ku + 1] = transformed_step(*tx_, xs[ku], dw);
                ys[ku + 1] = transformed_step(*ty_, ys[ku], dwb);
            } else {
                xs[ku + 1] = scheme_step(x_.drift, x_.vol, grid_, k, px, dw);
                ys[ku + 1] = scheme_step(y_.drift, y_.vol, grid_, k, py, dwb);
            }
            if (diverged(xs[ku + 1]) || diverged(ys[ku + 1])) {
                stage = k + 1;
                return std::numeric_limits<double>::quiet_NaN();
            }
            const double v = std::max(0.0, sx * sx + sy * sy - 2.0 * r * sx * sy);
            cost += step_cost(xs[ku] - ys[ku], xs[ku + 1] - ys[ku + 1], v, h, config_.p);
        }
        return cost;
    }

    std::vector<double> run(const RhoControl& rho) const {
        const auto n = static_cast<std::size_t>(config_.n_samples);
        std::vector<double> costs(n);
        std::vector<int> stages(n, -1);
        parallel_for(config_.n_samples, config_.threads, [&](std::int64_t i) {
            const auto iu = static_cast<std::size_t>(i);
            costs[iu] = replicate(rho, i, stages[iu]);
        });
        check_divergence(costs, stages);
        return costs;
    }

private:
    SdeSpec x_;
    SdeSpec y_;
    McConfig config_;
    TimeGrid grid_;
    double A_ = 0.0;
    std::optional<ZvonkinTransform> tx_;
    std::optional<ZvonkinTransform> ty_;
};

}  // namespace

McEstimate coupled_cost_mc(const SdeSpec& x, const SdeSpec& y, const RhoControl& rho, const McConfig& config) {
    return summarize(CoupledSimulator(x, y, config).run(rho));
}

McEstimate sync_distance_mc(const SdeSpec& x, const SdeSpec& y, const McConfig& config) {
    return coupled_cost_mc(x, y, RhoControl::constant(1.0), config);
}

std::vector<RhoScanRow> rho_scan(const SdeSpec& x, const SdeSpec& y, const std::vector<double>& rho_values,
                                 const McConfig& config) {
    std::vector<RhoScanRow> rows;
    const CoupledSimulator sim(x, y, config);
    for (double r : rho_values) {
        rows.push_back({r, summarize(sim.run(RhoControl::constant(r)))});
    }
    return rows;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<double> constant_value(const CoefficientSpec& spec) {
    if (const auto* c = std::get_if<ConstantCoef>(&spec.kind())) return c->c;
    return std::nullopt;
}

std::optional<double> ou_theta(const CoefficientSpec& spec) {
    if (const auto* o = std::get_if<OUCoef>(&spec.kind())) return o->theta;
    return std::nullopt;
}

}  // namespace

std::optional<double> closed_form_cost(const SdeSpec& x, const SdeSpec& y, double p) {
    if (p != 2.0 || x.x0 != y.x0) return std::nullopt;
    const auto s = constant_value(x.vol);
    const auto sb = constant_value(y.vol);
    if (!s || !sb) return std::nullopt;
    const auto c1 = constant_value(x.drift);
    const auto c2 = constant_value(y.drift);
    if (c1 && c2) return (*c1 - *c2) * (*c1 - *c2) / 3.0 + (*s - *sb) * (*s - *sb) / 2.0;
    const auto t1 = ou_theta(x.drift);
    const auto t2 = ou_theta(y.drift);
    if (t1 && t2 && *t1 == *t2 && *t1 > 0.0 && x.x0 == 0.0) {
        const double th = *t1;
        return (*s - *sb) * (*s - *sb) * (1.0 / (2.0 * th) - (1.0 - std::exp(-2.0 * th)) / (4.0 * th * th));
    }
    return std::nullopt;
}

std::optional<double> closed_form_cost(const SdeSpec& x, const SdeSpec& y, double rho, double p) {
    if (p != 2.0 || x.x0 != y.x0) return std::nullopt;
    const auto s = constant_value(x.vol);
    const auto sb = constant_value(y.vol);
    const auto c1 = constant_value(x.drift);
    const auto c2 = constant_value(y.drift);
    if (!s || !sb || !c1 || !c2) return std::nullopt;
    return (*c1 - *c2) * (*c1 - *c2) / 3.0 + (*s * *s + *sb * *sb - 2.0 * rho * *s * *sb) / 2.0;
}

// ---------------------------------------------------------------------------

namespace {

bool lipschitz_condition(const SdeSpec& sde, double h, double K) {
    const auto gb = growth_bounds(sde.drift);
    const auto gs = growth_bounds(sde.vol);
    if (!gb.lipschitz || !gs.lipschitz) return false;
    return fosd_sufficient_condition(*gb.lipschitz, *gs.lipschitz, h, K);
}

}  // namespace

ConvergenceResult convergence_study(const SdeSpec& x, const SdeSpec& y, const ConvergenceConfig& config) {
    ConvergenceResult result;
    for (int N : config.n_list) {
        if (N < 2) throw ConfigError("convergence study needs N >= 2");
        ConvergenceRow row;
        row.n = N;
        row.h = 1.0 / N;
        LatticeConfig lc;
        lc.n_steps = N;
        lc.atoms = config.atoms;
        lc.max_support = config.max_support;
        lc.trunc_k = config.trunc_k;
        lc.x0 = x.x0;
        const MarkovLattice lx = build_lattice(x.drift, x.vol, lc);
        lc.x0 = y.x0;
        const MarkovLattice ly = build_lattice(y.drift, y.vol, lc);
        row.dp_scaled = bicausal_dp(lx, ly, config.p, true).value;
        row.kr_cost = coupled_cost(kr_coupling(lx, ly), config.p, true);
        McConfig mc = config.mc;
        mc.n_steps = N;
        mc.p = config.p;
        mc.trunc_k = config.trunc_k;
        const McEstimate est = sync_distance_mc(x, y, mc);
        row.mc_sync = est.estimate;
        row.mc_stderr = est.stderr_;
        row.fosd_condition =
            lipschitz_condition(x, row.h, config.trunc_k) && lipschitz_condition(y, row.h, config.trunc_k);
        const FosdReport rx = check_fosd(lx);
        const FosdReport ry = check_fosd(ly);
        row.fosd_certified = rx.certified && ry.certified;
        if (!row.fosd_certified) {
            result.warnings.push_back("N=" + std::to_string(N) + ": lattice kernels are not FOSD-monotone");
        }
        if (!row.fosd_condition) {
            result.warnings.push_back("N=" + std::to_string(N) + ": 1 - h C0 - A_h C1 > 0 does not hold");
        }
        result.rows.push_back(row);
    }
    return result;
}

StabilityResult stability_study(const SdeSpec& target, const std::vector<SdeSpec>& approximants,
                                const SdeSpec& reference, const McConfig& config) {
    const RhoControl sync = RhoControl::constant(1.0);
    const std::vector<double> base = CoupledSimulator(target, reference, config).run(sync);
    StabilityResult result;
    result.target = summarize(base);
    for (std::size_t j = 0; j < approximants.size(); ++j) {
        const std::vector<double> costs = CoupledSimulator(approximants[j], reference, config).run(sync);
        std::vector<double> diff(costs.size());
        for (std::size_t i = 0; i < costs.size(); ++i) diff[i] = costs[i] - base[i];
        StabilityRow row;
        row.level = static_cast<int>(j);
        row.cost = summarize(costs).estimate;
        const McEstimate d = summarize(diff);
        row.gap = std::abs(row.cost - result.target.estimate);
        row.gap_stderr = d.stderr_;
        result.rows.push_back(row);
    }
    return result;
}

CoefficientSpec abs_table(int level, double radius, CoefficientRole role) {
    if (level < 0 || level > 20) throw ConfigError("table level must lie in [0, 20]");
    if (!(radius > 0.0)) throw ConfigError("table radius must be positive");
    const double s = std::ldexp(1.0, -level);
    const auto n = static_cast<long>(std::ceil(radius / s)) + 1;
    std::vector<double> knots;
    std::vector<double> values;
    for (long i = -n; i < n; ++i) {
        const double k = (static_cast<double>(i) + 0.5) * s;
        knots.push_back(k);
        values.push_back(std::abs(k));
    }
    return CoefficientSpec::table(std::move(knots), std::move(values), role);
}

CoefficientSpec sqrt_abs_table(int level, double c, double radius) {
    if (level < 0 || level > 20) throw ConfigError("table level must lie in [0, 20]");
    if (!(c > 0.0) || !(radius > 0.0)) throw ConfigError("sqrt table needs c > 0 and radius > 0");
    const double s = std::ldexp(1.0, -level);
    const auto n = static_cast<long>(std::ceil(radius / s));
    std::vector<double> knots;
    std::vector<double> values;
    for (long i = -n; i <= n; ++i) {
        const double k = static_cast<double>(i) * s;
        knots.push_back(k);
        values.push_back(std::sqrt(c + std::abs(k)));
    }
    return CoefficientSpec::table(std::move(knots), std::move(values), CoefficientRole::diffusion);
}

CounterexampleResult counterexample_nonmarkov(double C, double h_sw, double p, const McConfig& config) {
    check_config(config);
    if (!(C >= 0.0)) throw ConfigError("counterexample needs C >= 0");
    if (!(h_sw > 0.0 && h_sw < 1.0)) throw ConfigError("switch time must lie in (0, 1)");
    const TimeGrid grid(config.n_steps);
    const auto sw = grid.index_of(h_sw);
    if (!sw) throw ConfigError("switch time must be a grid point");
    const int N = grid.n_steps();
    const double h = grid.h();
    const double sh = std::sqrt(h);

    // X has drift C sign(X_sw), X_bar has drift -C sign(X_bar_sw); the noise of
    // X_bar is rho W with rho = 1 (sync) or -1 (async).
    auto simulate = [&](double rho) {
        std::vector<double> costs(static_cast<std::size_t>(config.n_samples));
        parallel_for(config.n_samples, config.threads, [&](std::int64_t i) {
            RandomStream rng(config.seed, static_cast<std::uint64_t>(i));
            double x = 0.0;
            double xb = 0.0;
            double sign_x = 0.0;
            double sign_xb = 0.0;
            double cost = 0.0;
            for (int k = 0; k < N; ++k) {
                if (k == *sw) {
                    sign_x = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
                    sign_xb = xb > 0.0 ? 1.0 : (xb < 0.0 ? -1.0 : 0.0);
                }
                const double dw = sh * rng.normal();
                const double drift = k >= *sw ? h : 0.0;
                const double xn = x + C * sign_x * drift + dw;
                const double xbn = xb - C * sign_xb * drift + rho * dw;
                cost += step_cost(x - xb, xn - xbn, 2.0 - 2.0 * rho, h, p);
                x = xn;
                xb = xbn;
            }
            costs[static_cast<std::size_t>(i)] = cost;
        });
        return summarize(costs);
    };
    CounterexampleResult out;
    out.sync = simulate(1.0);
    out.async = simulate(-1.0);
    out.sync_closed_form = 4.0 * C * C * std::pow(1.0 - h_sw, 3) / 3.0;
    out.async_closed_form = 2.0;
    return out;
}

// ---------------------------------------------------------------------------

double truncation_agreement(const SdeSpec& x, const McConfig& config) {
    check_config(config);
    const TimeGrid grid(config.n_steps);
    const double A = truncation_level(grid.h(), config.trunc_k);
    const auto n = static_cast<std::size_t>(config.n_samples);
    std::vector<char> same(n, 0);
    parallel_for(config.n_samples, config.threads, [&](std::int64_t i) {
        RandomStream rng(config.seed, static_cast<std::uint64_t>(i));
        std::vector<double> trunc(static_cast<std::size_t>(grid.n_steps()));
        std::vector<double> plain(trunc.size());
        for (std::size_t k = 0; k < trunc.size(); ++k) {
            const TruncatedIncrement inc = sample_truncated_increment(grid.h(), A, config.substeps, rng);
            trunc[k] = inc.value;
            plain[k] = inc.unstopped;
        }
        const SamplePath a = euler_maruyama(x.drift, x.vol, grid, x.x0, plain);
        const SamplePath b = monotone_em(x.drift, x.vol, grid, config.trunc_k, x.x0, trunc);
        same[static_cast<std::size_t>(i)] = a.values == b.values ? 1 : 0;
    });
    std::int64_t count = 0;
    for (char c : same) count += c;
    return static_cast<double>(count) / static_cast<double>(n);
}

McEstimate strong_self_difference(const SdeSpec& x, const McConfig& config) {
    check_config(config);
    const TimeGrid coarse(config.n_steps);
    const TimeGrid fine(2 * config.n_steps);
    const double sf = std::sqrt(fine.h());
    std::vector<double> values(static_cast<std::size_t>(config.n_samples));
    parallel_for(config.n_samples, config.threads, [&](std::int64_t i) {
        RandomStream rng(config.seed, static_cast<std::uint64_t>(i));
        std::vector<double> dw_fine(static_cast<std::size_t>(fine.n_steps()));
        for (double& d : dw_fine) d = sf * rng.normal();
        std::vector<double> dw_coarse(static_cast<std::size_t>(coarse.n_steps()));
        for (std::size_t k = 0; k < dw_coarse.size(); ++k) dw_coarse[k] = dw_fine[2 * k] + dw_fine[2 * k + 1];
        const SamplePath a = euler_maruyama(x.drift, x.vol, coarse, x.x0, dw_coarse);
        const SamplePath b = euler_maruyama(x.drift, x.vol, fine, x.x0, dw_fine);
        double sup = 0.0;
        for (std::size_t k = 0; k < a.values.size(); ++k) {
            const double d = a.values[k] - b.values[2 * k];
            sup = std::max(sup, d * d);
        }
        values[static_cast<std::size_t>(i)] = sup;
    });
    return summarize(values);
}

std::vector<double> terminal_samples(const SdeSpec& x, const McConfig& config, bool zvonkin) {
    check_config(config);
    const TimeGrid grid(config.n_steps);
    const double A = truncation_level(grid.h(), config.trunc_k);
    std::optional<ZvonkinTransform> transform;
    if (zvonkin) transform.emplace(x.drift, x.vol, x.x0);
    std::vector<double> out(static_cast<std::size_t>(config.n_samples));
    parallel_for(config.n_samples, config.threads, [&](std::int64_t i) {
        RandomStream rng(config.seed, static_cast<std::uint64_t>(i));
        std::vector<double> inc(static_cast<std::size_t>(grid.n_steps()));
        for (double& d : inc) d = sample_truncated_increment(grid.h(), A, config.substeps, rng).value;
        const SamplePath path = zvonkin ? transformed_monotone_em(*transform, grid, config.trunc_k, x.x0, inc)
                                        : monotone_em(x.drift, x.vol, grid, config.trunc_k, x.x0, inc);
        out[static_cast<std::size_t>(i)] = path.terminal();
    });
    return out;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ConfigError("KS distance needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// ---------------------------------------------------------------------------

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = [] {
        using R = CoefficientRole;
        std::vector<Preset> p;
        p.push_back({"drift-gap",
                     {CoefficientSpec::constant(1.0, R::drift), CoefficientSpec::constant(1.0, R::diffusion), 0.0},
                     {CoefficientSpec::constant(0.0, R::drift), CoefficientSpec::constant(1.0, R::diffusion), 0.0},
                     "b=1, sigma=1 against b=0, sigma=1; limit 1/3"});
        p.push_back({"vol-gap",
                     {CoefficientSpec::constant(0.0, R::drift), CoefficientSpec::constant(1.0, R::diffusion), 0.0},
                     {CoefficientSpec::constant(0.0, R::drift), CoefficientSpec::constant(0.5, R::diffusion), 0.0},
                     "b=0, sigma=1 against b=0, sigma=0.5; limit 0.125"});
        p.push_back({"ou-vol",
                     {CoefficientSpec::ou(1.0), CoefficientSpec::constant(1.0, R::diffusion), 0.0},
                     {CoefficientSpec::ou(1.0), CoefficientSpec::constant(2.0, R::diffusion), 0.0},
                     "OU(1) with sigma=1 against sigma=2; limit 0.2838338"});
        p.push_back({"affine-ou",
                     {CoefficientSpec::affine(1.0, -0.5), CoefficientSpec::constant(1.5, R::diffusion), 0.0},
                     {CoefficientSpec::ou(2.0), CoefficientSpec::constant(0.7, R::diffusion), 0.0},
                     "b=1-x/2, sigma=1.5 against OU(2), sigma=0.7"});
        p.push_back({"table-vol",
                     {CoefficientSpec::ou(1.0),
                      CoefficientSpec::table({-50.0, -1.0, 1.0, 50.0}, {0.7, 0.7, 1.3, 1.3}, R::diffusion), 0.0},
                     {CoefficientSpec::constant(0.5, R::drift), CoefficientSpec::constant(0.8, R::diffusion), 0.0},
                     "OU(1) with a ramp volatility against b=0.5, sigma=0.8"});
        return p;
    }();
    return all;
}

const Preset& find_preset(const std::string& name) {
    for (const auto& p : presets()) {
        if (p.name == name) return p;
    }
    std::string known;
    for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

}  // namespace aot
