#include "adapted_ot/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "adapted_ot/errors.hpp"
#include "adapted_ot/noise.hpp"

namespace aot {

namespace {

double phi(double z) {
    if (std::isinf(z)) return 0.0;
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double cdf(double z) {
    if (z == -std::numeric_limits<double>::infinity()) return 0.0;
    if (z == std::numeric_limits<double>::infinity()) return 1.0;
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// int_l^u clamp(z, -a, a) phi(z) dz for l < u.
double clipped_first_moment(double l, double u, double a) {
    double total = 0.0;
    if (l < -a) total += -a * (cdf(std::min(u, -a)) - cdf(l));
    const double lo = std::max(l, -a);
    const double hi = std::min(u, a);
    if (lo < hi) total += phi(lo) - phi(hi);
    if (u > a) total += a * (cdf(u) - cdf(std::max(l, a)));
    return total;
}

struct RawNode {
    double value;
    double mass;
};

}  // namespace

IncrementQuantization quantize_increment(double h, double A, int m) {
    if (m < 2) throw ConfigError("increment quantization needs m >= 2 atoms");
    if (!(h > 0.0)) throw ConfigError("increment quantization needs h > 0");
    if (!(A > 0.0)) throw ConfigError("increment quantization needs A > 0");
    const boost::math::normal_distribution<double> normal;
    std::vector<double> edges(static_cast<std::size_t>(m) + 1);
    edges.front() = -std::numeric_limits<double>::infinity();
    edges.back() = std::numeric_limits<double>::infinity();
    for (int j = 1; j < m; ++j) {
        edges[static_cast<std::size_t>(j)] = boost::math::quantile(normal, static_cast<double>(j) / m);
    }
    const double sh = std::sqrt(h);
    const double a = A / sh;
    std::vector<double> raw(static_cast<std::size_t>(m));
    for (std::size_t j = 0; j < raw.size(); ++j) {
        raw[j] = sh * m * clipped_first_moment(edges[j], edges[j + 1], a);
    }
    IncrementQuantization q;
    q.atoms.resize(raw.size());
    q.weights.assign(raw.size(), 1.0 / m);
    for (std::size_t j = 0; j < raw.size(); ++j) {
        q.atoms[j] = 0.5 * (raw[j] - raw[raw.size() - 1 - j]);
        q.atoms[j] = std::clamp(q.atoms[j], -A, A);
    }
    return q;
}

MarkovLattice build_lattice(const CoefficientSpec& b, const CoefficientSpec& sigma, const LatticeConfig& config) {
    const TimeGrid grid(config.n_steps);
    const double A = truncation_level(grid.h(), config.trunc_k);
    return build_lattice(b, sigma, config, quantize_increment(grid.h(), A, config.atoms));
}

MarkovLattice build_lattice(const CoefficientSpec& b, const CoefficientSpec& sigma, const LatticeConfig& config,
                            const IncrementQuantization& quantization) {
    if (!b.is_markovian() || !sigma.is_markovian()) {
        throw ConfigError("lattices need Markovian coefficients");
    }
    if (config.max_support < static_cast<int>(quantization.size())) {
        throw ConfigError("max support G = " + std::to_string(config.max_support) + " is smaller than m = " +
                          std::to_string(quantization.size()));
    }
    const CoefficientSpec vol = sigma.with_role(CoefficientRole::diffusion);
    const TimeGrid grid(config.n_steps);
    const double h = grid.h();
    const auto G = static_cast<std::size_t>(config.max_support);

    MarkovLattice lattice;
    lattice.x0 = config.x0;
    std::vector<double> support{config.x0};
    std::vector<double> mass{1.0};

    for (int k = 1; k <= config.n_steps; ++k) {
        // child[i][j]: value reached from node i with atom j
        std::vector<std::vector<double>> child(support.size());
        std::vector<RawNode> raw;
        raw.reserve(support.size() * quantization.size());
        for (std::size_t i = 0; i < support.size(); ++i) {
            const double x = support[i];
            const double drift = b(x);
            const double s = vol(x);
            child[i].resize(quantization.size());
            for (std::size_t j = 0; j < quantization.size(); ++j) {
                const double y = x + h * drift + s * quantization.atoms[j];
                if (!std::isfinite(y) || std::abs(y) > 1e8) {
                    throw DivergenceError("lattice support diverged", k);
                }
                child[i][j] = y;
                raw.push_back({y, mass[i] * quantization.weights[j]});
            }
        }
        std::sort(raw.begin(), raw.end(), [](const RawNode& l, const RawNode& r) { return l.value < r.value; });
        // Collapse duplicates up to rounding.
        std::vector<RawNode> distinct;
        for (const auto& node : raw) {
            if (!distinct.empty() &&
                node.value - distinct.back().value <= 1e-12 * (1.0 + std::abs(node.value))) {
                distinct.back().mass += node.mass;
            } else {
                distinct.push_back(node);
            }
        }

        // Contiguous equal-mass binning; bin index is monotone in value order.
        std::vector<std::size_t> bin_of(distinct.size());
        if (distinct.size() > G) {
            const double total = std::accumulate(distinct.begin(), distinct.end(), 0.0,
                                                 [](double acc, const RawNode& n) { return acc + n.mass; });
            double cum = 0.0;
            for (std::size_t i = 0; i < distinct.size(); ++i) {
                const double mid = (cum + 0.5 * distinct[i].mass) / total;
                bin_of[i] = std::min(G - 1, static_cast<std::size_t>(std::floor(mid * static_cast<double>(G))));
                cum += distinct[i].mass;
            }
        } else {
            std::iota(bin_of.begin(), bin_of.end(), std::size_t{0});
        }

        // Representatives: probability-weighted means of nonempty bins.
        std::vector<double> weighted(G > distinct.size() ? distinct.size() : G, 0.0);
        std::vector<double> bin_mass(weighted.size(), 0.0);
        for (std::size_t i = 0; i < distinct.size(); ++i) {
            weighted[bin_of[i]] += distinct[i].mass * distinct[i].value;
            bin_mass[bin_of[i]] += distinct[i].mass;
        }
        std::vector<std::size_t> compact(weighted.size(), 0);
        LatticeStage stage;
        for (std::size_t g = 0; g < weighted.size(); ++g) {
            if (bin_mass[g] > 0.0) {
                compact[g] = stage.support.size();
                double rep = weighted[g] / bin_mass[g];
                if (distinct.size() <= G) rep = distinct[g].value;
                stage.support.push_back(rep);
            }
        }
        for (std::size_t s = 1; s < stage.support.size(); ++s) {
            if (!(stage.support[s] > stage.support[s - 1])) {
                throw InternalError("merged lattice support is not strictly increasing");
            }
        }

        auto node_index = [&](double y) {
            // Last distinct node with value <= y (duplicates were folded into it).
            auto it = std::upper_bound(distinct.begin(), distinct.end(), y,
                                       [](double v, const RawNode& n) { return v < n.value; });
            return compact[bin_of[static_cast<std::size_t>(it - distinct.begin()) - 1]];
        };
        stage.transitions.assign(support.size(), std::vector<double>(stage.support.size(), 0.0));
        for (std::size_t i = 0; i < support.size(); ++i) {
            for (std::size_t j = 0; j < quantization.size(); ++j) {
                stage.transitions[i][node_index(child[i][j])] += quantization.weights[j];
            }
        }

        std::vector<double> next_mass(stage.support.size(), 0.0);
        for (std::size_t i = 0; i < support.size(); ++i) {
            for (std::size_t j = 0; j < next_mass.size(); ++j) next_mass[j] += mass[i] * stage.transitions[i][j];
        }
        support = stage.support;
        mass = std::move(next_mass);
        lattice.stages.push_back(std::move(stage));
    }
    return lattice;
}

FosdReport check_fosd(const MarkovLattice& lattice) {
    FosdReport report;
    for (int k = 1; k <= lattice.n_stages(); ++k) {
        const auto& st = lattice.stages[static_cast<std::size_t>(k - 1)];
        for (std::size_t i = 0; i + 1 < st.transitions.size(); ++i) {
            const auto& lo = st.transitions[i];
            const auto& hi = st.transitions[i + 1];
            double F_lo = 0.0;
            double F_hi = 0.0;
            for (std::size_t a = 0; a < st.support.size(); ++a) {
                F_lo += lo[a];
                F_hi += hi[a];
                if (F_hi > F_lo + 1e-12) {
                    report.certified = false;
                    report.witness = FosdWitness{k, i, i + 1, st.support[a], F_lo, F_hi};
                    return report;
                }
            }
        }
    }
    return report;
}

double fosd_margin(double C0, double C1, double h, double K) {
    if (C0 < 0.0 || C1 < 0.0) throw ConfigError("Lipschitz constants must be nonnegative");
    return 1.0 - h * C0 - truncation_level(h, K) * C1;
}

bool fosd_sufficient_condition(double C0, double C1, double h, double K) { return fosd_margin(C0, C1, h, K) > 0.0; }

StageMoments lattice_moments(const MarkovLattice& lattice, int k) {
    const auto p = lattice.marginal(k);
    const auto s = lattice.support(k);
    StageMoments m;
    for (std::size_t i = 0; i < p.size(); ++i) m.mean += p[i] * s[i];
    for (std::size_t i = 0; i < p.size(); ++i) m.variance += p[i] * (s[i] - m.mean) * (s[i] - m.mean);
    return m;
}

}  // namespace aot
