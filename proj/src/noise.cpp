#include "adapted_ot/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adapted_ot/errors.hpp"

namespace aot {

std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t index)
    : engine_(mix_seed(master_seed, index)) {}

RhoControl RhoControl::constant(double rho) {
    if (!(rho >= -1.0 && rho <= 1.0)) throw ConfigError("rho must lie in [-1, 1]");
    RhoControl r;
    r.kind_ = ConstantRho{rho};
    return r;
}

RhoControl RhoControl::table(std::vector<double> breaks, std::vector<double> values) {
    if (breaks.empty() || breaks.size() != values.size()) {
        throw ConfigError("rho table needs one value per breakpoint");
    }
    if (breaks.front() != 0.0) throw ConfigError("rho table must start at t = 0");
    for (std::size_t i = 0; i < breaks.size(); ++i) {
        if (i > 0 && !(breaks[i] > breaks[i - 1])) throw ConfigError("rho breakpoints must increase");
        if (!(values[i] >= -1.0 && values[i] <= 1.0)) throw ConfigError("rho must lie in [-1, 1]");
    }
    if (breaks.back() >= 1.0) throw ConfigError("rho breakpoints must lie in [0, 1)");
    RhoControl r;
    r.kind_ = TableRho{std::move(breaks), std::move(values)};
    return r;
}

double RhoControl::at(double t) const {
    if (const auto* c = std::get_if<ConstantRho>(&kind_)) return c->rho;
    const auto& tab = std::get<TableRho>(kind_);
    auto it = std::upper_bound(tab.breaks.begin(), tab.breaks.end(), t);
    const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - tab.breaks.begin()) - 1));
    return tab.values[i];
}

double RhoControl::average() const {
    if (const auto* c = std::get_if<ConstantRho>(&kind_)) return c->rho;
    const auto& tab = std::get<TableRho>(kind_);
    double total = 0.0;
    for (std::size_t i = 0; i < tab.breaks.size(); ++i) {
        const double end = i + 1 < tab.breaks.size() ? tab.breaks[i + 1] : 1.0;
        total += tab.values[i] * (end - tab.breaks[i]);
    }
    return total;
}

double truncation_level(double h, double K) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("truncation level needs 0 < h < 1");
    if (!(K >= 1.0)) throw DomainError("truncation multiplier K must be >= 1");
    return K * std::sqrt(-h * std::log(h));
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

ExitBounds exit_probability_bounds(double h, double A) {
    if (!(h > 0.0)) throw DomainError("exit bounds need h > 0");
    if (!(A >= 0.0)) throw DomainError("exit bounds need A >= 0");
    const double tail = normal_upper_tail(A / std::sqrt(h));
    return {std::min(1.0, 2.0 * tail), std::min(1.0, 4.0 * tail)};
}

namespace {

// Runs m_sub substeps of size h / m_sub; the stopped value freezes at the
// first barrier crossing while the unstopped value keeps accumulating.
template <class Draw>
TruncatedIncrement run_substeps(double h, double A, int m_sub, Draw&& draw) {
    const double s = std::sqrt(h / m_sub);
    TruncatedIncrement out;
    double w = 0.0;
    for (int i = 0; i < m_sub; ++i) {
        w += s * draw();
        if (!out.exited && (w >= A || w <= -A)) {
            out.exited = true;
            out.value = w >= A ? A : -A;
        }
    }
    out.unstopped = w;
    if (!out.exited) out.value = w;
    return out;
}

}  // namespace

TruncatedIncrement sample_truncated_increment(double h, double A, int m_sub, RandomStream& rng) {
    if (!(A > 0.0)) throw DomainError("barrier must be positive");
    if (m_sub < 1) throw ConfigError("substeps must be >= 1");
    return run_substeps(h, A, m_sub, [&] { return rng.normal(); });
}

TruncatedIncrement sample_truncated_increment(double h, double A, int m_sub, std::uint64_t seed) {
    RandomStream rng(seed, 0);
    return sample_truncated_increment(h, A, m_sub, rng);
}

FourthMomentEstimate fourth_moment_truncation_error(double h, double K, std::int64_t n_samples, int m_sub,
                                                    std::uint64_t seed) {
    if (n_samples <= 0) throw ConfigError("fourth moment estimate needs samples");
    const double A = std::isinf(K) ? std::numeric_limits<double>::infinity() : truncation_level(h, K);
    FourthMomentEstimate out;
    out.samples = n_samples;
    out.bound = std::isinf(K) ? 0.0 : 6.0 * h * h * std::pow(h, K * K / 2.0);
    double sum = 0.0;
    double sum_sq = 0.0;
    RandomStream rng(seed, 0);
    for (std::int64_t i = 0; i < n_samples; ++i) {
        const auto inc = run_substeps(h, A, m_sub, [&] { return rng.normal(); });
        if (inc.exited) {
            ++out.exits;
            const double d = inc.unstopped - inc.value;
            const double d4 = d * d * d * d;
            sum += d4;
            sum_sq += d4 * d4;
        }
    }
    const auto n = static_cast<double>(n_samples);
    out.estimate = sum / n;
    out.stderr_ = std::sqrt(std::max(0.0, sum_sq / n - out.estimate * out.estimate) / n);
    out.no_exits = out.exits == 0;
    return out;
}

IncrementBlock sample_correlated_pair(const TimeGrid& grid, const RhoControl& rho, std::uint64_t seed, int m_sub) {
    if (m_sub < 1) throw ConfigError("substeps must be >= 1");
    IncrementBlock block{grid, {}, {}, seed, m_sub};
    const int N = grid.n_steps();
    block.dW.resize(static_cast<std::size_t>(N));
    block.dW_bar.resize(static_cast<std::size_t>(N));
    RandomStream rng(seed, 0);
    const double s = std::sqrt(grid.h() / m_sub);
    for (int k = 0; k < N; ++k) {
        const double r = rho.at(grid.time(k));
        const double q = std::sqrt(std::max(0.0, 1.0 - r * r));
        double w = 0.0;
        double wb = 0.0;
        for (int i = 0; i < m_sub; ++i) {
            const double z = s * rng.normal();
            const double zp = s * rng.normal();
            w += z;
            wb += r * z + q * zp;
        }
        block.dW[static_cast<std::size_t>(k)] = w;
        block.dW_bar[static_cast<std::size_t>(k)] = wb;
    }
    return block;
}

CoupledStep sample_coupled_step(double h, double rho, double A, int m_sub, RandomStream& rng) {
    const double q = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    const double s = std::sqrt(h / m_sub);
    CoupledStep out;
    double w = 0.0;
    double wb = 0.0;
    for (int i = 0; i < m_sub; ++i) {
        const double z = s * rng.normal();
        const double zp = s * rng.normal();
        w += z;
        wb += rho * z + q * zp;
        if (!out.w.exited && (w >= A || w <= -A)) {
            out.w.exited = true;
            out.w.value = w >= A ? A : -A;
        }
        if (!out.w_bar.exited && (wb >= A || wb <= -A)) {
            out.w_bar.exited = true;
            out.w_bar.value = wb >= A ? A : -A;
        }
    }
    out.w.unstopped = w;
    out.w_bar.unstopped = wb;
    if (!out.w.exited) out.w.value = w;
    if (!out.w_bar.exited) out.w_bar.value = wb;
    return out;
}

}  // namespace aot
