#include "echelon/small_divisors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace echelon {

namespace {

void enumerate(int n, int cutoff, bool half, std::vector<MultiIndex>& out) {
    MultiIndex cur(n);
    std::function<void(int, int, bool)> rec = [&](int k, int left, bool seen_nonzero) {
        if (k == n) {
            if (left == 0 && seen_nonzero) out.push_back(cur);
            return;
        }
        for (int v = -left; v <= left; ++v) {
            if (half && !seen_nonzero && v < 0) continue;
            cur[k] = v;
            rec(k + 1, left - std::abs(v), seen_nonzero || v != 0);
        }
        cur[k] = 0;
    };
    for (int d = 1; d <= cutoff; ++d) rec(0, d, false);
}

}  // namespace

std::vector<MultiIndex> half_lattice(int n, int cutoff) {
    std::vector<MultiIndex> out;
    enumerate(n, cutoff, true, out);
    return out;
}

std::vector<MultiIndex> full_lattice(int n, int cutoff) {
    std::vector<MultiIndex> out;
    enumerate(n, cutoff, false, out);
    return out;
}

bool in_poincare_domain(const std::vector<Complex>& lambda) {
    std::vector<double> args;
    for (const auto& l : lambda) {
        if (std::abs(l) == 0) return false;
        args.push_back(std::arg(l));
    }
    std::sort(args.begin(), args.end());
    double gap = args.front() + 2 * std::numbers::pi - args.back();
    for (std::size_t k = 1; k < args.size(); ++k) gap = std::max(gap, args[k] - args[k - 1]);
    return gap > std::numbers::pi;
}

std::vector<MeasureRow> measure_demo(int tau, const std::vector<double>& C_grid, int samples, std::uint64_t seed,
                                     int cutoff, int n) {
    if (samples < 1) throw PreconditionError("measure_demo: samples >= 1 required");
    if (tau <= n - 1) throw PreconditionError("measure_demo: tau > n-1 required");
    std::mt19937_64 rng(seed);
    // 53 random bits per coordinate; independent of the library's
    // distribution implementation.
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const auto lattice = half_lattice(n, cutoff);
    std::vector<MeasureRow> rows(C_grid.size());
    for (std::size_t c = 0; c < C_grid.size(); ++c) rows[c] = {C_grid[c], 0, samples, 0};
    std::vector<double> lambda(n);
    for (int t = 0; t < samples; ++t) {
        for (auto& l : lambda) l = uniform();
        double best = std::numeric_limits<double>::infinity();
        for (const auto& i : lattice) {
            double v = 0;
            for (int k = 0; k < n; ++k) v += lambda[k] * i[k];
            best = std::min(best, std::fabs(v) * std::pow(static_cast<double>(sigma(i)), tau));
        }
        for (auto& r : rows)
            if (best >= r.C) ++r.passed;
    }
    for (auto& r : rows) r.fraction = static_cast<double>(r.passed) / samples;
    return rows;
}

}  // namespace echelon
