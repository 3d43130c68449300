#pragma once

// Direct numerical evaluation of
//
//   inf { (1/2) sum_j arcsin(pi lambda_j / 2) :
//         0 <= lambda_j <= 2/pi, prod_j (1 - lambda_j) = 1 - x }
//
// over partitions with at most n_max parts. This is the variational form of
// N(x/2) and is used as an independent check on the closed-form branches.
//
// In the variables mu_j = -log(1 - lambda_j) the constraint becomes the
// simplex sum_j mu_j = -log(1 - x) with box 0 <= mu_j <= -log(1 - 2/pi),
// and the objective is a sum of one scalar function g(mu_j).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "subpert/bounds.hpp"
#include "subpert/error.hpp"

namespace subpert {

struct PartitionInfimum {
    double value = 0.0;
    /// Minimizing step sizes, zero parts dropped, descending.
    std::vector<double> lambdas;
};

namespace detail {

inline double partition_term(double mu) {
    const double lambda = -std::expm1(-mu);
    return 0.5 * asin_clamped(std::numbers::pi / 2.0 * lambda);
}

// Minimizes f on [lo, hi] by a coarse scan followed by golden-section
// refinement around the best grid point. Returns the argmin.
template <typename F>
double scan_then_golden(F&& f, double lo, double hi, double tol, int grid = 48) {
    if (!(hi > lo)) return lo;
    double best_x = lo;
    double best_f = f(lo);
    const double h = (hi - lo) / grid;
    for (int i = 1; i <= grid; ++i) {
        const double x = (i == grid) ? hi : lo + i * h;
        const double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    double a = std::max(lo, best_x - h);
    double b = std::min(hi, best_x + h);
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double e = a + inv_phi * (b - a);
    double fc = f(c);
    double fe = f(e);
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        if (fc < fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = f(e);
        }
    }
    const double mid = 0.5 * (a + b);
    return f(mid) < best_f ? mid : best_x;
}

inline double partition_objective(const std::vector<double>& mu) {
    double s = 0.0;
    for (double m : mu) s += partition_term(m);
    return s;
}

// Water-filling onto {sum mu = total, 0 <= mu <= cap}, preserving the
// relative weights of the uncapped entries.
inline void make_feasible(std::vector<double>& mu, double total, double cap) {
    std::vector<bool> capped(mu.size(), false);
    for (int round = 0; round < static_cast<int>(mu.size()) + 1; ++round) {
        double fixed = 0.0;
        double free_weight = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            if (capped[i]) fixed += cap;
            else free_weight += mu[i];
        }
        const double remaining = total - fixed;
        bool changed = false;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            if (capped[i]) {
                mu[i] = cap;
                continue;
            }
            mu[i] = free_weight > 0.0 ? mu[i] * remaining / free_weight : 0.0;
            if (mu[i] > cap) {
                capped[i] = true;
                changed = true;
            }
        }
        if (!changed) return;
    }
}

// Coordinate descent over pairs: moving mass between two parts keeps the
// constraint, and for a separable objective a point that no pair move can
// improve is a local minimum.
inline double refine_pairwise(std::vector<double>& mu, double cap, double tol) {
    double current = partition_objective(mu);
    for (int sweep = 0; sweep < 100; ++sweep) {
        const double before = current;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            for (std::size_t j = i + 1; j < mu.size(); ++j) {
                const double pair = mu[i] + mu[j];
                const double lo = std::max(0.0, pair - cap);
                const double hi = std::min(cap, pair);
                auto f = [&](double a) { return partition_term(a) + partition_term(pair - a); };
                const double a = scan_then_golden(f, lo, hi, tol, 16);
                if (f(a) < f(mu[i])) {
                    mu[i] = a;
                    mu[j] = pair - a;
                }
            }
        }
        current = partition_objective(mu);
        if (before - current <= tol) break;
    }
    return current;
}

} // namespace detail

/// Minimizes the partition sum for N(x/2) over at most `n_max` parts.
///
/// Candidates per part count n: the all-equal partition, every two-level
/// partition (k parts of one size, n - k of another, sizes optimized), and
/// for n <= 8 a multi-start pairwise-exchange refinement over unrestricted
/// vectors. Returns the smallest value found.
inline PartitionInfimum N_via_partition_infimum_detailed(double x, int n_max, double tol) {
    if (!(x >= 0.0 && x <= 2.0 * c_crit())) {
        throw Error(ErrorCode::DomainError,
                    "x = " + std::to_string(x) + " outside [0, 2 c_crit]");
    }
    if (n_max < 1) throw Error(ErrorCode::DomainError, "n_max must be at least 1");
    if (!(tol > 0.0)) throw Error(ErrorCode::DomainError, "tolerance must be positive");
    if (x == 0.0) return {};

    const double total = -std::log1p(-x);
    const double cap = -std::log1p(-2.0 / std::numbers::pi);
    const double slack = 1e-14 * (1.0 + total);
    if (n_max * cap < total - slack) {
        throw Error(ErrorCode::InfeasibleConstraint,
                    "x = " + std::to_string(x) + " needs more than " + std::to_string(n_max) +
                        " parts");
    }

    PartitionInfimum best{std::numeric_limits<double>::infinity(), {}};
    auto consider = [&](const std::vector<double>& mu, double value) {
        if (value < best.value) {
            best.value = value;
            best.lambdas.clear();
            for (double m : mu)
                if (m > 0.0) best.lambdas.push_back(-std::expm1(-m));
            std::sort(best.lambdas.rbegin(), best.lambdas.rend());
        }
    };

    std::mt19937_64 rng(0x5eed5eedULL);
    std::exponential_distribution<double> weight(1.0);

    for (int n = 1; n <= n_max; ++n) {
        if (n * cap < total - slack) continue;

        const double equal = std::min(total / n, cap);
        consider(std::vector<double>(static_cast<std::size_t>(n), equal),
                 n * detail::partition_term(equal));

        for (int k = 1; k < n; ++k) {
            const int m = n - k;
            const double lo = std::max(0.0, (total - m * cap) / k);
            const double hi = std::min(cap, total / k);
            if (!(hi >= lo)) continue;
            auto f = [&](double a) {
                const double b = std::clamp((total - k * a) / m, 0.0, cap);
                return k * detail::partition_term(a) + m * detail::partition_term(b);
            };
            const double a = detail::scan_then_golden(f, lo, hi, tol);
            const double b = std::clamp((total - k * a) / m, 0.0, cap);
            std::vector<double> mu(static_cast<std::size_t>(k), a);
            mu.insert(mu.end(), static_cast<std::size_t>(m), b);
            consider(mu, f(a));
        }

        if (n <= 8 && n > 1) {
            for (int start = 0; start < 6; ++start) {
                std::vector<double> mu(static_cast<std::size_t>(n));
                for (double& w : mu) w = weight(rng);
                detail::make_feasible(mu, total, cap);
                const double value = detail::refine_pairwise(mu, cap, tol);
                consider(mu, value);
            }
        }
    }
    return best;
}

inline double N_via_partition_infimum(double x, int n_max, double tol) {
    return N_via_partition_infimum_detailed(x, n_max, tol).value;
}

} // namespace subpert
