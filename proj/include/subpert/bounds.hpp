#pragma once

// Scalar bound functions for the rotation of spectral subspaces under a
// perturbation V = V+ - V-. Every bound takes the sign-part norms
// |V+|, |V-| and the spectral gap d of the unperturbed operator; all angles
// are in radians.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <numbers>
#include <string>

#include "subpert/error.hpp"

namespace subpert {

template <std::floating_point T = double>
constexpr T c_crit() noexcept {
    const T r = T(1) - std::numbers::sqrt3_v<T> / std::numbers::pi_v<T>;
    return T(0.5) - T(0.5) * r * r * r;
}

namespace detail {

template <std::floating_point T>
T asin_clamped(T x) {
    return std::asin(std::clamp(x, T(-1), T(1)));
}

// The four closed forms of N. Each is evaluated wherever its square roots
// are real, so adjacent branches can be compared at their common point.
template <std::floating_point T>
T n_branch1(T x) {
    return T(0.5) * asin_clamped(std::numbers::pi_v<T> * x);
}
template <std::floating_point T>
T n_branch2(T x) {
    constexpr T pi2 = std::numbers::pi_v<T> * std::numbers::pi_v<T>;
    const T arg = (T(2) * pi2 * x - T(4)) / (pi2 - T(4));
    return asin_clamped(std::sqrt(std::max(arg, T(0))));
}
template <std::floating_point T>
T n_branch3(T x) {
    return asin_clamped(std::numbers::pi_v<T> / T(2) * (T(1) - std::sqrt(T(1) - T(2) * x)));
}
template <std::floating_point T>
T n_branch4(T x) {
    return T(1.5) * asin_clamped(std::numbers::pi_v<T> / T(2) * (T(1) - std::cbrt(T(1) - T(2) * x)));
}

template <std::floating_point T>
T kappa_residual(T x) {
    return n_branch3(x) - n_branch4(x);
}

} // namespace detail

/// First branch point of N, 4 / (pi^2 + 4).
template <std::floating_point T = double>
constexpr T branch_point_1() noexcept {
    constexpr T pi2 = std::numbers::pi_v<T> * std::numbers::pi_v<T>;
    return T(4) / (pi2 + T(4));
}

/// Second branch point of N, 4 (pi^2 - 2) / pi^4; also the lower end of the
/// bracket for kappa.
template <std::floating_point T = double>
constexpr T branch_point_2() noexcept {
    constexpr T pi2 = std::numbers::pi_v<T> * std::numbers::pi_v<T>;
    return T(4) * (pi2 - T(2)) / (pi2 * pi2);
}

/// Upper end of the bracket for kappa, 2 (pi - 1) / pi^2.
template <std::floating_point T = double>
constexpr T kappa_upper_bracket() noexcept {
    constexpr T pi = std::numbers::pi_v<T>;
    return T(2) * (pi - T(1)) / (pi * pi);
}

/// Threshold 2 sinh(1) / e = 1 - e^-2 on (|V+| + |V-|) / d below which the
/// logarithmic integral bound stays at most pi/2.
template <std::floating_point T = double>
T integral_threshold() noexcept {
    return T(2) * std::sinh(T(1)) / std::exp(T(1));
}

/// Solves branch3(x) = branch4(x) by bisection on
/// (4(pi^2-2)/pi^4, 2(pi-1)/pi^2]. The iteration runs until the bracket
/// stops shrinking; `tol` caps the accepted residual.
template <std::floating_point T = double>
T solve_kappa(T tol) {
    if (!(tol > T(0))) throw Error(ErrorCode::DomainError, "tolerance must be positive");
    T lo = branch_point_2<T>();
    T hi = kappa_upper_bracket<T>();
    T f_lo = detail::kappa_residual(lo);
    const T f_hi = detail::kappa_residual(hi);
    if (!(f_lo < T(0) && f_hi > T(0))) {
        throw Error(ErrorCode::BracketFailure, "kappa equation does not change sign on its bracket");
    }
    for (int iter = 0; iter < 400; ++iter) {
        const T mid = lo + (hi - lo) / T(2);
        if (mid <= lo || mid >= hi) break;
        const T f_mid = detail::kappa_residual(mid);
        if (f_mid == T(0)) return mid;
        if ((f_mid < T(0)) == (f_lo < T(0))) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    const T f_hi_final = detail::kappa_residual(hi);
    const T root = std::abs(f_lo) <= std::abs(f_hi_final) ? lo : hi;
    if (std::abs(detail::kappa_residual(root)) > tol) {
        throw Error(ErrorCode::BracketFailure, "kappa residual above tolerance after bisection");
    }
    return root;
}

/// kappa, solved once on first use.
template <std::floating_point T = double>
T kappa() {
    static const T value = solve_kappa<T>(T(1e-13));
    return value;
}

template <std::floating_point T = double>
struct BoundConstants {
    T c_crit;
    T kappa;
    T branch_points[3];
    T upper_validity;
    T integral_threshold;
};

template <std::floating_point T = double>
BoundConstants<T> bound_constants() {
    const T k = kappa<T>();
    return BoundConstants<T>{c_crit<T>(), k, {branch_point_1<T>(), branch_point_2<T>(), k},
                             T(2) * c_crit<T>(), integral_threshold<T>()};
}

/// Index (1..4) of the closed form N uses at x. Branch points go to the
/// lower branch.
template <std::floating_point T = double>
int bound_N_branch(T x) {
    if (!(x >= T(0) && x <= c_crit<T>())) {
        throw Error(ErrorCode::DomainError,
                    "N is defined on [0, c_crit]; got x = " + std::to_string(static_cast<double>(x)));
    }
    if (x <= branch_point_1<T>()) return 1;
    if (x <= branch_point_2<T>()) return 2;
    if (x <= kappa<T>()) return 3;
    return 4;
}

/// The piecewise bound function N on [0, c_crit], rising from 0 to pi/2.
template <std::floating_point T = double>
T bound_N(T x) {
    switch (bound_N_branch(x)) {
    case 1: return detail::n_branch1(x);
    case 2: return detail::n_branch2(x);
    case 3: return detail::n_branch3(x);
    default: return detail::n_branch4(x);
    }
}

namespace detail {

template <std::floating_point T>
void check_norms(T norm_plus, T norm_minus, T d) {
    if (!(norm_plus >= T(0) && norm_minus >= T(0))) {
        throw Error(ErrorCode::DomainError, "sign-part norms must be nonnegative");
    }
    if (!(d > T(0))) throw Error(ErrorCode::DomainError, "gap d must be positive");
}

} // namespace detail

/// (1/2) arcsin((|V+| + |V-|) / d): the angle bound when the convex hull of
/// one component misses the other. Requires |V+| + |V-| < d.
template <std::floating_point T = double>
T favgeom_bound(T norm_plus, T norm_minus, T d) {
    detail::check_norms(norm_plus, norm_minus, d);
    const T sum = norm_plus + norm_minus;
    if (!(sum < d)) {
        throw Error(ErrorCode::GapConditionViolated,
                    "|V+| + |V-| = " + std::to_string(static_cast<double>(sum)) + " >= d");
    }
    return T(0.5) * std::asin(sum / d);
}

/// N((|V+| + |V-|) / (2d)), valid for |V+| + |V-| < 2 c_crit d.
template <std::floating_point T = double>
T generic_bound(T norm_plus, T norm_minus, T d) {
    detail::check_norms(norm_plus, norm_minus, d);
    const T sum = norm_plus + norm_minus;
    if (!(sum < T(2) * c_crit<T>() * d)) {
        throw Error(ErrorCode::DomainError, "|V+| + |V-| must be below 2 c_crit d");
    }
    return bound_N(std::min(sum / (T(2) * d), c_crit<T>()));
}

/// (1/2) arcsin((pi/2)(|V+| + |V-|) / d) for |V+| + |V-| <= 2d / pi.
template <std::floating_point T = double>
T corollary_half_arcsin_bound(T norm_plus, T norm_minus, T d) {
    detail::check_norms(norm_plus, norm_minus, d);
    const T sum = norm_plus + norm_minus;
    if (!(sum <= T(2) * d / std::numbers::pi_v<T>)) {
        throw Error(ErrorCode::DomainError, "|V+| + |V-| must not exceed 2d / pi");
    }
    return T(0.5) * detail::asin_clamped(std::numbers::pi_v<T> / T(2) * sum / d);
}

/// Bound on |sin 2 Theta| for any reducing projection of A + V; the constant
/// pi/2 drops to 1 under favourable geometry. May exceed 1 (then vacuous).
template <std::floating_point T = double>
T sin2theta_bound(T norm_plus, T norm_minus, T d, bool favourable_geometry) {
    detail::check_norms(norm_plus, norm_minus, d);
    const T constant = favourable_geometry ? T(1) : std::numbers::pi_v<T> / T(2);
    return constant * (norm_plus + norm_minus) / d;
}

/// Norm bound for |E_{A+sV}(omega_s) - E_{A+tV}(omega_t)|, 0 <= s <= t <= 1.
template <std::floating_point T = double>
T path_step_bound(T s, T t, T norm_v, T norm_plus, T norm_minus, T d) {
    detail::check_norms(norm_plus, norm_minus, d);
    if (!(s >= T(0) && s <= t && t <= T(1))) {
        throw Error(ErrorCode::DomainError, "need 0 <= s <= t <= 1");
    }
    const T denom = d - t * norm_plus - t * norm_minus;
    if (!(denom > T(0))) {
        throw Error(ErrorCode::DomainError, "d - t(|V+| + |V-|) must be positive");
    }
    return std::numbers::pi_v<T> / T(2) * (t - s) * norm_v / denom;
}

template <std::floating_point T = double>
struct IntegralBound {
    T value;
    /// (|V+| + |V-|) / d <= 2 sinh(1)/e, where value <= pi/2.
    bool below_threshold;
};

/// (pi/4) log(d / (d - |V+| - |V-|)), the continuum limit of the
/// partitioned path estimate.
template <std::floating_point T = double>
IntegralBound<T> integral_bound(T norm_plus, T norm_minus, T d) {
    detail::check_norms(norm_plus, norm_minus, d);
    const T sum = norm_plus + norm_minus;
    if (!(sum < d)) {
        throw Error(ErrorCode::GapConditionViolated,
                    "|V+| + |V-| = " + std::to_string(static_cast<double>(sum)) + " >= d");
    }
    const T value = -std::numbers::pi_v<T> / T(4) * std::log1p(-sum / d);
    return {value, sum / d <= integral_threshold<T>()};
}

} // namespace subpert
