#pragma once

// Spectral partitions of A, enlargements of a spectral component by the
// sign parts of V, and the induced separation of spec(A + tV).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "subpert/error.hpp"
#include "subpert/linalg.hpp"

namespace subpert {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x, double tol = 0.0) const noexcept {
        return x >= lo - tol && x <= hi + tol;
    }
    double distance(double x) const noexcept {
        if (x < lo) return lo - x;
        if (x > hi) return x - hi;
        return 0.0;
    }
    friend bool operator==(const Interval&, const Interval&) = default;
};

using IntervalList = std::vector<Interval>;

/// The split spec(A) = sigma u Sigma, stored as eigenvalue indices, with
/// gap d = dist(sigma, Sigma) > 0.
struct SpectralPartition {
    IndexSet sigma_indices;
    IndexSet Sigma_indices;
    double d = 0.0;
};

struct PerturbedSeparation {
    IndexSet omega_indices;
    IndexSet Omega_indices;
    double gap_lower_bound = 0.0;
    /// +infinity when one side is empty.
    double measured_gap = std::numeric_limits<double>::infinity();
};

/// Sorted, pairwise disjoint closed intervals.
struct EnlargedSet {
    IntervalList intervals;

    double distance(double x) const noexcept {
        double best = std::numeric_limits<double>::infinity();
        for (const Interval& iv : intervals) best = std::min(best, iv.distance(x));
        return best;
    }
    bool contains(double x, double tol = 0.0) const noexcept { return distance(x) <= tol; }
};

namespace detail {

inline double cross_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double best = std::numeric_limits<double>::infinity();
    for (double x : a)
        for (double y : b) best = std::min(best, std::abs(x - y));
    return best;
}

inline std::vector<double> pick(const SpectralDecomposition& d, const IndexSet& indices) {
    std::vector<double> out;
    out.reserve(indices.size());
    for (std::size_t k : indices) out.push_back(d.eigenvalue(k));
    return out;
}

} // namespace detail

inline bool gap_condition(const PerturbationSplit& split, double d) noexcept {
    return split.norm_plus + split.norm_minus < d;
}

/// Eigenvalues inside any interval of `sigma_spec` form sigma; the rest form
/// Sigma. An eigenvalue within 1e-12 relative of an interval endpoint is
/// rejected as ambiguous.
inline SpectralPartition partition_spectrum(const SpectralDecomposition& decomp,
                                            const IntervalList& sigma_spec) {
    for (const Interval& iv : sigma_spec) {
        if (!(iv.lo <= iv.hi)) {
            throw Error(ErrorCode::InvalidInterval,
                        "interval [" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) +
                            "] has lo > hi");
        }
    }
    const double scale = 1.0 + decomp.norm();
    const double tol = 1e-12 * scale;

    SpectralPartition part;
    for (std::size_t k = 0; k < decomp.dim(); ++k) {
        const double lambda = decomp.eigenvalue(k);
        bool inside = false;
        for (const Interval& iv : sigma_spec) {
            if (std::abs(lambda - iv.lo) <= tol || std::abs(lambda - iv.hi) <= tol) {
                throw Error(ErrorCode::AmbiguousMembership,
                            "eigenvalue " + std::to_string(lambda) +
                                " lies on the boundary of [" + std::to_string(iv.lo) + ", " +
                                std::to_string(iv.hi) + "]");
            }
            inside = inside || iv.contains(lambda);
        }
        (inside ? part.sigma_indices : part.Sigma_indices).push_back(k);
    }
    if (part.sigma_indices.empty() || part.Sigma_indices.empty()) {
        throw Error(ErrorCode::EmptyComponent,
                    part.sigma_indices.empty() ? "no eigenvalue lies in the selected intervals"
                                               : "every eigenvalue lies in the selected intervals");
    }
    part.d = detail::cross_distance(detail::pick(decomp, part.sigma_indices),
                                    detail::pick(decomp, part.Sigma_indices));
    if (!(part.d > 0.0)) {
        throw Error(ErrorCode::EmptyComponent, "components share an eigenvalue (gap is zero)");
    }
    return part;
}

/// Union of [lambda - norm_minus, lambda + norm_plus], overlaps merged.
inline EnlargedSet enlarge(const std::vector<double>& component_eigenvalues, double norm_minus,
                           double norm_plus) {
    if (norm_minus < 0.0 || norm_plus < 0.0) {
        throw Error(ErrorCode::DomainError, "enlargement norms must be nonnegative");
    }
    IntervalList raw;
    raw.reserve(component_eigenvalues.size());
    for (double lambda : component_eigenvalues) raw.push_back({lambda - norm_minus, lambda + norm_plus});
    std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

    EnlargedSet out;
    for (const Interval& iv : raw) {
        if (!out.intervals.empty() && iv.lo <= out.intervals.back().hi) {
            out.intervals.back().hi = std::max(out.intervals.back().hi, iv.hi);
        } else {
            out.intervals.push_back(iv);
        }
    }
    return out;
}

/// Splits spec(A + tV) into omega_t and Omega_t by membership in the
/// enlargements sigma + [-t|V-|, t|V+|] and Sigma + [-t|V-|, t|V+|].
/// `decomp_atv` must be the decomposition of A + tV.
inline PerturbedSeparation perturbed_component_at_t(const SpectralDecomposition& decomp_a,
                                                    const SpectralDecomposition& decomp_atv,
                                                    const SpectralPartition& partition,
                                                    const PerturbationSplit& split, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw Error(ErrorCode::DomainError, "t = " + std::to_string(t) + " outside [0, 1]");
    }
    if (decomp_a.dim() != decomp_atv.dim() || decomp_a.dim() != split.v.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "A, A + tV and V differ in dimension");
    }
    const double np = t * split.norm_plus;
    const double nm = t * split.norm_minus;
    if (!(np + nm < partition.d)) {
        throw Error(ErrorCode::GapConditionViolated,
                    "|V+| + |V-| = " + std::to_string(np + nm) + " is not below d = " +
                        std::to_string(partition.d));
    }
    const EnlargedSet near_sigma = enlarge(detail::pick(decomp_a, partition.sigma_indices), nm, np);
    const EnlargedSet near_Sigma = enlarge(detail::pick(decomp_a, partition.Sigma_indices), nm, np);
    const double tol = 1e-9 * (1.0 + decomp_a.norm() + split.norm_v);

    PerturbedSeparation sep;
    std::vector<double> omega;
    std::vector<double> Omega;
    for (std::size_t k = 0; k < decomp_atv.dim(); ++k) {
        const double mu = decomp_atv.eigenvalue(k);
        const double to_sigma = near_sigma.distance(mu);
        const double to_Sigma = near_Sigma.distance(mu);
        if (std::min(to_sigma, to_Sigma) > tol) {
            throw Error(ErrorCode::EnclosureViolation,
                        "eigenvalue " + std::to_string(mu) + " of the perturbed matrix lies " +
                            std::to_string(std::min(to_sigma, to_Sigma)) +
                            " outside both enlarged components");
        }
        if (to_sigma <= to_Sigma) {
            sep.omega_indices.push_back(k);
            omega.push_back(mu);
        } else {
            sep.Omega_indices.push_back(k);
            Omega.push_back(mu);
        }
    }
    sep.gap_lower_bound = partition.d - np - nm;
    sep.measured_gap = detail::cross_distance(omega, Omega);
    return sep;
}

inline PerturbedSeparation perturbed_component(const SpectralDecomposition& decomp_a,
                                               const SpectralDecomposition& decomp_av,
                                               const SpectralPartition& partition,
                                               const PerturbationSplit& split) {
    return perturbed_component_at_t(decomp_a, decomp_av, partition, split, 1.0);
}

struct EnclosureResult {
    bool enclosed = true;
    /// Largest distance of an eigenvalue of A + V outside the enlargement.
    double max_excess = 0.0;
};

inline EnclosureResult spectral_enclosure_check(const SpectralDecomposition& decomp_a,
                                                const SpectralDecomposition& decomp_av,
                                                const PerturbationSplit& split) {
    std::vector<double> all(decomp_a.eigenvalues.data(),
                            decomp_a.eigenvalues.data() + decomp_a.eigenvalues.size());
    const EnlargedSet hull = enlarge(all, split.norm_minus, split.norm_plus);
    const double tol = 1e-9 * (1.0 + decomp_a.norm() + split.norm_v);
    EnclosureResult out;
    for (std::size_t k = 0; k < decomp_av.dim(); ++k) {
        out.max_excess = std::max(out.max_excess, hull.distance(decomp_av.eigenvalue(k)));
    }
    out.enclosed = out.max_excess <= tol;
    return out;
}

/// For a gap (a, b) of spec(A), the open interval (a + |V+|, b - |V-|) lies
/// in the resolvent set of A + V whenever |V+| + |V-| < b - a.
inline std::optional<Interval> resolvent_interval(double a, double b, const PerturbationSplit& split) {
    if (!(a < b)) {
        throw Error(ErrorCode::InvalidInterval,
                    "(" + std::to_string(a) + ", " + std::to_string(b) + ") is empty");
    }
    if (!(split.norm_plus + split.norm_minus < b - a)) return std::nullopt;
    return Interval{a + split.norm_plus, b - split.norm_minus};
}

/// Same, after checking that (a, b) contains no eigenvalue of A.
inline std::optional<Interval> resolvent_interval(double a, double b, const PerturbationSplit& split,
                                                  const SpectralDecomposition& decomp_a) {
    if (!(a < b)) {
        throw Error(ErrorCode::InvalidInterval,
                    "(" + std::to_string(a) + ", " + std::to_string(b) + ") is empty");
    }
    for (std::size_t k = 0; k < decomp_a.dim(); ++k) {
        const double lambda = decomp_a.eigenvalue(k);
        if (lambda > a && lambda < b) {
            throw Error(ErrorCode::InvalidInterval,
                        "eigenvalue " + std::to_string(lambda) + " lies inside (" +
                            std::to_string(a) + ", " + std::to_string(b) + ")");
        }
    }
    return resolvent_interval(a, b, split);
}

} // namespace subpert
