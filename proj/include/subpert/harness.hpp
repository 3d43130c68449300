#pragma once

// Subspace-angle measurement, instance generation and the bound-checking
// pipeline. Violated inequalities are returned as data, never thrown.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "subpert/bounds.hpp"
#include "subpert/error.hpp"
#include "subpert/linalg.hpp"
#include "subpert/spectrum.hpp"

namespace subpert {

struct AngleMeasurement {
    /// arcsin |P - Q|, the maximal angle between the ranges.
    double max_angle = 0.0;
    /// |sin 2 Theta| = max over singular values s of 2 s sqrt(1 - s^2).
    double sin2Theta_norm = 0.0;
    /// Singular values of P - Q, descending, clamped to [0, 1].
    std::vector<double> singular_values;
};

inline AngleMeasurement measure_angles(const Projector& p, const Projector& q) {
    if (p.dim() != q.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "projectors of dimension " + std::to_string(p.dim()) + " and " +
                        std::to_string(q.dim()));
    }
    AngleMeasurement out;
    if (p.dim() == 0) return out;
    Eigen::JacobiSVD<ComplexMatrix> svd(p.matrix - q.matrix);
    const RealVector& s = svd.singularValues();
    out.singular_values.reserve(static_cast<std::size_t>(s.size()));
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        const double sk = std::clamp(s(k), 0.0, 1.0);
        out.singular_values.push_back(sk);
        out.sin2Theta_norm = std::max(out.sin2Theta_norm, 2.0 * sk * std::sqrt(1.0 - sk * sk));
    }
    out.max_angle = std::asin(out.singular_values.front());
    return out;
}

enum class GeometryKind { Favourable, Generic };

constexpr std::string_view to_string(GeometryKind g) noexcept {
    return g == GeometryKind::Favourable ? "favourable" : "generic";
}

/// Favourable iff conv(sigma) misses Sigma or sigma misses conv(Sigma).
inline GeometryKind geometry_kind(const SpectralDecomposition& decomp_a,
                                  const SpectralPartition& partition) {
    const auto hull_misses = [&](const IndexSet& hull_of, const IndexSet& others) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t k : hull_of) {
            lo = std::min(lo, decomp_a.eigenvalue(k));
            hi = std::max(hi, decomp_a.eigenvalue(k));
        }
        return std::none_of(others.begin(), others.end(), [&](std::size_t k) {
            const double mu = decomp_a.eigenvalue(k);
            return mu >= lo && mu <= hi;
        });
    };
    if (hull_misses(partition.sigma_indices, partition.Sigma_indices) ||
        hull_misses(partition.Sigma_indices, partition.sigma_indices)) {
        return GeometryKind::Favourable;
    }
    return GeometryKind::Generic;
}

struct Instance {
    HermitianMatrix a;
    HermitianMatrix v;
    IntervalList sigma_spec;
    std::uint64_t seed = 0;
    std::string label;
};

struct SharpExample {
    Instance instance;
    double expected_angle = 0.0;
};

/// The 2x2 family on which the favourable-geometry bound is attained:
/// A = diag(1/2, -1/2), spec(V) = {-v_minus, v_plus}, sigma = {1/2}, d = 1.
inline SharpExample sharp_example_2x2(double v_plus, double v_minus) {
    if (!(v_plus >= 0.0 && v_minus >= 0.0 && v_plus < 1.0 && v_minus < 1.0 && v_plus + v_minus < 1.0)) {
        throw Error(ErrorCode::DomainError,
                    "need 0 <= v+, v- < 1 and v+ + v- < 1; got v+ = " + std::to_string(v_plus) +
                        ", v- = " + std::to_string(v_minus));
    }
    const double v = v_plus + v_minus;
    const double off = v * std::sqrt(1.0 - v * v) / 2.0;
    Eigen::MatrixXd vm(2, 2);
    vm << (v_plus - v_minus - v * v) / 2.0, off, off, (v * v + v_plus - v_minus) / 2.0;
    Instance inst{HermitianMatrix::diagonal({0.5, -0.5}), HermitianMatrix::from_real(vm),
                  {Interval{0.0, 1.0}}, 0, "sharp-2x2"};
    return {std::move(inst), 0.5 * std::asin(v)};
}

// ---------------------------------------------------------------------------
// Random instances

enum class ClusterLayout {
    /// sigma below Sigma; both hulls miss the other component.
    Separated,
    /// sigma | Sigma | sigma | Sigma blocks; neither hull misses the other.
    Interlaced,
};

enum class Definiteness { Indefinite, PositiveSemidefinite, NegativeSemidefinite };

struct GapSpec {
    double d_target = 1.0;
    /// Number of eigenvalues in sigma.
    std::size_t component_split = 1;
    ClusterLayout layout = ClusterLayout::Separated;
};

/// Per-instance generator keyed by (seed, index): results never depend on
/// evaluation order.
inline std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return std::mt19937_64(mix(mix(seed) ^ (index * 0xd1b54a32d192ed03ULL + 1)));
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of diag(R) divided out.
inline ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto m = static_cast<Eigen::Index>(n);
    ComplexMatrix z(m, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i) z(i, j) = Complex(normal(rng), normal(rng));
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m, m);
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < m; ++k) {
        const double mag = std::abs(r(k, k));
        if (mag > 0.0) q.col(k) *= r(k, k) / mag;
    }
    return q;
}

/// GUE-style Hermitian matrix with unit-variance entries.
inline HermitianMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto m = static_cast<Eigen::Index>(n);
    ComplexMatrix h(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        h(j, j) = normal(rng);
        for (Eigen::Index i = j + 1; i < m; ++i) {
            h(i, j) = Complex(normal(rng), normal(rng)) / std::numbers::sqrt2;
            h(j, i) = std::conj(h(i, j));
        }
    }
    return HermitianMatrix(std::move(h));
}

namespace detail {

// Eigenvalues arranged in alternating blocks; every gap between blocks of
// different labels is at least d, and one of them equals d exactly.
struct SpectrumLayout {
    std::vector<double> eigenvalues;
    IntervalList sigma_spec;
};

inline SpectrumLayout layout_spectrum(std::size_t n, const GapSpec& gap, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n_sigma = gap.component_split;
    const std::size_t n_Sigma = n - n_sigma;

    // Block sizes: (sigma, Sigma) or (sigma, Sigma, sigma, Sigma).
    std::vector<std::pair<bool, std::size_t>> blocks;
    if (gap.layout == ClusterLayout::Interlaced && n_sigma >= 2 && n_Sigma >= 2) {
        const std::size_t s1 = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(n_sigma - 1));
        const std::size_t t1 = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(n_Sigma - 1));
        blocks = {{true, std::min(s1, n_sigma - 1)}, {false, std::min(t1, n_Sigma - 1)}};
        blocks.push_back({true, n_sigma - blocks[0].second});
        blocks.push_back({false, n_Sigma - blocks[1].second});
    } else if (gap.layout == ClusterLayout::Interlaced && n_sigma >= 2) {
        const std::size_t s1 = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(n_sigma - 1));
        blocks = {{true, std::min(s1, n_sigma - 1)}, {false, n_Sigma}};
        blocks.push_back({true, n_sigma - blocks[0].second});
    } else if (gap.layout == ClusterLayout::Interlaced && n_Sigma >= 2) {
        const std::size_t t1 = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(n_Sigma - 1));
        blocks = {{false, std::min(t1, n_Sigma - 1)}, {true, n_sigma}};
        blocks.push_back({false, n_Sigma - blocks[0].second});
    } else {
        blocks = {{true, n_sigma}, {false, n_Sigma}};
    }

    const double d = gap.d_target;
    const std::size_t exact_gap = static_cast<std::size_t>(unit(rng) * static_cast<double>(blocks.size() - 1));
    SpectrumLayout out;
    double cursor = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (b > 0) cursor += (b - 1 == exact_gap) ? d : d * (1.0 + unit(rng));
        const double width = d * 1.5 * unit(rng);
        const auto [is_sigma, count] = blocks[b];
        std::vector<double> vals(count);
        vals[0] = cursor;
        if (count > 1) vals[count - 1] = cursor + width;
        for (std::size_t i = 1; i + 1 < count; ++i) vals[i] = cursor + width * unit(rng);
        std::sort(vals.begin(), vals.end());
        if (is_sigma) out.sigma_spec.push_back({vals.front() - d / 2.0, vals.back() + d / 2.0});
        out.eigenvalues.insert(out.eigenvalues.end(), vals.begin(), vals.end());
        cursor = vals.back();
    }
    // Centre the spectrum so |A| stays comparable to its width.
    const double shift = 0.5 * (out.eigenvalues.front() + out.eigenvalues.back());
    for (double& x : out.eigenvalues) x -= shift;
    for (Interval& iv : out.sigma_spec) {
        iv.lo -= shift;
        iv.hi -= shift;
    }
    return out;
}

} // namespace detail

/// A = Q diag(lambda) Q* with Haar Q and a two-component spectrum at gap
/// exactly d_target; V Hermitian, rescaled so |V+| + |V-| equals
/// perturbation_scale * d_target. Deterministic in (seed, index).
inline Instance random_instance(std::size_t n, const GapSpec& gap, double perturbation_scale,
                                std::uint64_t seed, std::uint64_t index = 0,
                                Definiteness definiteness = Definiteness::Indefinite) {
    if (n < 2) throw Error(ErrorCode::InvalidSpec, "n must be at least 2");
    if (!(gap.d_target > 0.0)) throw Error(ErrorCode::InvalidSpec, "d_target must be positive");
    if (gap.component_split < 1 || gap.component_split >= n) {
        throw Error(ErrorCode::InvalidSpec, "component_split must lie in [1, n)");
    }
    if (!(perturbation_scale >= 0.0) || !std::isfinite(perturbation_scale)) {
        throw Error(ErrorCode::InvalidSpec, "perturbation scale must be finite and nonnegative");
    }
    std::mt19937_64 rng = instance_rng(seed, index);

    const detail::SpectrumLayout layout = detail::layout_spectrum(n, gap, rng);
    const ComplexMatrix q = random_unitary(n, rng);
    RealVector lambda(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) lambda(static_cast<Eigen::Index>(k)) = layout.eigenvalues[k];
    HermitianMatrix a(q * lambda.asDiagonal() * q.adjoint());

    HermitianMatrix v = random_hermitian(n, rng);
    if (definiteness != Definiteness::Indefinite) {
        const SpectralDecomposition dv = eigh(v);
        RealVector mags = dv.eigenvalues.cwiseAbs();
        if (definiteness == Definiteness::NegativeSemidefinite) mags = -mags;
        v = HermitianMatrix(dv.eigenvectors * mags.asDiagonal() * dv.eigenvectors.adjoint());
    }
    const PerturbationSplit split = sign_split(v);
    const double target = perturbation_scale * gap.d_target;
    const double current = split.norm_sum();
    v = (target == 0.0 || current == 0.0) ? HermitianMatrix::zero(n) : v.scaled(target / current);

    return Instance{std::move(a), std::move(v), layout.sigma_spec, seed,
                    "random n=" + std::to_string(n) + " index=" + std::to_string(index)};
}

// ---------------------------------------------------------------------------
// Bound checking

struct Violation {
    std::string name;
    /// measured - bound; positive means the inequality failed.
    double slack = 0.0;
    friend bool operator==(const Violation&, const Violation&) = default;
};

struct BoundReport {
    double measured_angle = 0.0;
    bool favgeom_applicable = false;
    double favgeom_bound = 0.0;
    bool generic_applicable = false;
    double generic_bound = 0.0;
    bool corollary26_applicable = false;
    double corollary26_bound = 0.0;
    bool sin2Theta_applicable = false;
    double sin2Theta_measured = 0.0;
    double sin2Theta_bound = 0.0;
    bool integral_applicable = false;
    double integral_bound = 0.0;
    std::vector<Violation> violations;
    /// Largest measured - bound over every inequality checked (negative when
    /// all hold with room to spare).
    double max_slack = -std::numeric_limits<double>::infinity();

    friend bool operator==(const BoundReport&, const BoundReport&) = default;
};

struct VerifyOptions {
    /// Absolute slack allowed on angle and norm comparisons.
    double tolerance = 1e-9;
    /// Slack for sin(2 theta) <= |sin 2 Theta|.
    double sin2theta_tolerance = 1e-10;
};

/// Everything the pipeline learns about one instance.
struct InstanceAnalysis {
    SpectralPartition partition;
    PerturbationSplit split;
    GeometryKind geometry = GeometryKind::Generic;
    bool gap_condition = false;
    EnclosureResult enclosure;
    std::optional<PerturbedSeparation> separation;
    std::optional<AngleMeasurement> angles;
    BoundReport report;
};

namespace detail {

inline void check_le(BoundReport& report, const std::string& name, double measured, double bound,
                     double tol) {
    const double slack = measured - bound;
    report.max_slack = std::max(report.max_slack, slack);
    if (slack > tol) report.violations.push_back({name, slack});
}

} // namespace detail

/// Runs every applicable inequality on one instance. Throws only when the
/// instance itself is malformed (bad partition, dimension mismatch).
inline InstanceAnalysis verify_instance(const Instance& inst, const VerifyOptions& opts = {}) {
    if (inst.a.dim() != inst.v.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "A and V differ in dimension");
    }
    const SpectralDecomposition decomp_a = eigh(inst.a);
    SpectralPartition partition = partition_spectrum(decomp_a, inst.sigma_spec);
    PerturbationSplit split = sign_split(inst.v);
    const SpectralDecomposition decomp_av = eigh(inst.a + inst.v);

    InstanceAnalysis out{.partition = std::move(partition),
                         .split = std::move(split),
                         .geometry = GeometryKind::Generic,
                         .gap_condition = false,
                         .enclosure = {},
                         .separation = std::nullopt,
                         .angles = std::nullopt,
                         .report = {}};
    const SpectralPartition& part = out.partition;
    const PerturbationSplit& sp = out.split;
    BoundReport& rep = out.report;
    const double tol = opts.tolerance;
    const double d = part.d;
    const double sum = sp.norm_sum();

    out.geometry = geometry_kind(decomp_a, part);
    out.gap_condition = gap_condition(sp, d);

    out.enclosure = spectral_enclosure_check(decomp_a, decomp_av, sp);
    if (!out.enclosure.enclosed) rep.violations.push_back({"enclosure", out.enclosure.max_excess});

    // Gaps of spec(A) shrink to resolvent intervals of A + V.
    const double scale_tol = 1e-9 * (1.0 + decomp_a.norm() + sp.norm_v);
    for (std::size_t k = 0; k + 1 < decomp_a.dim(); ++k) {
        const double lo = decomp_a.eigenvalue(k);
        const double hi = decomp_a.eigenvalue(k + 1);
        if (!(hi > lo)) continue;
        const auto free = resolvent_interval(lo, hi, sp);
        if (!free) continue;
        for (std::size_t j = 0; j < decomp_av.dim(); ++j) {
            const double mu = decomp_av.eigenvalue(j);
            const double depth = std::min(mu - free->lo, free->hi - mu);
            if (depth > scale_tol) rep.violations.push_back({"resolvent_interval", depth});
        }
    }

    if (!out.gap_condition) {
        rep.max_slack = std::max(rep.max_slack, out.enclosure.max_excess);
        return out;
    }

    try {
        out.separation = perturbed_component(decomp_a, decomp_av, part, sp);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EnclosureViolation) throw;
        rep.violations.push_back({"omega_assignment", out.enclosure.max_excess});
        return out;
    }
    const PerturbedSeparation& sep = *out.separation;
    if (sep.omega_indices.size() != part.sigma_indices.size()) {
        rep.violations.push_back(
            {"rank", static_cast<double>(sep.omega_indices.size()) -
                         static_cast<double>(part.sigma_indices.size())});
    }
    detail::check_le(rep, "gap_lower_bound", sep.gap_lower_bound, sep.measured_gap, 1e-10);

    const Projector p = spectral_projector(decomp_a, part.sigma_indices);
    const Projector q = spectral_projector(decomp_av, sep.omega_indices);
    out.angles = measure_angles(p, q);
    const AngleMeasurement& ang = *out.angles;
    rep.measured_angle = ang.max_angle;

    if (out.geometry == GeometryKind::Favourable) {
        rep.favgeom_applicable = true;
        rep.favgeom_bound = favgeom_bound(sp.norm_plus, sp.norm_minus, d);
        detail::check_le(rep, "favgeom", ang.max_angle, rep.favgeom_bound, tol);
    }
    if (sum < 2.0 * c_crit() * d) {
        rep.generic_applicable = true;
        rep.generic_bound = generic_bound(sp.norm_plus, sp.norm_minus, d);
        detail::check_le(rep, "generic", ang.max_angle, rep.generic_bound, tol);
    }
    if (sum <= 2.0 * d / std::numbers::pi) {
        rep.corollary26_applicable = true;
        rep.corollary26_bound = corollary_half_arcsin_bound(sp.norm_plus, sp.norm_minus, d);
        detail::check_le(rep, "corollary26", ang.max_angle, rep.corollary26_bound, tol);
    }

    rep.sin2Theta_applicable = true;
    rep.sin2Theta_measured = ang.sin2Theta_norm;
    rep.sin2Theta_bound =
        sin2theta_bound(sp.norm_plus, sp.norm_minus, d, out.geometry == GeometryKind::Favourable);
    detail::check_le(rep, "sin2Theta", ang.sin2Theta_norm, rep.sin2Theta_bound, tol);
    detail::check_le(rep, "sin2theta_vs_sin2Theta", std::sin(2.0 * ang.max_angle), ang.sin2Theta_norm,
                     opts.sin2theta_tolerance);
    detail::check_le(rep, "sin2theta", std::sin(2.0 * ang.max_angle), rep.sin2Theta_bound, tol);

    rep.integral_applicable = true;
    rep.integral_bound = integral_bound(sp.norm_plus, sp.norm_minus, d).value;
    detail::check_le(rep, "integral", ang.max_angle, rep.integral_bound, tol);

    rep.max_slack = std::max(rep.max_slack, out.enclosure.max_excess);
    return out;
}

// ---------------------------------------------------------------------------
// Homotopy t -> E_{A+tV}(omega_t)

struct PathPoint {
    double t = 0.0;
    PerturbedSeparation separation;
    Projector projector;
    /// |E_{t_prev} - E_t|; zero at t = 0.
    double step_delta = 0.0;
    /// path_step_bound(t_prev, t, ...); zero at t = 0.
    double step_bound = 0.0;
};

struct PathScan {
    std::vector<PathPoint> points;
    std::vector<Violation> violations;
};

/// Tracks omega_t on the grid t_j = j / steps, j = 0..steps.
inline PathScan path_scan(const Instance& inst, int steps, double tolerance = 1e-9) {
    if (steps < 2) throw Error(ErrorCode::InvalidSpec, "path scan needs at least 2 steps");
    const SpectralDecomposition decomp_a = eigh(inst.a);
    const SpectralPartition part = partition_spectrum(decomp_a, inst.sigma_spec);
    const PerturbationSplit split = sign_split(inst.v);
    if (!gap_condition(split, part.d)) {
        throw Error(ErrorCode::GapConditionViolated, "|V+| + |V-| must be below d at t = 1");
    }

    PathScan scan;
    scan.points.reserve(static_cast<std::size_t>(steps) + 1);
    for (int j = 0; j <= steps; ++j) {
        const double t = (j == steps) ? 1.0 : static_cast<double>(j) / steps;
        const SpectralDecomposition decomp_t = eigh(inst.a + inst.v.scaled(t));
        PerturbedSeparation sep = perturbed_component_at_t(decomp_a, decomp_t, part, split, t);
        Projector proj = spectral_projector(decomp_t, sep.omega_indices);

        PathPoint point{t, std::move(sep), std::move(proj)};
        if (j > 0) {
            const PathPoint& prev = scan.points.back();
            point.step_delta = spectral_norm(prev.projector.matrix - point.projector.matrix);
            point.step_bound =
                path_step_bound(prev.t, t, split.norm_v, split.norm_plus, split.norm_minus, part.d);
            if (point.step_delta > point.step_bound + tolerance) {
                scan.violations.push_back({"path_step t=" + std::to_string(t),
                                           point.step_delta - point.step_bound});
            }
        }
        if (point.projector.rank != part.sigma_indices.size()) {
            scan.violations.push_back({"path_rank t=" + std::to_string(t),
                                       static_cast<double>(point.projector.rank) -
                                           static_cast<double>(part.sigma_indices.size())});
        }
        scan.points.push_back(std::move(point));
    }
    return scan;
}

} // namespace subpert
