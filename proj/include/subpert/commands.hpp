#pragma once

// Subcommands of the `subpert` tool. Each writes its result to `out`,
// diagnostics to `err`, and returns the process exit code.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "subpert/bounds.hpp"
#include "subpert/error.hpp"
#include "subpert/harness.hpp"
#include "subpert/io.hpp"

namespace subpert::cli {

inline constexpr int kExitClean = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitViolation = 2;

/// Shortest representation that parses back to the same double.
inline std::string shortest(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline int report_error(std::ostream& err, const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
}

struct AnalyzeResult {
    InstanceAnalysis analysis;
    Json report;
};

inline AnalyzeResult analyze_problem(const ProblemFile& problem, const VerifyOptions& opts) {
    const Instance inst{problem.a, problem.v, problem.sigma, 0, "file"};
    InstanceAnalysis an = verify_instance(inst, opts);
    Json report = report_json(problem_json(problem.a, problem.v, problem.sigma), an);
    return {std::move(an), std::move(report)};
}

inline int cmd_analyze(const std::string& path, const VerifyOptions& opts, std::ostream& out,
                       std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "error: cannot open " << path << '\n';
        return kExitInputError;
    }
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        const ProblemFile problem = parse_problem(text);
        const auto [an, report] = analyze_problem(problem, opts);
        out << dump(report) << '\n';
        if (!an.gap_condition) {
            err << "note: |V+| + |V-| >= d; angle bounds not applicable, enclosure checked only\n";
        }
        for (const Violation& v : an.report.violations) {
            err << "violation: " << v.name << " slack " << shortest(v.slack) << '\n';
        }
        return an.report.violations.empty() ? kExitClean : kExitViolation;
    } catch (const Error& e) {
        err << path << ": ";
        return report_error(err, e);
    }
}

inline int cmd_bound_table(double x_min, double x_max, int points, std::ostream& out, std::ostream& err) {
    const double cap = c_crit();
    if (!(x_min >= 0.0 && x_min <= x_max && x_max <= cap)) {
        return report_error(err, Error(ErrorCode::DomainError,
                                       "need 0 <= min <= max <= c_crit = " + shortest(cap)));
    }
    if (points < 1 || (points == 1 && x_min != x_max)) {
        return report_error(err, Error(ErrorCode::DomainError,
                                       "need at least 2 points unless min == max"));
    }
    out << "x,N,branch\n";
    for (int i = 0; i < points; ++i) {
        double x = x_min;
        if (points > 1) {
            x = (i == points - 1) ? x_max
                                  : x_min + (x_max - x_min) * static_cast<double>(i) / (points - 1);
        }
        out << shortest(x) << ',' << shortest(bound_N(x)) << ',' << bound_N_branch(x) << '\n';
    }
    return kExitClean;
}

inline int cmd_kappa(std::ostream& out) {
    const double k = kappa();
    char buf[160];
    std::snprintf(buf, sizeof buf, "kappa = %.15g\n", k);
    out << buf;
    std::snprintf(buf, sizeof buf, "bracket = (%.15g, %.15g]\n", branch_point_2(), kappa_upper_bracket());
    out << buf;
    std::snprintf(buf, sizeof buf, "residual = %.3e\n", std::abs(detail::kappa_residual(k)));
    out << buf;
    return kExitClean;
}

inline int cmd_sharp(double v_plus, double v_minus, std::ostream& out, std::ostream& err) {
    try {
        const SharpExample ex = sharp_example_2x2(v_plus, v_minus);
        const ProblemFile problem{ex.instance.a, ex.instance.v, ex.instance.sigma_spec};
        auto [an, report] = analyze_problem(problem, VerifyOptions{});
        const double measured = an.report.measured_angle;
        const double bound = an.report.favgeom_bound;
        const double gap = std::max(std::abs(measured - bound), std::abs(measured - ex.expected_angle));
        const bool sharp = an.report.favgeom_applicable && gap <= 1e-11;
        report["sharpness"] = {{"expected_angle", ex.expected_angle},
                               {"measured_angle", measured},
                               {"favgeom_bound", bound},
                               {"max_difference", gap},
                               {"attained", sharp}};
        out << dump(report) << '\n';
        err << "measured angle " << shortest(measured) << ", bound " << shortest(bound)
            << (sharp ? " (attained)" : " (NOT attained)") << '\n';
        return sharp && an.report.violations.empty() ? kExitClean : kExitViolation;
    } catch (const Error& e) {
        return report_error(err, e);
    }
}

// ---------------------------------------------------------------------------
// Fuzz campaigns

enum class LayoutChoice { Separated, Interlaced, Mixed };

struct FuzzOptions {
    std::size_t n = 8;
    std::size_t count = 1000;
    double scale = 0.5;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    LayoutChoice layout = LayoutChoice::Mixed;
    std::string out_dir;
    VerifyOptions verify;
};

/// The instance a campaign checks at position `index`: shape choices come
/// from a stream keyed by (seed, index), independent of the instance's own.
inline Instance fuzz_instance(const FuzzOptions& opts, std::uint64_t index) {
    std::mt19937_64 rng = instance_rng(opts.seed ^ 0xa5a5a5a5a5a5a5a5ULL, index);
    std::uniform_int_distribution<std::size_t> split_dist(1, opts.n - 1);
    std::uniform_int_distribution<int> coin(0, 5);
    GapSpec gap;
    gap.d_target = std::exp(std::uniform_real_distribution<double>(-2.0, 2.0)(rng));
    gap.component_split = split_dist(rng);
    switch (opts.layout) {
    case LayoutChoice::Separated: gap.layout = ClusterLayout::Separated; break;
    case LayoutChoice::Interlaced: gap.layout = ClusterLayout::Interlaced; break;
    case LayoutChoice::Mixed:
        gap.layout = coin(rng) % 2 == 0 ? ClusterLayout::Separated : ClusterLayout::Interlaced;
        break;
    }
    const int kind = coin(rng);
    const Definiteness def = kind == 0   ? Definiteness::PositiveSemidefinite
                             : kind == 1 ? Definiteness::NegativeSemidefinite
                                         : Definiteness::Indefinite;
    return random_instance(opts.n, gap, opts.scale, opts.seed, index, def);
}

struct FuzzSummary {
    std::size_t checked = 0;
    std::size_t gap_condition = 0;
    std::size_t favourable = 0;
    std::size_t favgeom = 0;
    std::size_t generic = 0;
    std::size_t corollary26 = 0;
    std::size_t sin2Theta = 0;
    std::size_t integral = 0;
    std::size_t violations = 0;
    std::size_t violating_instances = 0;
    double max_slack = -std::numeric_limits<double>::infinity();
    double max_measured_angle = 0.0;
    std::vector<std::pair<std::size_t, Violation>> first_violations;
};

inline Json summary_json(const FuzzOptions& opts, const FuzzSummary& s) {
    Json first = Json::array();
    for (const auto& [idx, v] : s.first_violations) {
        first.push_back({{"instance", idx}, {"name", v.name}, {"slack", v.slack}});
    }
    return Json{{"n", opts.n},
                {"count", opts.count},
                {"scale", opts.scale},
                {"seed", opts.seed},
                {"checked", s.checked},
                {"gap_condition_holds", s.gap_condition},
                {"favourable_geometry", s.favourable},
                {"applicable",
                 {{"favgeom", s.favgeom},
                  {"generic", s.generic},
                  {"corollary26", s.corollary26},
                  {"sin2Theta", s.sin2Theta},
                  {"integral", s.integral}}},
                {"violations", s.violations},
                {"violating_instances", s.violating_instances},
                {"max_slack", s.max_slack},
                {"max_measured_angle", s.max_measured_angle},
                {"first_violations", std::move(first)}};
}

/// Runs the campaign across `jobs` threads. Results are stored by instance
/// index and folded in index order, so the summary does not depend on jobs.
inline FuzzSummary run_fuzz(const FuzzOptions& opts, std::vector<Json>* reports = nullptr) {
    if (opts.n < 2) throw Error(ErrorCode::InvalidSpec, "n must be at least 2");
    if (opts.count < 1) throw Error(ErrorCode::InvalidSpec, "count must be at least 1");
    if (!(opts.scale >= 0.0)) throw Error(ErrorCode::InvalidSpec, "scale must be nonnegative");

    std::vector<std::optional<InstanceAnalysis>> results(opts.count);
    std::vector<Json> docs(reports != nullptr ? opts.count : 0);
    std::atomic<std::size_t> next{0};
    std::vector<std::string> failures(opts.count);

    auto worker = [&] {
        for (std::size_t i = next++; i < opts.count; i = next++) {
            try {
                const Instance inst = fuzz_instance(opts, i);
                InstanceAnalysis an = verify_instance(inst, opts.verify);
                if (reports != nullptr) docs[i] = report_json(problem_json(inst.a, inst.v, inst.sigma_spec), an);
                results[i] = std::move(an);
            } catch (const Error& e) {
                failures[i] = e.what();
            }
        }
    };
    const unsigned jobs = std::max(1u, opts.jobs);
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    for (std::size_t i = 0; i < opts.count; ++i) {
        if (!failures[i].empty()) {
            throw Error(ErrorCode::InvalidSpec, "instance " + std::to_string(i) + ": " + failures[i]);
        }
    }

    FuzzSummary s;
    for (std::size_t i = 0; i < opts.count; ++i) {
        const InstanceAnalysis& an = *results[i];
        const BoundReport& r = an.report;
        ++s.checked;
        s.gap_condition += an.gap_condition;
        s.favourable += an.geometry == GeometryKind::Favourable;
        s.favgeom += r.favgeom_applicable;
        s.generic += r.generic_applicable;
        s.corollary26 += r.corollary26_applicable;
        s.sin2Theta += r.sin2Theta_applicable;
        s.integral += r.integral_applicable;
        s.violations += r.violations.size();
        s.violating_instances += !r.violations.empty();
        s.max_slack = std::max(s.max_slack, r.max_slack);
        s.max_measured_angle = std::max(s.max_measured_angle, r.measured_angle);
        for (const Violation& v : r.violations) {
            if (s.first_violations.size() < 20) s.first_violations.emplace_back(i, v);
        }
    }
    if (reports != nullptr) *reports = std::move(docs);
    return s;
}

inline int cmd_fuzz(const FuzzOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        std::vector<Json> reports;
        const bool keep = !opts.out_dir.empty();
        const FuzzSummary s = run_fuzz(opts, keep ? &reports : nullptr);
        if (keep) {
            std::filesystem::create_directories(opts.out_dir);
            for (std::size_t i = 0; i < reports.size(); ++i) {
                char name[48];
                std::snprintf(name, sizeof name, "instance_%06zu.json", i);
                std::ofstream f(std::filesystem::path(opts.out_dir) / name);
                f << dump(reports[i]) << '\n';
                if (!f) {
                    err << "error: cannot write " << name << " in " << opts.out_dir << '\n';
                    return kExitInputError;
                }
            }
        }
        out << dump(summary_json(opts, s)) << '\n';
        return s.violations == 0 ? kExitClean : kExitViolation;
    } catch (const Error& e) {
        return report_error(err, e);
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

} // namespace subpert::cli
