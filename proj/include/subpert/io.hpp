#pragma once

// Problem and report files (JSON). Reports print every float with 17
// significant digits so they re-parse bit-exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "subpert/error.hpp"
#include "subpert/harness.hpp"
#include "subpert/linalg.hpp"
#include "subpert/spectrum.hpp"

namespace subpert {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kToolVersion = "1.0.0";

struct ProblemFile {
    HermitianMatrix a;
    HermitianMatrix v;
    IntervalList sigma;
};

namespace io_detail {

inline void write_number(std::string& out, double x) {
    if (!std::isfinite(x)) {
        out += "null";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
}

inline void write(std::string& out, const Json& j, int indent, int depth) {
    const auto newline = [&](int level) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * level), ' ');
    };
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            out += Json(it.key()).dump();
            out += indent < 0 ? ":" : ": ";
            write(out, it.value(), indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // Rows of numbers stay on one line.
        const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
        out += '[';
        bool first = true;
        for (const Json& e : j) {
            if (!first) out += flat && indent >= 0 ? ", " : ",";
            first = false;
            if (!flat) newline(depth + 1);
            write(out, e, indent, depth + 1);
        }
        if (!flat) newline(depth);
        out += ']';
        return;
    }
    case Json::value_t::number_float:
        write_number(out, j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::ParseError, "at " + where + ": " + what);
}

inline const Json& require(const Json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) schema_error(where, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) schema_error(where, "missing field \"" + key + "\"");
    return *it;
}

inline double number(const Json& j, const std::string& where) {
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    if (!j.is_number()) schema_error(where, "expected a number");
    return j.get<double>();
}

inline Eigen::MatrixXd square_block(const Json& rows, std::size_t n, const std::string& where) {
    if (!rows.is_array() || rows.size() != n) {
        schema_error(where, "expected " + std::to_string(n) + " rows");
    }
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd out(m, m);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string row_where = where + "/" + std::to_string(i);
        if (!rows[i].is_array() || rows[i].size() != n) {
            schema_error(row_where, "expected " + std::to_string(n) + " columns");
        }
        for (std::size_t k = 0; k < n; ++k) {
            const Json& e = rows[i][k];
            if (!e.is_number()) schema_error(row_where + "/" + std::to_string(k), "expected a number");
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = e.get<double>();
        }
    }
    return out;
}

inline HermitianMatrix matrix_block(const Json& j, const std::string& where) {
    const Json& n_field = require(j, "n", where);
    if (!n_field.is_number_integer() || n_field.get<long long>() < 1) {
        schema_error(where + "/n", "expected a positive integer");
    }
    const auto n = static_cast<std::size_t>(n_field.get<long long>());
    const Eigen::MatrixXd re = square_block(require(j, "real", where), n, where + "/real");
    Eigen::MatrixXd im = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (const auto it = j.find("imag"); it != j.end() && !it->is_null()) {
        im = square_block(*it, n, where + "/imag");
    }
    ComplexMatrix m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    try {
        return HermitianMatrix(std::move(m));
    } catch (const Error& e) {
        throw Error(e.code(), "at " + where + ": " + e.message());
    }
}

inline Json matrix_json(const HermitianMatrix& h) {
    const std::size_t n = h.dim();
    Json re = Json::array();
    Json im = Json::array();
    bool any_imag = false;
    for (std::size_t i = 0; i < n; ++i) {
        Json rr = Json::array();
        Json ir = Json::array();
        for (std::size_t k = 0; k < n; ++k) {
            const Complex z = h(i, k);
            rr.push_back(z.real());
            ir.push_back(z.imag());
            any_imag = any_imag || z.imag() != 0.0;
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ir));
    }
    Json out = {{"n", n}, {"real", std::move(re)}};
    if (any_imag) out["imag"] = std::move(im);
    return out;
}

inline Json index_json(const IndexSet& s) {
    Json out = Json::array();
    for (std::size_t k : s) out.push_back(k);
    return out;
}

inline IndexSet index_set(const Json& j, const std::string& where) {
    if (!j.is_array()) schema_error(where, "expected an array of indices");
    IndexSet out;
    for (const Json& e : j) {
        if (!e.is_number_unsigned()) schema_error(where, "expected nonnegative integers");
        out.push_back(e.get<std::size_t>());
    }
    return out;
}

} // namespace io_detail

/// Serializes with 17 significant digits; non-finite floats become null.
/// `indent` < 0 gives the compact form.
inline std::string dump(const Json& j, int indent = 2) {
    std::string out;
    io_detail::write(out, j, indent, 0);
    return out;
}

inline Json parse_json_text(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        const auto [line, col] = io_detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
}

inline Json intervals_json(const IntervalList& list) {
    Json out = Json::array();
    for (const Interval& iv : list) out.push_back(Json::array({iv.lo, iv.hi}));
    return out;
}

inline IntervalList intervals_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) io_detail::schema_error(where, "expected a nonempty list of [lo, hi] pairs");
    IntervalList out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = where + "/" + std::to_string(i);
        if (!j[i].is_array() || j[i].size() != 2 || !j[i][0].is_number() || !j[i][1].is_number()) {
            io_detail::schema_error(w, "expected [lo, hi]");
        }
        const Interval iv{j[i][0].get<double>(), j[i][1].get<double>()};
        if (!(iv.lo <= iv.hi)) io_detail::schema_error(w, "lo must not exceed hi");
        if (!out.empty() && !(iv.lo > out.back().hi)) {
            io_detail::schema_error(w, "intervals must be sorted and disjoint");
        }
        out.push_back(iv);
    }
    return out;
}

inline Json problem_json(const HermitianMatrix& a, const HermitianMatrix& v, const IntervalList& sigma) {
    return Json{{"format_version", kFormatVersion},
                {"a", io_detail::matrix_json(a)},
                {"v", io_detail::matrix_json(v)},
                {"sigma", intervals_json(sigma)}};
}

inline ProblemFile problem_from_json(const Json& j) {
    using io_detail::require;
    const Json& version = require(j, "format_version", "/");
    if (!version.is_number_integer() || version.get<int>() != kFormatVersion) {
        io_detail::schema_error("/format_version", "unsupported format version");
    }
    HermitianMatrix a = io_detail::matrix_block(require(j, "a", "/"), "/a");
    HermitianMatrix v = io_detail::matrix_block(require(j, "v", "/"), "/v");
    if (a.dim() != v.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "a is " + std::to_string(a.dim()) + "x" + std::to_string(a.dim()) + ", v is " +
                        std::to_string(v.dim()) + "x" + std::to_string(v.dim()));
    }
    return ProblemFile{std::move(a), std::move(v), intervals_from_json(require(j, "sigma", "/"), "/sigma")};
}

inline ProblemFile parse_problem(std::string_view text) { return problem_from_json(parse_json_text(text)); }

/// FNV-1a over the canonical compact serialization of the problem.
inline std::string input_digest(const Json& problem) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : dump(problem, -1)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline Json bound_report_json(const BoundReport& r) {
    Json violations = Json::array();
    for (const Violation& v : r.violations) violations.push_back({{"name", v.name}, {"slack", v.slack}});
    return Json{{"measured_angle", r.measured_angle},
                {"favgeom_applicable", r.favgeom_applicable},
                {"favgeom_bound", r.favgeom_bound},
                {"generic_applicable", r.generic_applicable},
                {"generic_bound", r.generic_bound},
                {"corollary26_applicable", r.corollary26_applicable},
                {"corollary26_bound", r.corollary26_bound},
                {"sin2Theta_applicable", r.sin2Theta_applicable},
                {"sin2Theta_measured", r.sin2Theta_measured},
                {"sin2Theta_bound", r.sin2Theta_bound},
                {"integral_applicable", r.integral_applicable},
                {"integral_bound", r.integral_bound},
                {"violations", std::move(violations)},
                {"max_slack", r.max_slack}};
}

inline BoundReport bound_report_from_json(const Json& j) {
    using io_detail::number;
    using io_detail::require;
    const std::string w = "/report";
    auto flag = [&](const char* key) {
        const Json& f = require(j, key, w);
        if (!f.is_boolean()) io_detail::schema_error(w + "/" + key, "expected a boolean");
        return f.get<bool>();
    };
    auto num = [&](const char* key) { return number(require(j, key, w), w + "/" + key); };
    BoundReport r;
    r.measured_angle = num("measured_angle");
    r.favgeom_applicable = flag("favgeom_applicable");
    r.favgeom_bound = num("favgeom_bound");
    r.generic_applicable = flag("generic_applicable");
    r.generic_bound = num("generic_bound");
    r.corollary26_applicable = flag("corollary26_applicable");
    r.corollary26_bound = num("corollary26_bound");
    r.sin2Theta_applicable = flag("sin2Theta_applicable");
    r.sin2Theta_measured = num("sin2Theta_measured");
    r.sin2Theta_bound = num("sin2Theta_bound");
    r.integral_applicable = flag("integral_applicable");
    r.integral_bound = num("integral_bound");
    for (const Json& v : require(j, "violations", w)) {
        r.violations.push_back({require(v, "name", w).get<std::string>(),
                                number(require(v, "slack", w), w + "/violations")});
    }
    r.max_slack = num("max_slack");
    return r;
}

/// Full report document for one analysed problem.
inline Json report_json(const Json& problem, const InstanceAnalysis& an) {
    Json separation = nullptr;
    if (an.separation) {
        separation = {{"omega_indices", io_detail::index_json(an.separation->omega_indices)},
                      {"Omega_indices", io_detail::index_json(an.separation->Omega_indices)},
                      {"gap_lower_bound", an.separation->gap_lower_bound},
                      {"measured_gap", an.separation->measured_gap}};
    }
    Json angles = nullptr;
    if (an.angles) {
        angles = {{"max_angle", an.angles->max_angle},
                  {"sin2Theta_norm", an.angles->sin2Theta_norm},
                  {"singular_values", an.angles->singular_values}};
    }
    return Json{{"format_version", kFormatVersion},
                {"tool_version", std::string(kToolVersion)},
                {"input_digest", input_digest(problem)},
                {"problem", problem},
                {"geometry", std::string(to_string(an.geometry))},
                {"gap_condition", an.gap_condition},
                {"partition",
                 {{"sigma_indices", io_detail::index_json(an.partition.sigma_indices)},
                  {"Sigma_indices", io_detail::index_json(an.partition.Sigma_indices)},
                  {"d", an.partition.d}}},
                {"norms",
                 {{"norm_plus", an.split.norm_plus},
                  {"norm_minus", an.split.norm_minus},
                  {"norm_v", an.split.norm_v}}},
                {"enclosure",
                 {{"enclosed", an.enclosure.enclosed}, {"max_excess", an.enclosure.max_excess}}},
                {"separation", std::move(separation)},
                {"angles", std::move(angles)},
                {"report", bound_report_json(an.report)}};
}

} // namespace subpert
