#include "lebdec/problem_io.hpp"

#include "lebdec/forms.hpp"
#include "lebdec/measure.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace lebdec::io {

using nlohmann::json;
using nlohmann::ordered_json;

Mode mode_from_string(const std::string& s) {
    if (s == "measures") return Mode::Measures;
    if (s == "forms") return Mode::Forms;
    throw ParseError("unknown mode '" + s + "' (expected 'measures' or 'forms')");
}

Backend backend_from_string(const std::string& s) {
    if (s == "exact") return Backend::Exact;
    if (s == "float") return Backend::Float;
    throw ParseError("unknown backend '" + s + "' (expected 'exact' or 'float')");
}

const char* to_string(Mode m) { return m == Mode::Measures ? "measures" : "forms"; }
const char* to_string(Backend b) { return b == Backend::Exact ? "exact" : "float"; }

Backend default_backend(Mode m) { return m == Mode::Measures ? Backend::Exact : Backend::Float; }
double default_tol(Mode m) { return m == Mode::Measures ? 1e-12 : 1e-10; }

namespace {

std::string value_to_string(const json& j, const std::string& where) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number()) return j.dump();
    throw ParseError(where + ": expected a number or a numeric string");
}

// Validates that the text parses as a rational; range checks are separate.
Rational checked_rational(const std::string& text, const std::string& where) {
    try {
        return parse_rational(text);
    } catch (const std::invalid_argument& e) {
        throw ParseError(where + ": " + e.what());
    }
}

std::vector<std::string> parse_weight_map(const json& doc, const std::string& key,
                                          const std::vector<std::string>& atoms,
                                          const std::string& origin) {
    if (!doc.contains(key)) throw ParseError(origin + ": missing field '" + key + "'");
    const json& map = doc.at(key);
    if (!map.is_object()) throw ParseError(origin + ": field '" + key + "' must be an object");
    std::vector<std::string> out;
    out.reserve(atoms.size());
    for (const auto& atom : atoms) {
        if (!map.contains(atom))
            throw ParseError(origin + ": " + key + " has no weight for atom '" + atom + "'");
        const std::string where = origin + ": " + key + "['" + atom + "']";
        const std::string text = value_to_string(map.at(atom), where);
        const Rational value = checked_rational(text, where);
        if (value < 0) throw ParseError(where + ": weight must be nonnegative");
        out.push_back(text);
    }
    if (map.size() != atoms.size())
        throw ParseError(origin + ": " + key + " mentions atoms outside the declared atom list");
    return out;
}

std::vector<std::vector<std::string>> parse_matrix(const json& doc, const std::string& key,
                                                   const std::string& origin) {
    if (!doc.contains(key)) throw ParseError(origin + ": missing field '" + key + "'");
    const json& rows = doc.at(key);
    if (!rows.is_array() || rows.empty())
        throw ParseError(origin + ": field '" + key + "' must be a nonempty array of rows");
    std::vector<std::vector<std::string>> out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const json& row = rows.at(r);
        if (!row.is_array() || row.size() != rows.size())
            throw ParseError(origin + ": '" + key + "' must be square (row " + std::to_string(r) +
                             ")");
        std::vector<std::string> entries;
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::string where = origin + ": " + key + "[" + std::to_string(r) + "][" +
                                      std::to_string(c) + "]";
            const std::string text = value_to_string(row.at(c), where);
            checked_rational(text, where);
            entries.push_back(text);
        }
        out.push_back(std::move(entries));
    }
    return out;
}

template <class S>
ordered_json weight_object(const AtomSpacePtr& space, const std::vector<S>& values) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < values.size(); ++i)
        obj[space->label(i)] = scalar_traits<S>::to_string(values[i]);
    return obj;
}

ordered_json matrix_array(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(scalar_traits<double>::to_string(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string duration_field(double ms, bool omit) {
    if (omit) return "0";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", ms);
    return buf;
}

template <class S>
RunOutcome run_measures(const ProblemFile& problem, const RunOptions& options, const S& tol) {
    const auto space = AtomSpace::make(problem.atoms);
    std::vector<S> mu_w, nu_w;
    for (const auto& text : problem.mu) mu_w.push_back(parse_scalar<S>(text));
    for (const auto& text : problem.nu) nu_w.push_back(parse_scalar<S>(text));
    const Measure<S> mu(space, std::move(mu_w));
    const Measure<S> nu(space, std::move(nu_w));

    const auto t0 = std::chrono::steady_clock::now();
    const Decomposition<S> d = decompose(mu, nu, tol, options.seed);
    const auto t1 = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    ordered_json rep;
    rep["mode"] = "measures";
    rep["backend"] = to_string(options.backend);
    rep["tol"] = scalar_traits<S>::to_string(tol);
    rep["atoms"] = problem.atoms;
    rep["mu"] = weight_object(space, mu.weights());
    rep["nu"] = weight_object(space, nu.weights());
    rep["p1"] = weight_object(space, d.p1.values());
    ordered_json s_labels = ordered_json::array();
    for (std::size_t t : d.singular_set) s_labels.push_back(space->label(t));
    rep["singular_set"] = std::move(s_labels);
    rep["nu_a"] = weight_object(space, d.nu_a.weights());
    rep["nu_s"] = weight_object(space, d.nu_s.weights());
    ordered_json density = ordered_json::object();
    for (std::size_t i = 0; i < d.mu_support.size(); ++i)
        density[space->label(d.mu_support[i])] = scalar_traits<S>::to_string(d.density[i]);
    rep["density"] = std::move(density);

    const auto& g = d.diagnostics;
    ordered_json diag;
    diag["additivity_ok"] = g.additivity_ok;
    diag["absolutely_continuous_ok"] = g.absolutely_continuous_ok;
    diag["singular_ok"] = g.singular_ok;
    diag["indicator_ok"] = g.indicator_ok;
    diag["standard_form_ok"] = g.standard_form_ok;
    diag["positivity_ok"] = g.positivity_ok;
    diag["all_ok"] = g.all_ok();
    diag["additivity_residual"] = scalar_traits<S>::to_string(g.additivity_residual);
    diag["ac_residual"] = scalar_traits<S>::to_string(g.ac_residual);
    diag["singular_residual"] = scalar_traits<S>::to_string(g.singular_residual);
    diag["indicator_residual"] = scalar_traits<S>::to_string(g.indicator_residual);
    diag["positivity_residual"] = scalar_traits<S>::to_string(g.positivity_residual);
    ordered_json clamped = ordered_json::array();
    for (std::size_t t : g.clamped_atoms) clamped.push_back(space->label(t));
    diag["clamped_atoms"] = std::move(clamped);
    rep["diagnostics"] = std::move(diag);
    rep["duration_ms"] = duration_field(ms, options.omit_timing);

    return {std::move(rep), d.diagnostics.all_ok()};
}

RunOutcome run_forms(const ProblemFile& problem, const RunOptions& options) {
    const std::size_t n = problem.a.size();
    Eigen::MatrixXd a_mat(n, n), b_mat(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            a_mat(r, c) = parse_scalar<double>(problem.a[r][c]);
            b_mat(r, c) = parse_scalar<double>(problem.b[r][c]);
        }

    const auto t0 = std::chrono::steady_clock::now();
    FormDecomposition d = [&] {
        try {
            return decompose_forms(PsdForm(a_mat), PsdForm(b_mat), options.tol);
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("invalid form input: ") + e.what());
        }
    }();
    const auto t1 = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    ordered_json rep;
    rep["mode"] = "forms";
    rep["backend"] = "float";
    rep["tol"] = scalar_traits<double>::to_string(options.tol);
    rep["a"] = matrix_array(a_mat);
    rep["b"] = matrix_array(b_mat);
    rep["projector"] = matrix_array(d.projector);
    rep["b_a"] = matrix_array(d.b_a.matrix());
    rep["b_s"] = matrix_array(d.b_s.matrix());

    const auto& g = d.diagnostics;
    ordered_json diag;
    diag["additivity_ok"] = g.additivity_ok;
    diag["projector_ok"] = g.projector_ok;
    diag["kernel_ok"] = g.kernel_ok;
    diag["ando_ok"] = g.ando_ok;
    diag["all_ok"] = g.all_ok();
    diag["additivity_residual"] = scalar_traits<double>::to_string(g.additivity_residual);
    diag["projector_symmetry_residual"] =
        scalar_traits<double>::to_string(g.projector_symmetry_residual);
    diag["projector_idempotency_residual"] =
        scalar_traits<double>::to_string(g.projector_idempotency_residual);
    diag["kernel_containment_residual"] =
        scalar_traits<double>::to_string(g.kernel_containment_residual);
    diag["ando_distance"] = scalar_traits<double>::to_string(g.ando_distance);
    diag["ando_steps"] = g.ando_steps;
    diag["ando_final_increment"] = scalar_traits<double>::to_string(g.ando_final_increment);
    diag["ando_converged"] = g.ando_converged;
    rep["diagnostics"] = std::move(diag);
    rep["duration_ms"] = duration_field(ms, options.omit_timing);

    return {std::move(rep), d.diagnostics.all_ok()};
}

}  // namespace

ProblemFile parse_problem_text(const std::string& text, Mode mode, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (!doc.is_object()) throw ParseError(origin + ": top-level value must be an object");

    ProblemFile out;
    out.mode = mode;
    if (doc.contains("mode")) {
        const Mode declared = mode_from_string(value_to_string(doc.at("mode"), origin + ": mode"));
        if (declared != mode)
            throw ParseError(origin + ": file declares mode '" +
                             std::string(to_string(declared)) + "' but mode '" +
                             to_string(mode) + "' was requested");
    }
    if (doc.contains("backend"))
        out.declared_backend =
            backend_from_string(value_to_string(doc.at("backend"), origin + ": backend"));

    if (mode == Mode::Measures) {
        if (!doc.contains("atoms")) throw ParseError(origin + ": missing field 'atoms'");
        const json& atoms = doc.at("atoms");
        if (!atoms.is_array() || atoms.empty())
            throw ParseError(origin + ": 'atoms' must be a nonempty array of labels");
        for (const auto& a : atoms) {
            if (!a.is_string()) throw ParseError(origin + ": atom labels must be strings");
            out.atoms.push_back(a.get<std::string>());
        }
        for (std::size_t i = 0; i < out.atoms.size(); ++i)
            for (std::size_t j = i + 1; j < out.atoms.size(); ++j)
                if (out.atoms[i] == out.atoms[j])
                    throw ParseError(origin + ": duplicate atom label '" + out.atoms[i] + "'");
        out.mu = parse_weight_map(doc, "mu", out.atoms, origin);
        out.nu = parse_weight_map(doc, "nu", out.atoms, origin);
    } else {
        out.a = parse_matrix(doc, "a", origin);
        out.b = parse_matrix(doc, "b", origin);
        if (out.a.size() != out.b.size())
            throw ParseError(origin + ": 'a' and 'b' must have the same dimension");
    }
    return out;
}

ProblemFile parse_problem(const std::filesystem::path& path, Mode mode) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str(), mode, path.filename().string());
}

RunOutcome run_problem(const ProblemFile& problem, const RunOptions& options) {
    if (problem.mode == Mode::Measures) {
        if (options.backend == Backend::Exact)
            return run_measures<Rational>(problem, options, Rational(0));
        return run_measures<double>(problem, options, options.tol);
    }
    if (options.backend == Backend::Exact)
        throw ParseError("forms mode has no exact backend (spectral decompositions are "
                         "inherently floating point); use --backend float");
    return run_forms(problem, options);
}

std::string render_report(const nlohmann::ordered_json& report) {
    return report.dump(2) + "\n";
}

}  // namespace lebdec::io
