#pragma once

// Problem-file parsing and report emission for the batch front door.
//
// A problem is one JSON document. Measures mode:
//
//   { "atoms": ["a","b","c"],
//     "mu": {"a": "1", "b": "1", "c": "0"},
//     "nu": {"a": "2", "b": "0", "c": "3"} }
//
// Forms mode carries row-major matrices "a" and "b" instead. Weights and
// entries may be JSON strings ("3/4", "0.25", "2.5e-3") or plain numbers;
// strings preserve exactness under the exact backend. Optional fields "mode"
// and "backend" declare what the file expects; the command-line flags win.
//
// Reports are emitted with a fixed field order so exact-backend runs are
// byte-stable (see README for the schema).

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lebdec::io {

enum class Mode { Measures, Forms };
enum class Backend { Exact, Float };

/// Input-side failure: malformed document, bad value, inconsistent structure.
/// The CLI maps this to exit code 2.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProblemFile {
    Mode mode = Mode::Measures;
    std::optional<Backend> declared_backend;
    // measures mode: weight strings aligned with atoms
    std::vector<std::string> atoms;
    std::vector<std::string> mu;
    std::vector<std::string> nu;
    // forms mode: row-major entry strings
    std::vector<std::vector<std::string>> a;
    std::vector<std::vector<std::string>> b;
};

struct RunOptions {
    Backend backend = Backend::Exact;
    double tol = 1e-12;
    std::uint64_t seed = 0;
    bool omit_timing = false;
};

struct RunOutcome {
    nlohmann::ordered_json report;
    bool verification_ok = true;
};

Mode mode_from_string(const std::string& s);
Backend backend_from_string(const std::string& s);
const char* to_string(Mode m);
const char* to_string(Backend b);

Backend default_backend(Mode m);
double default_tol(Mode m);

ProblemFile parse_problem(const std::filesystem::path& path, Mode mode);
ProblemFile parse_problem_text(const std::string& text, Mode mode, const std::string& origin);

/// Runs the requested decomposition and assembles the report document.
/// Throws ParseError on input-side failures (including a forms run requested
/// with the exact backend, which has no spectral decomposition to offer).
RunOutcome run_problem(const ProblemFile& problem, const RunOptions& options);

/// Serialized report: two-space indent, trailing newline.
std::string render_report(const nlohmann::ordered_json& report);

}  // namespace lebdec::io
