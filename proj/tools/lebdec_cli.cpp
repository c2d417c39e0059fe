// Batch front door: reads measure or form problems, runs the decomposition,
// writes a machine-readable report with verification diagnostics.
//
// Exit codes: 0 success, 2 input error, 3 verification diagnostic failure.

#include "lebdec/problem_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace lebdec;

namespace {

struct FileResult {
    int exit_code = 0;
    std::string message;  // diagnostics for stderr, may be empty
};

FileResult run_one(const fs::path& input, io::Mode mode, std::optional<io::Backend> backend_flag,
                   std::optional<double> tol_flag, std::uint64_t seed, bool omit_timing,
                   const std::optional<fs::path>& out_path) {
    try {
        const io::ProblemFile problem = io::parse_problem(input, mode);
        io::RunOptions options;
        options.backend = backend_flag   ? *backend_flag
                          : problem.declared_backend ? *problem.declared_backend
                                                     : io::default_backend(mode);
        options.tol = tol_flag ? *tol_flag : io::default_tol(mode);
        options.seed = seed;
        options.omit_timing = omit_timing;

        const io::RunOutcome outcome = io::run_problem(problem, options);
        const std::string text = io::render_report(outcome.report);
        if (out_path) {
            std::ofstream out(*out_path, std::ios::binary);
            if (!out) return {2, "error: cannot open output file '" + out_path->string() + "'"};
            out << text;
        } else {
            std::cout << text;
        }
        if (!outcome.verification_ok)
            return {3, "error: verification diagnostics failed for '" + input.string() + "'"};
        return {0, ""};
    } catch (const io::ParseError& e) {
        return {2, std::string("error: ") + e.what()};
    } catch (const std::exception& e) {
        return {2, std::string("error: ") + e.what()};
    }
}

int run_batch(const fs::path& dir, io::Mode mode, std::optional<io::Backend> backend_flag,
              std::optional<double> tol_flag, std::uint64_t seed, bool omit_timing,
              const std::string& out_dir) {
    if (out_dir.empty()) {
        std::cerr << "error: --batch requires --out <directory>\n";
        return 2;
    }
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            inputs.push_back(entry.path());
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) {
        std::cerr << "error: no .json problems in '" << dir.string() << "'\n";
        return 2;
    }
    fs::create_directories(out_dir);

    std::vector<std::future<FileResult>> futures;
    futures.reserve(inputs.size());
    for (const auto& input : inputs) {
        fs::path out = fs::path(out_dir) / (input.stem().string() + ".report.json");
        futures.push_back(std::async(std::launch::async, run_one, input, mode, backend_flag,
                                     tol_flag, seed, omit_timing,
                                     std::optional<fs::path>(out)));
    }

    int worst_input = 0, worst_verify = 0;
    for (std::size_t i = 0; i < futures.size(); ++i) {
        const FileResult r = futures[i].get();
        const char* status = r.exit_code == 0   ? "ok"
                             : r.exit_code == 2 ? "input error"
                                                : "verification failure";
        std::cout << inputs[i].filename().string() << ": " << status << "\n";
        if (!r.message.empty()) std::cerr << r.message << "\n";
        if (r.exit_code == 2) worst_input = 2;
        if (r.exit_code == 3) worst_verify = 3;
    }
    return worst_input != 0 ? worst_input : worst_verify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lebesgue decomposition of finite measures and PSD form pairs"};

    std::string input;
    std::string mode_s = "measures";
    std::string backend_s;
    std::string tol_s;
    std::string out_s;
    std::uint64_t seed = 0;
    bool omit_timing = false;
    bool batch = false;

    app.add_option("input", input, "problem file, or a directory of .json problems with --batch")
        ->required();
    app.add_option("--mode", mode_s, "problem kind: measures or forms (default measures)")
        ->check(CLI::IsMember({"measures", "forms"}));
    app.add_option("--backend", backend_s,
                   "scalar backend: exact or float (default: exact for measures, float for forms)")
        ->check(CLI::IsMember({"exact", "float"}));
    app.add_option("--tol", tol_s, "tolerance (default 1e-12 measures, 1e-10 forms)");
    app.add_option("--out", out_s, "report path (batch: report directory); default stdout");
    app.add_option("--seed", seed, "seed for randomized subset checks (default 0)");
    app.add_flag("--omit-timing", omit_timing, "fix the duration field to 0 for stable output");
    app.add_flag("--batch", batch, "treat the input as a directory and process every .json file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    io::Mode mode;
    std::optional<io::Backend> backend_flag;
    std::optional<double> tol_flag;
    try {
        mode = io::mode_from_string(mode_s);
        if (!backend_s.empty()) backend_flag = io::backend_from_string(backend_s);
        if (!tol_s.empty()) {
            std::size_t used = 0;
            const double tol = std::stod(tol_s, &used);
            if (used != tol_s.size() || !(tol >= 0.0) || !std::isfinite(tol))
                throw io::ParseError("--tol must be a nonnegative finite decimal");
            tol_flag = tol;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (batch)
        return run_batch(input, mode, backend_flag, tol_flag, seed, omit_timing, out_s);

    std::optional<fs::path> out_path;
    if (!out_s.empty()) out_path = fs::path(out_s);
    const FileResult r = run_one(input, mode, backend_flag, tol_flag, seed, omit_timing, out_path);
    if (!r.message.empty()) std::cerr << r.message << "\n";
    return r.exit_code;
}
