#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vim/scalar.hpp"

namespace vim::cli {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { Solve, SolveSystem, Bound, Compare, ListBuiltins };

/// Everything one invocation does: the command, exactly one problem source
/// (builtin name or expression strings), iteration controls, output paths
/// and formatting, and the factorial-bound inputs for the bound command.
struct RunManifest {
    Command command = Command::Solve;

    std::string builtin_name;
    std::vector<std::string> f_sources;
    std::vector<std::string> df_sources;     // optional overrides; all or none
    std::vector<std::string> exact_sources;  // optional closed-form solution, t only
    std::vector<double> x0;
    double t0 = 0.0;
    double tf = 1.0;

    SolveConfig config;
    bool keep_iterates = false;

    std::string out_csv;
    std::string out_json;
    int precision = 17;  // significant digits, 6..17

    // bound command
    double lipschitz = 0.0;
    double interval = 0.0;
    int dimension = 1;
    double e0_norm = 1.0;
    std::vector<int> bound_orders;
};

std::string usage();

/// Parses command-line words (without the program name). Throws UsageError
/// on malformed input.
RunManifest parse_args(std::span<const std::string> args);

/// Executes the manifest. Exit status 0: success (solves converged),
/// 2: solve completed without convergence, 1: any error (reported as a
/// single line on err).
int run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

}  // namespace vim::cli
