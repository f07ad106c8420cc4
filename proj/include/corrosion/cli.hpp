#pragma once

#include <optional>
#include <string>
#include <vector>

namespace corrosion::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,     ///< unexpected error (I/O, internal)
    kUsage = 2,       ///< bad flags
    kConfig = 3,      ///< invalid configuration or sampling point
    kSolver = 4,      ///< singular / ill-conditioned system
    kDiagnostics = 5, ///< a verification check failed
};

struct Options {
    std::string config;
    int example = 0;
    std::optional<double> gamma;
    std::optional<int> nf;
    int nb = 19;
    std::string method = "fmreg";
    double sv_threshold = 1e-5;
    double alpha = 1e-5;
    std::optional<double> level;
    std::string grid = "100x100";
    std::string out = ".";
    int jobs = 1;
    int current = 1;            ///< forward: basis index of the applied current
    std::vector<std::string> z; ///< forward: Green's function source points "x,y"
    bool quiet = false;
};

int cmd_forward(const Options& o);
int cmd_assemble(const Options& o);
int cmd_image(const Options& o);
int cmd_verify(const Options& o);

/// Parses argv, dispatches, and maps exceptions to exit codes.
int run(int argc, char** argv);

} // namespace corrosion::cli
