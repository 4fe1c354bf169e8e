#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "hopfdelay/charsolve.hpp"
#include "hopfdelay/curve_table.hpp"
#include "hopfdelay/ddesim.hpp"
#include "hopfdelay/hopf_analytic.hpp"

namespace hopfdelay::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsage = 2,
    kNumerical = 3,  // non-convergence, no stability crossing
    kIo = 4,
    kIntegration = 5,  // simulation could not be classified
};

struct CurveBuildOptions {
    std::vector<double> k_grid;
    std::vector<Method> methods;
    ErneuxPairing pairing = ErneuxPairing::AsPrinted;
    DetectOptions detect;
};

struct CurveBuild {
    CurveTable table;
    int omitted = 0;
    std::vector<std::string> warnings;
};

/// Rows for every requested method and branch over the k grid, sorted.
/// Points where a method is undefined are counted in `omitted`.
CurveBuild build_curves(const SystemSpec& spec, const CurveBuildOptions& opts);

/// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hopfdelay::cli
