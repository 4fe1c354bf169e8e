#pragma once

// Flat CSV tables exchanged between the CLI, the tests and the plotting
// scripts. Numbers are written with 17 significant digits so that a parsed
// table re-emits byte for byte.

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hopfdelay/hopf_analytic.hpp"
#include "hopfdelay/systems.hpp"

namespace hopfdelay {

struct CurveRow {
    SystemKind system = SystemKind::Duffing;
    Method method = Method::ApproachI;
    Branch branch = Branch::Lower;
    double epsilon = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
    double k = 0.0;
    double delay = 0.0;
    double omega = 0.0;
};

CurveRow make_row(const SystemSpec& spec, const HopfPoint& point);

struct CurveTable {
    std::vector<CurveRow> rows;

    /// Orders rows by (method, branch, k, epsilon).
    void sort();
};

inline constexpr const char* kCurveHeader = "system,method,branch,epsilon,alpha,gamma,k,T,omega";
inline constexpr const char* kComparisonHeader = "system,method,branch,max_abs_T_error,mean_abs_T_error,n_points";

void write_csv(std::ostream& out, const CurveTable& table);
void write_row(std::ostream& out, const CurveRow& row);

/// Throws InvalidArgument on a header or field mismatch.
CurveTable read_curve_csv(std::istream& in);

struct ComparisonRow {
    SystemKind system = SystemKind::Duffing;
    Method method = Method::ApproachI;
    Branch branch = Branch::Lower;
    double max_abs_error = 0.0;
    double mean_abs_error = 0.0;
    int n_points = 0;
};

/// Pointwise |T_method - T_reference| at matching k (and epsilon), per method
/// and branch. Pairs without overlap are left out; an empty report throws
/// EmptyReportError.
std::vector<ComparisonRow> compare_curves(const CurveTable& table, Method reference, std::span<const Method> methods);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

}  // namespace hopfdelay
