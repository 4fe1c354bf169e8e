#include "hopfdelay/curve_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <tuple>

namespace hopfdelay {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_number(const std::string& text, std::size_t line_no) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw InvalidArgument("line " + std::to_string(line_no) + ": bad number '" + text + "'");
    }
    return value;
}

bool same_value(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
}

}  // namespace

CurveRow make_row(const SystemSpec& spec, const HopfPoint& point) {
    return {spec.kind, point.method, point.branch, spec.epsilon, spec.alpha, spec.gamma, point.k, point.delay,
            point.omega};
}

void CurveTable::sort() {
    std::stable_sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
        return std::tie(a.method, a.branch, a.k, a.epsilon) < std::tie(b.method, b.branch, b.k, b.epsilon);
    });
}

void write_row(std::ostream& out, const CurveRow& row) {
    out << std::setprecision(17) << to_string(row.system) << ',' << to_string(row.method) << ','
        << to_string(row.branch) << ',' << row.epsilon << ',' << row.alpha << ',' << row.gamma << ',' << row.k << ','
        << row.delay << ',' << row.omega << '\n';
}

void write_csv(std::ostream& out, const CurveTable& table) {
    out << kCurveHeader << '\n';
    for (const CurveRow& row : table.rows) write_row(out, row);
}

CurveTable read_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("empty curve table");
    if (line != kCurveHeader) throw InvalidArgument("unexpected curve table header: " + line);

    CurveTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != 9) {
            throw InvalidArgument("line " + std::to_string(line_no) + ": expected 9 fields");
        }
        const auto system = parse_system_kind(fields[0]);
        const auto method = parse_method(fields[1]);
        const auto branch = parse_branch(fields[2]);
        if (!system || !method || !branch) {
            throw InvalidArgument("line " + std::to_string(line_no) + ": unknown system, method or branch");
        }
        table.rows.push_back({*system, *method, *branch, parse_number(fields[3], line_no),
                              parse_number(fields[4], line_no), parse_number(fields[5], line_no),
                              parse_number(fields[6], line_no), parse_number(fields[7], line_no),
                              parse_number(fields[8], line_no)});
    }
    return table;
}

std::vector<ComparisonRow> compare_curves(const CurveTable& table, Method reference, std::span<const Method> methods) {
    std::vector<ComparisonRow> report;
    for (const Method method : methods) {
        for (const Branch branch : {Branch::Lower, Branch::Upper}) {
            double max_err = 0.0;
            double sum_err = 0.0;
            int count = 0;
            SystemKind system = SystemKind::Duffing;
            for (const CurveRow& row : table.rows) {
                if (row.method != method || row.branch != branch) continue;
                const auto match = std::find_if(table.rows.begin(), table.rows.end(), [&](const CurveRow& ref) {
                    return ref.method == reference && ref.branch == branch && ref.system == row.system &&
                           same_value(ref.k, row.k) && same_value(ref.epsilon, row.epsilon);
                });
                if (match == table.rows.end()) continue;
                const double err = std::abs(row.delay - match->delay);
                max_err = std::max(max_err, err);
                sum_err += err;
                ++count;
                system = row.system;
            }
            if (count > 0) report.push_back({system, method, branch, max_err, sum_err / count, count});
        }
    }
    if (report.empty()) {
        throw EmptyReportError("no overlapping (k, branch) points between the compared curves and the reference");
    }
    return report;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
    out << kComparisonHeader << '\n' << std::setprecision(17);
    for (const ComparisonRow& row : rows) {
        out << to_string(row.system) << ',' << to_string(row.method) << ',' << to_string(row.branch) << ','
            << row.max_abs_error << ',' << row.mean_abs_error << ',' << row.n_points << '\n';
    }
}

}  // namespace hopfdelay
