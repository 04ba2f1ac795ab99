#pragma once

#include "bivirus/analysis.hpp"
#include "bivirus/dynamics.hpp"
#include "bivirus/sweep.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace bivirus::csv {

/// Shortest decimal that round-trips to the same double; "nan"/"inf"/"-inf"
/// for non-finite values.
std::string format_double(double v);

/// Parses a field written by `format_double`; throws Error on malformed input.
double parse_double(const std::string& field);

std::string trajectory_header(std::size_t n);
std::string bracket_header(std::size_t n);
inline constexpr const char* kSummaryHeader = "t_final,avgX,avgY,terminal_reason";
inline constexpr const char* kVerdictHeader =
    "outcome,lambda_g0,lambda_h0,lambda_u,lambda_v,avg_xstar,avg_ystar";
inline constexpr const char* kRegionHeader = "tau1,tau2,region,lambda_g0,lambda_h0,lambda_u,lambda_v";
inline constexpr const char* kCurveHeader = "tau2,tau1_blue,tau1_red";

/// One row per stored state: t, x_0..x_{n-1}, y_0..y_{n-1}.
void write_trajectory(std::ostream& out, const Trajectory& traj);

/// One row per trajectory.
void write_summary(std::ostream& out, const std::vector<Trajectory>& trajs);

void write_verdict(std::ostream& out, const TrichotomyVerdict& v);

/// Rows in tau2-major order (tau1 varies fastest).
void write_regions(std::ostream& out, const RegionGrid& grid);

void write_curves(std::ostream& out, const std::vector<CurvePoint>& curves);

/// Two rows, "lower" and "upper".
void write_bracket(std::ostream& out, const CoexistenceBracket& b);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws Error if absent.
    std::size_t column(const std::string& name) const;
};

/// Reads a comma-separated table with a header line. Rejects CR characters
/// and rows whose width differs from the header.
Table read(std::istream& in);

}  // namespace bivirus::csv
