#include "bivirus/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace bivirus::csv {

namespace {

void write_vector(std::ostream& out, const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out << ',' << format_double(v[i]);
    }
}

std::string state_columns(std::size_t n) {
    std::string s;
    for (const char prefix : {'x', 'y'}) {
        for (std::size_t i = 0; i < n; ++i) {
            s += ',';
            s += prefix;
            s += '_';
            s += std::to_string(i);
        }
    }
    return s;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& field) {
    if (field == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (field == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (field == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || field.empty()) {
        throw Error("malformed number '" + field + "'");
    }
    return v;
}

std::string trajectory_header(std::size_t n) { return "t" + state_columns(n); }

std::string bracket_header(std::size_t n) { return "endpoint,avgX,avgY" + state_columns(n); }

void write_trajectory(std::ostream& out, const Trajectory& traj) {
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
    out << trajectory_header(n) << '\n';
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        out << format_double(traj.times[k]);
        write_vector(out, traj.states[k].x);
        write_vector(out, traj.states[k].y);
        out << '\n';
    }
}

void write_summary(std::ostream& out, const std::vector<Trajectory>& trajs) {
    out << kSummaryHeader << '\n';
    for (const auto& t : trajs) {
        const auto& s = t.final_state();
        out << format_double(t.final_time()) << ',' << format_double(s.avg_x()) << ','
            << format_double(s.avg_y()) << ',' << to_string(t.reason) << '\n';
    }
}

void write_verdict(std::ostream& out, const TrichotomyVerdict& v) {
    out << kVerdictHeader << '\n'
        << to_string(v.outcome) << ',' << format_double(v.lambda_g0) << ','
        << format_double(v.lambda_h0) << ',' << format_double(v.lambda_u) << ','
        << format_double(v.lambda_v) << ',' << format_double(v.x_star.mean()) << ','
        << format_double(v.y_star.mean()) << '\n';
}

void write_regions(std::ostream& out, const RegionGrid& grid) {
    out << kRegionHeader << '\n';
    for (std::size_t j = 0; j < grid.tau2_axis.size(); ++j) {
        for (std::size_t i = 0; i < grid.tau1_axis.size(); ++i) {
            const auto& c = grid.at(i, j);
            out << format_double(grid.tau1_axis[i]) << ',' << format_double(grid.tau2_axis[j])
                << ',' << to_string(c.region) << ',' << format_double(c.lambda_g0) << ','
                << format_double(c.lambda_h0) << ',' << format_double(c.lambda_u) << ','
                << format_double(c.lambda_v) << '\n';
        }
    }
}

void write_curves(std::ostream& out, const std::vector<CurvePoint>& curves) {
    out << kCurveHeader << '\n';
    for (const auto& p : curves) {
        out << format_double(p.tau2) << ',' << format_double(p.tau1_blue) << ','
            << format_double(p.tau1_red) << '\n';
    }
}

void write_bracket(std::ostream& out, const CoexistenceBracket& b) {
    out << bracket_header(b.lower.size()) << '\n';
    for (const auto& [name, s] : {std::pair{"lower", &b.lower}, std::pair{"upper", &b.upper}}) {
        out << name << ',' << format_double(s->avg_x()) << ',' << format_double(s->avg_y());
        write_vector(out, s->x);
        write_vector(out, s->y);
        out << '\n';
    }
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) {
            return k;
        }
    }
    throw Error("missing column '" + name + "'");
}

Table read(std::istream& in) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find('\r') != std::string::npos) {
            throw Error("line " + std::to_string(line_no) + ": CR line endings are not allowed");
        }
        auto fields = split_line(line);
        if (line_no == 1) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw Error("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(t.header.size()) + " fields, found " +
                        std::to_string(fields.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    if (line_no == 0) {
        throw Error("empty CSV");
    }
    return t;
}

}  // namespace bivirus::csv
