#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "swarmcov/error_metric.hpp"
#include "swarmcov/grid.hpp"

namespace swarmcov {

// Doubles are printed with %.17g so that written files reload bit-exactly.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, const std::string& file, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        while (used < s.size() && (s[used] == ' ' || s[used] == '\t')) ++used;
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw parameter_error(file + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
    }
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

inline Kernel parse_kernel(const std::string& s, const std::string& file, std::size_t line_no) {
    if (s == "gaussian") return {KernelKind::gaussian};
    if (s == "indicator") return {KernelKind::indicator};
    throw parameter_error(file + ":" + std::to_string(line_no) + ": unknown kernel '" + s + "'");
}

} // namespace detail

// SwarmConfig CSV: header "N,delta,kernel", then N lines "x,y" (inches).
inline void write_swarm_csv(const std::string& path, const SwarmConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot write '" + path + "'");
    out << cfg.size() << "," << fmt_double(cfg.delta) << "," << kernel_name(cfg.kernel.kind)
        << "\n";
    for (const Vec2& p : cfg.positions)
        out << fmt_double(p.x) << "," << fmt_double(p.y) << "\n";
}

inline SwarmConfig read_swarm_csv(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw parameter_error(path + ":1: empty swarm file");
    const auto head = detail::split_csv_line(lines[0]);
    if (head.size() != 3)
        throw parameter_error(path + ":1: expected header 'N,delta,kernel'");
    const long n = std::lround(detail::parse_double(head[0], path, 1));
    const double delta = detail::parse_double(head[1], path, 1);
    const Kernel kernel = detail::parse_kernel(head[2], path, 1);
    if (n < 1) throw parameter_error(path + ":1: N must be >= 1");
    if (lines.size() != static_cast<std::size_t>(n) + 1)
        throw parameter_error(path + ": expected " + std::to_string(n) + " position lines, got " +
                              std::to_string(lines.size() - 1));
    std::vector<Vec2> pos;
    pos.reserve(n);
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const auto f = detail::split_csv_line(lines[l]);
        if (f.size() != 2)
            throw parameter_error(path + ":" + std::to_string(l + 1) + ": expected 'x,y'");
        pos.push_back({detail::parse_double(f[0], path, l + 1),
                       detail::parse_double(f[1], path, l + 1)});
    }
    return SwarmConfig(std::move(pos), delta, kernel);
}

// Trajectory CSV: header "N,delta,kernel", then per line "t,x1,y1,...,xN,yN".
inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    traj.validate();
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot write '" + path + "'");
    out << traj.snapshots.front().size() << "," << fmt_double(traj.delta) << ","
        << kernel_name(traj.kernel.kind) << "\n";
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        out << fmt_double(traj.times[j]);
        for (const Vec2& p : traj.snapshots[j])
            out << "," << fmt_double(p.x) << "," << fmt_double(p.y);
        out << "\n";
    }
}

inline Trajectory read_trajectory_csv(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.size() < 2) throw parameter_error(path + ": empty trajectory file");
    const auto head = detail::split_csv_line(lines[0]);
    if (head.size() != 3)
        throw parameter_error(path + ":1: expected header 'N,delta,kernel'");
    const long n = std::lround(detail::parse_double(head[0], path, 1));
    Trajectory traj;
    traj.delta = detail::parse_double(head[1], path, 1);
    traj.kernel = detail::parse_kernel(head[2], path, 1);
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const auto f = detail::split_csv_line(lines[l]);
        if (f.size() != static_cast<std::size_t>(2 * n + 1))
            throw parameter_error(path + ":" + std::to_string(l + 1) + ": expected t plus " +
                                  std::to_string(n) + " coordinate pairs");
        traj.times.push_back(detail::parse_double(f[0], path, l + 1));
        std::vector<Vec2> snap;
        snap.reserve(n);
        for (long i = 0; i < n; ++i)
            snap.push_back({detail::parse_double(f[1 + 2 * i], path, l + 1),
                            detail::parse_double(f[2 + 2 * i], path, l + 1)});
        traj.snapshots.push_back(std::move(snap));
    }
    traj.validate();
    return traj;
}

// Gridded density CSV: header "m1,m2,w,h", then m1*m2 value lines in
// row-major order, x fastest. Cell-corner nodes.
inline void write_field_csv(const std::string& path, const ScalarField& field) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot write '" + path + "'");
    out << field.grid.m1 << "," << field.grid.m2 << "," << fmt_double(field.grid.domain.width)
        << "," << fmt_double(field.grid.domain.height) << "\n";
    for (double v : field.values) out << fmt_double(v) << "\n";
}

inline ScalarField read_field_csv(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw parameter_error(path + ":1: empty field file");
    const auto head = detail::split_csv_line(lines[0]);
    if (head.size() != 4) throw parameter_error(path + ":1: expected header 'm1,m2,w,h'");
    const long m1 = std::lround(detail::parse_double(head[0], path, 1));
    const long m2 = std::lround(detail::parse_double(head[1], path, 1));
    const double w = detail::parse_double(head[2], path, 1);
    const double h = detail::parse_double(head[3], path, 1);
    if (m1 < 2 || m2 < 2) throw parameter_error(path + ":1: need m1, m2 >= 2");
    if (lines.size() != static_cast<std::size_t>(m1) * m2 + 1)
        throw parameter_error(path + ": expected " + std::to_string(m1 * m2) +
                              " value lines, got " + std::to_string(lines.size() - 1));
    std::vector<double> values;
    values.reserve(m1 * m2);
    for (std::size_t l = 1; l < lines.size(); ++l)
        values.push_back(detail::parse_double(lines[l], path, l + 1));
    return ScalarField(GridSpec(static_cast<int>(m1), static_cast<int>(m2),
                                GridNodes::cell_corners, Domain(w, h)),
                       std::move(values));
}

// (t, e) series: header "t,e", one pair per line.
inline void write_series_csv(const std::string& path, const std::vector<double>& t,
                             const std::vector<double>& e) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot write '" + path + "'");
    out << "t,e\n";
    for (std::size_t i = 0; i < t.size(); ++i)
        out << fmt_double(t[i]) << "," << fmt_double(e[i]) << "\n";
}

inline std::pair<std::vector<double>, std::vector<double>>
read_series_csv(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.size() < 2) throw parameter_error(path + ": empty series file");
    std::vector<double> t, e;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const auto f = detail::split_csv_line(lines[l]);
        if (f.size() != 2)
            throw parameter_error(path + ":" + std::to_string(l + 1) + ": expected 't,e'");
        t.push_back(detail::parse_double(f[0], path, l + 1));
        e.push_back(detail::parse_double(f[1], path, l + 1));
    }
    return {std::move(t), std::move(e)};
}

// One value per line, optional non-numeric header line.
inline std::vector<double> read_value_column(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw parameter_error(path + ": empty file");
    std::vector<double> out;
    for (std::size_t l = 0; l < lines.size(); ++l) {
        if (l == 0) {
            try {
                out.push_back(detail::parse_double(lines[0], path, 1));
            } catch (const parameter_error&) {
                continue; // header line
            }
            continue;
        }
        out.push_back(detail::parse_double(lines[l], path, l + 1));
    }
    if (out.empty()) throw parameter_error(path + ": no numeric values");
    return out;
}

} // namespace swarmcov
