#include "spatseg/io.hpp"

#include "spatseg/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spatseg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

bool is_missing_token(std::string_view t) {
    if (t.empty()) return true;
    const std::string l = lower(t);
    return l == "na" || l == "nan" || l == "null";
}

// Parses a full token as double; returns false on syntax errors, sets
// `missing` for empty/NA-style tokens and non-finite values.
bool parse_field(std::string_view t, double& out, bool& missing) {
    if (is_missing_token(t)) {
        missing = true;
        return true;
    }
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (*first == '+') ++first; // from_chars rejects a leading plus
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) return false;
    if (!std::isfinite(out)) missing = true;
    return true;
}

} // namespace

XyzCsv read_xyz_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw data_error("csv: empty input (header row required)");
    ++lineno;
    const auto header = split_fields(line);
    int ix = -1, iy = -1, iz = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = lower(header[c]);
        if (name == "x") ix = static_cast<int>(c);
        else if (name == "y") iy = static_cast<int>(c);
        else if (name == "z") iz = static_cast<int>(c);
    }
    if (ix < 0 || iy < 0 || iz < 0)
        throw data_error("csv: header must name columns x, y and z (line 1: '" + line + "')");

    XyzCsv out;
    std::vector<double> zs;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw data_error("csv: line " + std::to_string(lineno) + " has " +
                             std::to_string(fields.size()) + " fields, header has " +
                             std::to_string(header.size()));
        double x = 0.0, y = 0.0, z = 0.0;
        bool missing = false;
        for (const auto& [col, dst] : {std::pair{ix, &x}, std::pair{iy, &y}, std::pair{iz, &z}}) {
            if (!parse_field(fields[static_cast<std::size_t>(col)], *dst, missing))
                throw data_error("csv: line " + std::to_string(lineno) + ": cannot parse '" +
                                 std::string(fields[static_cast<std::size_t>(col)]) + "' as a number");
        }
        if (missing) {
            out.rejected_lines.push_back(lineno);
            continue;
        }
        out.pts.push_back({x, y});
        zs.push_back(z);
    }
    out.z = Eigen::Map<const Eigen::VectorXd>(zs.data(), static_cast<Eigen::Index>(zs.size()));
    return out;
}

XyzCsv read_xyz_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("csv: cannot open '" + path.string() + "' for reading");
    return read_xyz_csv(in);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_xyz_csv(std::ostream& out, std::span<const Point> pts, const Eigen::VectorXd& z) {
    if (static_cast<std::size_t>(z.size()) != pts.size())
        throw std::invalid_argument("write_xyz_csv: sizes differ");
    out << "x,y,z\n";
    for (std::size_t i = 0; i < pts.size(); ++i)
        out << format_double(pts[i].x) << ',' << format_double(pts[i].y) << ','
            << format_double(z[static_cast<Eigen::Index>(i)]) << '\n';
    if (!out) throw data_error("csv: write failed");
}

void write_xyz_csv(const std::filesystem::path& path, std::span<const Point> pts, const Eigen::VectorXd& z) {
    std::ofstream out(path);
    if (!out) throw data_error("csv: cannot open '" + path.string() + "' for writing");
    write_xyz_csv(out, pts, z);
}

void write_predictions_csv(std::ostream& out, std::span<const PredictionRow> rows) {
    out << "x,y,mean,sd,region\n";
    for (const auto& r : rows)
        out << format_double(r.s.x) << ',' << format_double(r.s.y) << ',' << format_double(r.mean) << ','
            << format_double(r.sd) << ',' << r.region << '\n';
    if (!out) throw data_error("csv: write failed");
}

void write_predictions_csv(const std::filesystem::path& path, std::span<const PredictionRow> rows) {
    std::ofstream out(path);
    if (!out) throw data_error("csv: cannot open '" + path.string() + "' for writing");
    write_predictions_csv(out, rows);
}

} // namespace spatseg
