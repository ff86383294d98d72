#pragma once

#include "spatseg/types.hpp"

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace spatseg {

// Result of reading an x,y,z CSV. Rows whose x/y/z field is missing (empty,
// "NA", "NaN", or a non-finite number) are dropped and reported by line
// number; structurally malformed content throws data_error instead.
struct XyzCsv {
    std::vector<Point> pts;
    Eigen::VectorXd z;
    std::vector<std::size_t> rejected_lines; // 1-based input line numbers
};

// Requires a header naming columns x, y and z (any order, case-insensitive,
// extra columns ignored). Throws data_error with the line number on
// malformed rows and on unreadable files.
XyzCsv read_xyz_csv(std::istream& in);
XyzCsv read_xyz_csv(const std::filesystem::path& path);

// Writes "x,y,z" rows with %.17g formatting, so a read-back is bitwise equal.
void write_xyz_csv(std::ostream& out, std::span<const Point> pts, const Eigen::VectorXd& z);
void write_xyz_csv(const std::filesystem::path& path, std::span<const Point> pts, const Eigen::VectorXd& z);

// Prediction table: x,y,mean,sd,region rows with %.17g formatting.
struct PredictionRow {
    Point s;
    double mean = 0.0;
    double sd = 0.0;
    int region = -1;
};
void write_predictions_csv(std::ostream& out, std::span<const PredictionRow> rows);
void write_predictions_csv(const std::filesystem::path& path, std::span<const PredictionRow> rows);

// Shortest round-trippable decimal representation (%.17g).
std::string format_double(double v);

} // namespace spatseg
