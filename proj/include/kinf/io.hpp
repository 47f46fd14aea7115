#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "kinf/measure_space.hpp"

namespace kinf::io {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double x);

/// Dense matrix, one row per line, columns as re,im pairs.
void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);

/// Grid function as rows cell_index,real,imag.
void write_grid_function_csv(std::ostream& out, const GridFunction& f);
GridFunction read_grid_function_csv(std::istream& in);

/// Kernel samples on a tensor grid as rows s,t,re,im (s outer, t inner).
void write_kernel_samples_csv(std::ostream& out, std::span<const double> s, std::span<const double> t,
                              const Matrix& values);

std::string to_string(const Matrix& m);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// JSON with a trailing newline, 2-space indentation.
std::string dump_json(const nlohmann::json& j);

}  // namespace kinf::io
