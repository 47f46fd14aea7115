#include "kinf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace kinf::io {

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

double parse_double(const std::string& text)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidArgument, "not a number: '" + text + "'");
    }
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) throw Error(ErrorKind::InvalidArgument, "not a number: '" + text + "'");
    return v;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

std::string format_double(double x)
{
    if (x == 0.0) return "0";  // also folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_matrix_csv(std::ostream& out, const Matrix& m)
{
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
        }
        out << '\n';
    }
}

Matrix read_matrix_csv(std::istream& in)
{
    std::vector<std::vector<Complex>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (blank(line)) continue;
        const auto fields = split_fields(line);
        if (fields.size() % 2 != 0) throw Error(ErrorKind::InvalidArgument, "matrix CSV rows need re,im pairs");
        std::vector<Complex> row;
        for (std::size_t k = 0; k < fields.size(); k += 2) row.emplace_back(parse_double(fields[k]), parse_double(fields[k + 1]));
        if (!rows.empty() && row.size() != rows.front().size()) throw Error(ErrorKind::InvalidArgument, "ragged matrix CSV");
        rows.push_back(std::move(row));
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

void write_grid_function_csv(std::ostream& out, const GridFunction& f)
{
    for (Eigen::Index i = 0; i < f.values.size(); ++i) {
        out << i << ',' << format_double(f.values[i].real()) << ',' << format_double(f.values[i].imag()) << '\n';
    }
}

GridFunction read_grid_function_csv(std::istream& in)
{
    std::vector<Complex> values;
    std::string line;
    while (std::getline(in, line)) {
        if (blank(line)) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 3) throw Error(ErrorKind::InvalidArgument, "grid function CSV rows are cell_index,real,imag");
        const double index = parse_double(fields[0]);
        if (index != static_cast<double>(values.size())) {
            throw Error(ErrorKind::InvalidArgument, "grid function CSV cell indices must run 0, 1, 2, ...");
        }
        values.emplace_back(parse_double(fields[1]), parse_double(fields[2]));
    }
    const std::size_t n = values.size();
    if (n < 2 || (n & (n - 1)) != 0) {
        throw Error(ErrorKind::InvalidArgument, "grid function CSV needs 2^depth rows, got " + std::to_string(n));
    }
    int depth = 0;
    while ((std::size_t{1} << depth) < n) ++depth;
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = values[i];
    return GridFunction(MeasureSpace(depth), std::move(v));
}

void write_kernel_samples_csv(std::ostream& out, std::span<const double> s, std::span<const double> t,
                              const Matrix& values)
{
    for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = 0; b < t.size(); ++b) {
            const Complex v = values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            out << format_double(s[a]) << ',' << format_double(t[b]) << ',' << format_double(v.real()) << ','
                << format_double(v.imag()) << '\n';
        }
    }
}

std::string to_string(const Matrix& m)
{
    std::ostringstream ss;
    write_matrix_csv(ss, m);
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    out << text;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace kinf::io
