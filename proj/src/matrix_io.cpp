#include "corrosion/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace corrosion {

std::string MatrixFile::meta(const std::string& key) const
{
    for (const auto& [k, v] : provenance)
        if (k == key)
            return v;
    return {};
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& columns, const Provenance& provenance)
{
    if (columns.size() != static_cast<std::size_t>(m.cols()))
        throw std::invalid_argument("column names do not match the matrix width");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    for (const auto& [k, v] : provenance)
        out << "# " << k << '=' << v << '\n';
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c];
    out << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out << (c ? "," : "") << format_number(m(r, c));
        out << '\n';
    }
}

MatrixFile read_matrix_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    MatrixFile f;
    std::vector<std::vector<double>> rows;
    std::string line;
    bool header = false;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        return cells;
    };
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq != std::string::npos)
                f.provenance.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
            continue;
        }
        if (!header) {
            f.columns = split(line);
            header = true;
            continue;
        }
        std::vector<double> row;
        for (const auto& cell : split(line)) {
            if (cell == "nan")
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            else if (cell == "inf")
                row.push_back(std::numeric_limits<double>::infinity());
            else if (cell == "-inf")
                row.push_back(-std::numeric_limits<double>::infinity());
            else
                row.push_back(std::stod(cell));
        }
        if (row.size() != f.columns.size())
            throw std::runtime_error(path.string() + ": row width does not match the header");
        rows.push_back(std::move(row));
    }
    f.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(f.columns.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            f.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return f;
}

} // namespace corrosion
