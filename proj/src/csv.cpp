#include "uvsb/csv.hpp"

#include <cstdio>
#include <sstream>

namespace uvsb {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size())
{
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v)
{
    if (pending_ == columns_) throw IoError(path_.string() + ": row wider than header");
    out_ << (pending_ ? "," : "") << v;
    ++pending_;
    return *this;
}

void CsvWriter::end_row()
{
    if (pending_ != columns_) throw IoError(path_.string() + ": row narrower than header");
    out_ << '\n';
    pending_ = 0;
}

void CsvWriter::close()
{
    out_.flush();
    if (!out_) throw IoError("write failed: " + path_.string());
    out_.close();
}

void write_surface_csv(const std::filesystem::path& path, const Surface& s)
{
    const Grid2D& g = s.grid();
    std::vector<std::string> header{"x"};
    for (double z : g.z) header.push_back(format_double(z));
    CsvWriter w(path, header);
    for (int i = 0; i < g.nx(); ++i) {
        w.cell(g.x[i]);
        for (int j = 0; j < g.nz(); ++j) w.cell(s(i, j));
        w.end_row();
    }
    w.close();
}

Field read_surface_csv(const std::filesystem::path& path, int nx, int nz)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    Field f(nx, nz);
    for (int i = 0; i < nx; ++i) {
        if (!std::getline(in, line)) throw IoError(path.string() + ": too few rows");
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        for (int j = 0; j < nz; ++j) {
            if (!std::getline(row, cell, ',')) throw IoError(path.string() + ": too few columns");
            f(i, j) = std::stod(cell);
        }
    }
    return f;
}

}  // namespace uvsb
