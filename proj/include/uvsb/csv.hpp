#pragma once

#include "uvsb/core.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace uvsb {

/// File-system failure while reading or writing results.
class IoError : public Error {
public:
    using Error::Error;
};

/// Scientific notation with 17 significant digits.
std::string format_double(double v);

/// Comma-separated writer with a mandatory header and LF line endings.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& cell(double v);
    CsvWriter& cell(long v);
    CsvWriter& cell(int v) { return cell(static_cast<long>(v)); }
    CsvWriter& cell(const std::string& v);
    void end_row();

    /// Flushes and throws IoError if any write failed.
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
    std::size_t pending_ = 0;
};

/// Header "x,<z_0>,<z_1>,..."; one row per x node.
void write_surface_csv(const std::filesystem::path& path, const Surface& s);

/// Reads a file written by write_surface_csv back into its values.
Field read_surface_csv(const std::filesystem::path& path, int nx, int nz);

}  // namespace uvsb
