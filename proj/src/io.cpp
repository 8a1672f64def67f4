#include <ginv/io.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace ginv {

Matrix read_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::vector<double> row;
        std::string tok;
        while (ss >> tok) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0') {
                throw io_error(path.string() + ":" + std::to_string(line_no) +
                               ": cannot parse '" + tok + "' as a number");
            }
            row.push_back(v);
        }
        if (row.empty()) continue;  // blank line
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw io_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(rows.front().size()) + " columns, got " +
                           std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw io_error(path.string() + ": no data rows");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    return m;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& payload) {
    namespace fs = std::filesystem;
    if (path.empty()) throw io_error("empty output path");
    const fs::path parent = path.parent_path();
    std::error_code ec;
    if (!parent.empty() && !fs::exists(parent, ec)) {
        throw io_error("directory does not exist: " + parent.string());
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
        out << payload;
        if (!out.flush()) throw io_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw io_error("rename to " + path.string() + " failed: " + ec.message());
}

}  // namespace ginv
