#pragma once

#include <filesystem>
#include <string>

#include <ginv/matrixlab.hpp>

namespace ginv {

// Whitespace-separated real matrix, one row per line; blank lines skipped.
// Ragged or non-numeric input raises io_error naming the line.
Matrix read_matrix_file(const std::filesystem::path& path);

// Writes via a temp file in the same directory plus rename, so a failed run
// never leaves a partial output file behind.
void write_text_atomic(const std::filesystem::path& path, const std::string& payload);

}  // namespace ginv
