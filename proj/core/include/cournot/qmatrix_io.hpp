#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "cournot/qlearning.hpp"

namespace cournot {

/// One Q-matrix as stored on disk: a header of four little-endian uint32
/// (m, n, k, agent id) followed by m^(n k) * m row-major float64 values.
struct QMatrixRecord {
  std::uint32_t m = 0;
  std::uint32_t n = 2;
  std::uint32_t k = 0;
  std::uint32_t agent = 0;
  QMatrix q;
};

void write_qmatrix(std::ostream& out, const QMatrixRecord& record);
/// Reads the next record; returns false on clean end of stream and throws
/// InputError on a truncated or inconsistent record.
bool read_qmatrix(std::istream& in, QMatrixRecord& record);

void write_qmatrix_file(const std::filesystem::path& path,
                        const std::vector<QMatrixRecord>& records);
std::vector<QMatrixRecord> read_qmatrix_file(const std::filesystem::path& path);

}  // namespace cournot
