#include "cournot/qmatrix_io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "cournot/error.hpp"

namespace cournot {

namespace {

template <typename U>
void put_le(std::ostream& out, U value) {
  char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(bytes, sizeof(U));
}

template <typename U>
bool get_le(std::istream& in, U& value) {
  unsigned char bytes[sizeof(U)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(U));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(U))) return false;
  value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return true;
}

std::size_t state_count(std::uint32_t m, std::uint32_t n, std::uint32_t k) {
  std::size_t states = 1;
  for (std::uint32_t i = 0; i < n * k; ++i) states *= m;
  return states;
}

}  // namespace

void write_qmatrix(std::ostream& out, const QMatrixRecord& record) {
  if (record.q.actions() != record.m ||
      record.q.states() != state_count(record.m, record.n, record.k)) {
    throw InvalidArgument("Q-matrix shape does not match its header");
  }
  put_le<std::uint32_t>(out, record.m);
  put_le<std::uint32_t>(out, record.n);
  put_le<std::uint32_t>(out, record.k);
  put_le<std::uint32_t>(out, record.agent);
  for (double v : record.q.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
}

bool read_qmatrix(std::istream& in, QMatrixRecord& record) {
  std::uint32_t header[4];
  if (!get_le(in, header[0])) {
    if (in.gcount() == 0) return false;
    throw InputError("truncated Q-matrix header");
  }
  for (int i = 1; i < 4; ++i) {
    if (!get_le(in, header[i])) throw InputError("truncated Q-matrix header");
  }
  record.m = header[0];
  record.n = header[1];
  record.k = header[2];
  record.agent = header[3];
  if (record.m == 0 || record.m > 4096 || record.n != 2 || record.k > 1 || record.agent > 1) {
    throw InputError(fmt::format("implausible Q-matrix header m={} n={} k={} agent={}", record.m,
                                 record.n, record.k, record.agent));
  }
  record.q = QMatrix(state_count(record.m, record.n, record.k), record.m);
  for (double& v : record.q.data()) {
    std::uint64_t bits = 0;
    if (!get_le(in, bits)) throw InputError("truncated Q-matrix body");
    v = std::bit_cast<double>(bits);
    if (!std::isfinite(v)) throw InputError("non-finite Q-value");
  }
  return true;
}

void write_qmatrix_file(const std::filesystem::path& path,
                        const std::vector<QMatrixRecord>& records) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write {}", tmp.string()));
    for (const auto& r : records) write_qmatrix(out, r);
    if (!out) throw InputError(fmt::format("write to {} failed", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

std::vector<QMatrixRecord> read_qmatrix_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  std::vector<QMatrixRecord> records;
  QMatrixRecord record;
  while (read_qmatrix(in, record)) records.push_back(std::move(record));
  return records;
}

}  // namespace cournot
