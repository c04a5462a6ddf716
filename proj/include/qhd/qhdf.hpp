#pragma once

#include "qhd/field.hpp"

#include <filesystem>
#include <vector>

namespace qhd {

// Binary grid dump:
//   "QHDF" | u32 version=1 | u32 ndim | u32 count per axis | 2 x f64 bounds per axis |
//   row-major f64 samples (re, im interleaved for complex), little-endian throughout.
// The header has no real/complex flag or boundary kind; the sample kind follows
// from the payload length and the boundary is supplied by the reader.

struct QhdfDump {
  std::vector<std::size_t> counts;
  std::vector<Interval> bounds;
  bool complex = false;
  std::vector<double> samples;  ///< interleaved when complex
};

void write_qhdf(const std::filesystem::path& path, const RealField& f);
void write_qhdf(const std::filesystem::path& path, const ComplexField& f);

QhdfDump read_qhdf(const std::filesystem::path& path);
ComplexField complex_field_from_dump(const QhdfDump& dump, Boundary boundary);
RealField real_field_from_dump(const QhdfDump& dump, Boundary boundary);

}  // namespace qhd
