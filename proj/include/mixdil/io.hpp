#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mixdil/xform.hpp"

namespace mixdil {

/// Dense array on the box [0, extents), matrix entries innermost and points in
/// row-major order (last coordinate fastest).
struct ArrayData {
  IntVector extents;
  int rows = 1;
  int cols = 1;
  std::vector<cd> values;

  std::int64_t points() const;
  friend bool operator==(const ArrayData&, const ArrayData&) = default;
};

/// Binary "MDF1" layout: magic, u32 dim, u32 rows, u32 cols, u64 extents[dim],
/// then f64 (re, im) pairs, all little-endian. Throws FormatError.
void write_mdf(std::ostream& out, const ArrayData& a);
ArrayData read_mdf(std::istream& in);
void save_mdf(const std::filesystem::path& path, const ArrayData& a);
ArrayData load_mdf(const std::filesystem::path& path);

/// One-dimensional text form: one line per point, rows*cols comma-separated
/// entries per line. Complex entries are written as re+imj. A file read this way
/// has rows = 1.
void write_array_csv(std::ostream& out, const ArrayData& a);
ArrayData read_array_csv(std::istream& in);

/// Loads by extension: ".csv" reads text, anything else MDF1.
ArrayData load_array(const std::filesystem::path& path, bool csv = false);
void save_array(const std::filesystem::path& path, const ArrayData& a, bool csv = false);

ArrayData to_array(const FilterSeq& u, const IntVector& offset, const IntVector& extents);
ArrayData to_array(const PeriodicArray& u);
FilterSeq to_seq(const ArrayData& a, const IntVector& offset);
/// The extents must match the residue box of `period`.
PeriodicArray to_periodic(const ArrayData& a, const Lattice& period);

/// Band files written by an analysis, with enough layout to rebuild the pyramid.
struct BandEntry {
  int l = 0;
  int j = 0;
  std::string file;
  IntMatrix period;    // empty for non-periodic bands
  IntVector offset;    // first stored index
  IntVector shape;
};

struct BandManifest {
  std::string bank;
  int levels = 0;
  bool periodic = false;
  IntMatrix period;         // input period when periodic
  IntVector signal_offset;  // input box, used to crop synthesis output
  IntVector signal_shape;
  int rows = 1;
  std::vector<BandEntry> bands;
};

void save_manifest(const std::filesystem::path& path, const BandManifest& m);
BandManifest load_manifest(const std::filesystem::path& path);

/// Writes every band of a pyramid next to `prefix` and returns the manifest;
/// file names in the manifest are relative to its directory.
BandManifest write_bands(const Pyramid& pyr, const std::filesystem::path& prefix, const IntVector& signal_offset,
                         const IntVector& signal_shape);
BandManifest write_bands(const PeriodicPyramid& pyr, const std::filesystem::path& prefix);
/// Reads the band files of a manifest located in `dir`.
Pyramid read_bands(const BandManifest& m, const std::filesystem::path& dir, int wavelets);
PeriodicPyramid read_periodic_bands(const BandManifest& m, const std::filesystem::path& dir, int wavelets);

}  // namespace mixdil
