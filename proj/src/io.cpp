#include "mixdil/io.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mixdil/errors.hpp"
#include "tally.hpp"

namespace mixdil {
namespace {

using json = nlohmann::json;
using detail::fmt;

constexpr char kMagic[4] = {'M', 'D', 'F', '1'};

void put_le(std::ostream& out, std::uint64_t v, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, bytes);
}

std::uint64_t get_le(std::istream& in, int bytes, const char* what) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), bytes)) throw FormatError(std::string("truncated array file at ") + what);
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

std::int64_t product(const IntVector& e) {
  std::int64_t n = 1;
  for (Eigen::Index i = 0; i < e.size(); ++i) n *= e(i);
  return n;
}

cd parse_entry(const std::string& field, int line) {
  std::string s = field;
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  auto bad = [&] { return FormatError("line " + std::to_string(line) + ": cannot parse \"" + field + "\""); };
  if (s.empty()) throw bad();
  double re = 0.0, im = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto r = std::from_chars(b, e, re);
  if (r.ec != std::errc()) throw bad();
  if (r.ptr == e) return {re, 0.0};
  if (e[-1] != 'j' && e[-1] != 'i') throw bad();
  const char* p = r.ptr;
  if (*p == '+') ++p;
  auto r2 = std::from_chars(p, e - 1, im);
  if (r2.ec != std::errc() || r2.ptr != e - 1) throw bad();
  return {re, im};
}

json int_vector_json(const IntVector& v) { return json(std::vector<std::int64_t>(v.data(), v.data() + v.size())); }

json int_matrix_json(const IntMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    IntVector r = m.row(i).transpose();
    rows.push_back(int_vector_json(r));
  }
  return rows;
}

IntVector int_vector_from(const json& j, const char* key) {
  if (!j.is_array()) throw FormatError(std::string(key) + " must be an array of integers");
  IntVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) throw FormatError(std::string(key) + " must be an array of integers");
    v(i) = j[i].get<std::int64_t>();
  }
  return v;
}

IntMatrix int_matrix_from(const json& j, const char* key) {
  if (!j.is_array()) throw FormatError(std::string(key) + " must be a matrix");
  if (j.empty()) return {};
  IntMatrix m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const IntVector r = int_vector_from(j[i], key);
    if (r.size() != m.cols()) throw FormatError(std::string(key) + " has ragged rows");
    m.row(i) = r.transpose();
  }
  return m;
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("manifest entry lacks \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest field \"") + key + "\": " + e.what());
  }
}

std::string band_file(const std::filesystem::path& prefix, int l, int j) {
  return prefix.filename().string() + ".l" + std::to_string(l) + ".j" + std::to_string(j) + ".mdf";
}

const BandEntry& find_band(const BandManifest& m, int l, int j) {
  for (const auto& b : m.bands)
    if (b.l == l && b.j == j) return b;
  throw FormatError("manifest lists no band l=" + std::to_string(l) + ", j=" + std::to_string(j));
}

}  // namespace

std::int64_t ArrayData::points() const { return product(extents); }

void write_mdf(std::ostream& out, const ArrayData& a) {
  out.write(kMagic, 4);
  put_le(out, static_cast<std::uint64_t>(a.extents.size()), 4);
  put_le(out, static_cast<std::uint64_t>(a.rows), 4);
  put_le(out, static_cast<std::uint64_t>(a.cols), 4);
  for (Eigen::Index i = 0; i < a.extents.size(); ++i) put_le(out, static_cast<std::uint64_t>(a.extents(i)), 8);
  for (const cd& z : a.values) {
    put_le(out, std::bit_cast<std::uint64_t>(z.real()), 8);
    put_le(out, std::bit_cast<std::uint64_t>(z.imag()), 8);
  }
}

ArrayData read_mdf(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) throw FormatError("not an MDF1 array file");
  ArrayData a;
  const std::uint64_t d = get_le(in, 4, "dim");
  const std::uint64_t rows = get_le(in, 4, "rows");
  const std::uint64_t cols = get_le(in, 4, "cols");
  if (d == 0 || d > 16 || rows == 0 || cols == 0 || rows > 1024 || cols > 1024)
    throw FormatError("implausible array header");
  a.rows = static_cast<int>(rows);
  a.cols = static_cast<int>(cols);
  a.extents.resize(static_cast<Eigen::Index>(d));
  std::uint64_t n = rows * cols;
  for (std::uint64_t i = 0; i < d; ++i) {
    const std::uint64_t e = get_le(in, 8, "extents");
    if (e > (std::uint64_t{1} << 40)) throw FormatError("implausible array extent");
    a.extents(static_cast<Eigen::Index>(i)) = static_cast<std::int64_t>(e);
    if (e != 0 && n > (std::uint64_t{1} << 40) / e) throw FormatError("array too large");
    n *= e;
  }
  a.values.resize(n);
  for (auto& z : a.values) {
    const double re = std::bit_cast<double>(get_le(in, 8, "values"));
    const double im = std::bit_cast<double>(get_le(in, 8, "values"));
    z = {re, im};
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after array data");
  return a;
}

void save_mdf(const std::filesystem::path& path, const ArrayData& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  write_mdf(out, a);
  if (!out) throw FormatError("write failed for " + path.string());
}

ArrayData load_mdf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return read_mdf(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_array_csv(std::ostream& out, const ArrayData& a) {
  if (a.extents.size() != 1) throw FormatError("text arrays are one-dimensional");
  const int per = a.rows * a.cols;
  for (std::int64_t p = 0; p < a.points(); ++p) {
    for (int e = 0; e < per; ++e) {
      const cd z = a.values[p * per + e];
      out << (e ? "," : "") << fmt(z.real());
      if (z.imag() != 0.0) out << (z.imag() < 0 ? "" : "+") << fmt(z.imag()) << "j";
    }
    out << "\n";
  }
}

ArrayData read_array_csv(std::istream& in) {
  ArrayData a;
  a.rows = 1;
  a.cols = 0;
  std::string line;
  int lineno = 0;
  std::int64_t points = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string f;
    int count = 0;
    while (std::getline(ss, f, ',')) {
      a.values.push_back(parse_entry(f, lineno));
      ++count;
    }
    if (a.cols == 0) a.cols = count;
    if (count != a.cols) throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(a.cols) +
                                           " entries, found " + std::to_string(count));
    ++points;
  }
  if (points == 0) throw FormatError("text array has no data lines");
  a.extents = IntVector::Constant(1, points);
  return a;
}

ArrayData load_array(const std::filesystem::path& path, bool csv) {
  if (csv || path.extension() == ".csv") {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    try {
      return read_array_csv(in);
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  return load_mdf(path);
}

void save_array(const std::filesystem::path& path, const ArrayData& a, bool csv) {
  if (csv || path.extension() == ".csv") {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    write_array_csv(out, a);
    return;
  }
  save_mdf(path, a);
}

ArrayData to_array(const FilterSeq& u, const IntVector& offset, const IntVector& extents) {
  ArrayData a;
  a.extents = extents;
  a.rows = u.rows();
  a.cols = u.cols();
  a.values.reserve(static_cast<std::size_t>(a.points() * a.rows * a.cols));
  const FloatSeq& v = u.values();
  for_each_point(offset, extents, [&](const IntVector& k) {
    for (int i = 0; i < a.rows; ++i)
      for (int j = 0; j < a.cols; ++j) a.values.push_back(v.value(k, i, j));
  });
  return a;
}

ArrayData to_array(const PeriodicArray& u) {
  return {u.box().extents(), u.rows(), u.cols(), u.data()};
}

FilterSeq to_seq(const ArrayData& a, const IntVector& offset) {
  if (offset.size() != a.extents.size()) throw DimensionMismatch("offset and array dimensions differ");
  FloatSeq s(offset, a.extents, a.rows, a.cols);
  std::size_t n = 0;
  for_each_point(offset, a.extents, [&](const IntVector& k) {
    for (int i = 0; i < a.rows; ++i)
      for (int j = 0; j < a.cols; ++j) s.at(k, i, j) = a.values[n++];
  });
  return FilterSeq(s);
}

PeriodicArray to_periodic(const ArrayData& a, const Lattice& period) {
  PeriodicArray u(period, a.rows, a.cols);
  if (u.box().extents() != a.extents)
    throw ShapeMismatch("array extents " + fmt(a.extents) + " do not match the period box " + fmt(u.box().extents()));
  u.data() = a.values;
  return u;
}

void save_manifest(const std::filesystem::path& path, const BandManifest& m) {
  json j;
  j["format"] = "mixdil-bands";
  j["bank"] = m.bank;
  j["levels"] = m.levels;
  j["periodic"] = m.periodic;
  j["rows"] = m.rows;
  if (m.periodic) j["period"] = int_matrix_json(m.period);
  j["signal"] = {{"offset", int_vector_json(m.signal_offset)}, {"shape", int_vector_json(m.signal_shape)}};
  json bands = json::array();
  for (const auto& b : m.bands) {
    json e = {{"l", b.l}, {"j", b.j}, {"file", b.file}, {"offset", int_vector_json(b.offset)},
              {"shape", int_vector_json(b.shape)}};
    if (b.period.size()) e["period"] = int_matrix_json(b.period);
    bands.push_back(e);
  }
  j["bands"] = bands;
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

BandManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "mixdil-bands") throw FormatError(path.string() + ": not a band manifest");
  BandManifest m;
  m.bank = field<std::string>(j, "bank");
  m.levels = field<int>(j, "levels");
  m.periodic = field<bool>(j, "periodic");
  m.rows = field<int>(j, "rows");
  if (m.periodic) m.period = int_matrix_from(j.at("period"), "period");
  if (!j.contains("signal") || !j["signal"].is_object()) throw FormatError("manifest lacks \"signal\"");
  m.signal_offset = int_vector_from(j["signal"].value("offset", json()), "signal offset");
  m.signal_shape = int_vector_from(j["signal"].value("shape", json()), "signal shape");
  if (!j.contains("bands") || !j["bands"].is_array()) throw FormatError("manifest lacks \"bands\"");
  for (const auto& e : j["bands"]) {
    BandEntry b;
    b.l = field<int>(e, "l");
    b.j = field<int>(e, "j");
    b.file = field<std::string>(e, "file");
    b.offset = int_vector_from(e.value("offset", json()), "offset");
    b.shape = int_vector_from(e.value("shape", json()), "shape");
    if (e.contains("period")) b.period = int_matrix_from(e["period"], "period");
    m.bands.push_back(b);
  }
  return m;
}

BandManifest write_bands(const Pyramid& pyr, const std::filesystem::path& prefix, const IntVector& signal_offset,
                         const IntVector& signal_shape) {
  BandManifest m;
  m.bank = pyr.bank_name;
  m.levels = pyr.levels;
  m.signal_offset = signal_offset;
  m.signal_shape = signal_shape;
  m.rows = pyr.approx.rows();
  auto emit = [&](const FilterSeq& band, int l, int j) {
    BandEntry e{l, j, band_file(prefix, l, j), {}, IntVector::Zero(signal_offset.size()),
                IntVector::Zero(signal_offset.size())};
    if (!band.empty()) {
      e.offset = band.values().offset();
      e.shape = band.values().shape();
    }
    ArrayData a = to_array(band, e.offset, e.shape);
    a.rows = band.rows();
    a.cols = band.cols();
    save_mdf(prefix.parent_path() / e.file, a);
    m.bands.push_back(e);
  };
  for (int l = 1; l <= pyr.wavelets(); ++l)
    for (int j = 1; j <= pyr.levels; ++j) emit(pyr.band(l, j), l, j);
  emit(pyr.approx, 0, pyr.levels);
  return m;
}

BandManifest write_bands(const PeriodicPyramid& pyr, const std::filesystem::path& prefix) {
  BandManifest m;
  m.bank = pyr.bank_name;
  m.levels = pyr.levels;
  m.periodic = true;
  m.rows = pyr.approx.rows();
  auto emit = [&](const PeriodicArray& band, int l, int j) {
    const int d = band.dim();
    BandEntry e{l, j, band_file(prefix, l, j), band.period().basis(), IntVector::Zero(d), band.box().extents()};
    save_mdf(prefix.parent_path() / e.file, to_array(band));
    m.bands.push_back(e);
  };
  for (int l = 1; l <= pyr.wavelets(); ++l)
    for (int j = 1; j <= pyr.levels; ++j) emit(pyr.band(l, j), l, j);
  emit(pyr.approx, 0, pyr.levels);
  return m;
}

Pyramid read_bands(const BandManifest& m, const std::filesystem::path& dir, int wavelets) {
  if (m.periodic) throw FormatError("manifest describes periodic bands");
  Pyramid p;
  p.bank_name = m.bank;
  p.levels = m.levels;
  auto load = [&](int l, int j) {
    const BandEntry& e = find_band(m, l, j);
    const ArrayData a = load_mdf(dir / e.file);
    if (a.extents != e.shape) throw FormatError(e.file + ": extents differ from the manifest");
    return to_seq(a, e.offset);
  };
  p.detail.resize(wavelets);
  for (int l = 1; l <= wavelets; ++l)
    for (int j = 1; j <= m.levels; ++j) p.detail[l - 1].push_back(load(l, j));
  p.approx = load(0, m.levels);
  return p;
}

PeriodicPyramid read_periodic_bands(const BandManifest& m, const std::filesystem::path& dir, int wavelets) {
  if (!m.periodic) throw FormatError("manifest describes non-periodic bands");
  PeriodicPyramid p{m.bank, m.levels, {}, PeriodicArray(Lattice(m.period), m.rows, 1)};
  auto load = [&](int l, int j) {
    const BandEntry& e = find_band(m, l, j);
    if (!e.period.size()) throw FormatError("periodic band " + e.file + " has no period");
    const ArrayData a = load_mdf(dir / e.file);
    try {
      return to_periodic(a, Lattice(e.period));
    } catch (const ShapeMismatch& ex) {
      throw FormatError(e.file + ": " + ex.what());
    }
  };
  p.detail.resize(wavelets);
  for (int l = 1; l <= wavelets; ++l)
    for (int j = 1; j <= m.levels; ++j) p.detail[l - 1].push_back(load(l, j));
  p.approx = load(0, m.levels);
  return p;
}

}  // namespace mixdil
