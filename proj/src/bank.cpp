#include "mixdil/bank.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "mixdil/errors.hpp"

namespace mixdil {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "mixdil-bank-v1";

std::string role_name(Role r) { return r == Role::lowpass ? "lowpass" : "wavelet"; }

void check_filter(const FilterSeq& f, int dim, int rows, int cols, const std::string& where) {
  if (f.dim() != dim)
    throw InvariantViolation(where + ": filter dimension " + std::to_string(f.dim()) + " differs from bank dim " +
                             std::to_string(dim));
  if (f.rows() != rows || f.cols() != cols)
    throw InvariantViolation(where + ": filter is " + std::to_string(f.rows()) + "x" + std::to_string(f.cols()) +
                             ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
}

IntMatrix scalar_matrix(int d, std::int64_t c) { return c * identity_matrix(d); }

FilterSeq exact_filter(const IntVector& offset, const IntVector& shape, int rows, int cols,
                       std::vector<ScaledScalar> c) {
  return FilterSeq::from_exact(offset, shape, rows, cols, c);
}

IntVector ivec(std::initializer_list<std::int64_t> v) {
  IntVector x(v.size());
  int i = 0;
  for (auto e : v) x(i++) = e;
  return x;
}

std::vector<Channel> self_dual_channels(std::vector<std::pair<IntMatrix, FilterSeq>> items) {
  std::vector<Channel> out;
  for (std::size_t i = 0; i < items.size(); ++i)
    out.push_back({i == 0 ? Role::lowpass : Role::wavelet, DilationMatrix(items[i].first), items[i].second,
                   items[i].second});
  return out;
}

FilterBank make_haar() {
  const IntMatrix two = scalar_matrix(1, 2);
  return FilterBank("haar", 1, 1,
                    self_dual_channels({{two, exact_filter(ivec({0}), ivec({2}), 1, 1, {{1, 2, 1}, {1, 2, 1}})},
                                        {two, exact_filter(ivec({0}), ivec({2}), 1, 1, {{1, 2, 1}, {-1, 2, 1}})}}));
}

FilterBank make_bspline_tf() {
  const IntMatrix two = scalar_matrix(1, 2);
  const IntVector o = ivec({0}), s = ivec({3});
  return FilterBank(
      "bspline-tf", 1, 1,
      self_dual_channels({{two, exact_filter(o, s, 1, 1, {{1, 4, 1}, {1, 2, 1}, {1, 4, 1}})},
                          {two, exact_filter(o, s, 1, 1, {{-1, 4, 1}, {1, 2, 1}, {-1, 4, 1}})},
                          {two, exact_filter(o, s, 1, 1, {{1, 4, 2}, {0, 1, 1}, {-1, 4, 2}})}}));
}

FilterBank make_haar_split4() {
  // 1/(2 sqrt 2) = sqrt(2)/4
  return FilterBank(
      "haar-split4", 1, 1,
      self_dual_channels(
          {{scalar_matrix(1, 2), exact_filter(ivec({0}), ivec({2}), 1, 1, {{1, 2, 1}, {1, 2, 1}})},
           {scalar_matrix(1, 4), exact_filter(ivec({0}), ivec({2}), 1, 1, {{1, 4, 2}, {-1, 4, 2}})},
           {scalar_matrix(1, 4), exact_filter(ivec({2}), ivec({2}), 1, 1, {{1, 4, 2}, {-1, 4, 2}})}}));
}

FilterBank make_haar2d() {
  const IntMatrix m = scalar_matrix(2, 2);
  const int low[2] = {1, 1}, high[2] = {1, -1};
  auto tensor = [&](const int* f, const int* g) {
    std::vector<ScaledScalar> c;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) c.push_back({f[a] * g[b], 4, 1});
    return exact_filter(ivec({0, 0}), ivec({2, 2}), 1, 1, c);
  };
  return FilterBank("haar2d", 2, 1,
                    self_dual_channels({{m, tensor(low, low)},
                                        {m, tensor(low, high)},
                                        {m, tensor(high, low)},
                                        {m, tensor(high, high)}}));
}

// ---- JSON ----

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw FormatError(where + ": unknown key \"" + it.key() + "\"");
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + ": missing field \"" + key + "\"");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw FormatError(where + ": expected an integer");
  return v.get<std::int64_t>();
}

std::vector<std::int64_t> int_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw FormatError(where + ": expected an array");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_int(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> num_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw FormatError(where + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw FormatError(where + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

IntVector to_ivec(const std::vector<std::int64_t>& v) {
  IntVector x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i)) = v[i];
  return x;
}

json filter_to_json(const FilterSeq& f) {
  json j;
  j["offset"] = std::vector<std::int64_t>(f.offset().begin(), f.offset().end());
  j["shape"] = std::vector<std::int64_t>(f.shape().begin(), f.shape().end());
  j["rows"] = f.rows();
  j["cols"] = f.cols();
  std::vector<double> re, im;
  bool has_im = false;
  for (const cd& x : f.values().data()) {
    re.push_back(x.real());
    im.push_back(x.imag());
    has_im = has_im || x.imag() != 0.0;
  }
  j["re"] = re;
  if (has_im) j["im"] = im;
  if (f.exact_is_single_term()) {
    std::vector<std::int64_t> num, den, rad;
    for (const auto& x : f.exact()->data()) {
      const ScaledScalar s = *x.single();
      num.push_back(s.num);
      den.push_back(s.den);
      rad.push_back(s.radicand);
    }
    j["exact"] = {{"num", num}, {"den", den}, {"radicand", rad}};
  }
  return j;
}

FilterSeq filter_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"offset", "shape", "rows", "cols", "re", "im", "exact"}, where);
  const auto offset = int_array(field(j, "offset", where), where + ".offset");
  const auto shape = int_array(field(j, "shape", where), where + ".shape");
  if (offset.size() != shape.size()) throw FormatError(where + ": offset and shape lengths differ");
  if (offset.empty()) throw FormatError(where + ": dimension must be at least 1");
  const std::int64_t rows = as_int(field(j, "rows", where), where + ".rows");
  const std::int64_t cols = as_int(field(j, "cols", where), where + ".cols");
  if (rows < 1 || cols < 1) throw FormatError(where + ": rows and cols must be positive");
  std::int64_t count = rows * cols;
  for (auto s : shape) {
    if (s < 0) throw FormatError(where + ".shape: negative extent");
    count *= s;
  }
  const auto re = num_array(field(j, "re", where), where + ".re");
  if (static_cast<std::int64_t>(re.size()) != count)
    throw FormatError(where + ".re: expected " + std::to_string(count) + " values, found " + std::to_string(re.size()));
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("im")) {
    im = num_array(j["im"], where + ".im");
    if (im.size() != re.size()) throw FormatError(where + ".im: length differs from re");
  }
  const IntVector o = to_ivec(offset), s = to_ivec(shape);
  if (j.contains("exact")) {
    const std::string ew = where + ".exact";
    reject_unknown(j["exact"], {"num", "den", "radicand"}, ew);
    const auto num = int_array(field(j["exact"], "num", ew), ew + ".num");
    const auto den = int_array(field(j["exact"], "den", ew), ew + ".den");
    const auto rad = int_array(field(j["exact"], "radicand", ew), ew + ".radicand");
    if (num.size() != re.size() || den.size() != re.size() || rad.size() != re.size())
      throw FormatError(ew + ": array lengths differ from re");
    std::vector<ScaledScalar> c;
    for (std::size_t i = 0; i < num.size(); ++i) {
      if (den[i] == 0) throw FormatError(ew + ".den[" + std::to_string(i) + "]: zero denominator");
      if (rad[i] < 1) throw FormatError(ew + ".radicand[" + std::to_string(i) + "]: must be positive");
      if (im[i] != 0.0) throw FormatError(where + ".im[" + std::to_string(i) + "]: exact data is real");
      c.push_back({num[i], den[i], rad[i]});
    }
    return FilterSeq::from_exact(o, s, static_cast<int>(rows), static_cast<int>(cols), c);
  }
  std::vector<cd> c(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) c[i] = cd(re[i], im[i]);
  return FilterSeq::from_values(o, s, static_cast<int>(rows), static_cast<int>(cols), c);
}

}  // namespace

FilterBank::FilterBank(std::string name, int dim, int multiplicity, std::vector<Channel> channels)
    : name_(std::move(name)), dim_(dim), r_(multiplicity), channels_(std::move(channels)) {
  if (dim_ < 1) throw InvariantViolation("FilterBank: dim must be at least 1");
  if (r_ < 1) throw InvariantViolation("FilterBank: multiplicity must be at least 1");
  if (channels_.empty()) throw InvariantViolation("FilterBank: no channels");
  for (std::size_t l = 0; l < channels_.size(); ++l) {
    const Channel& c = channels_[l];
    const std::string where = "channel " + std::to_string(l);
    if ((l == 0) != (c.role == Role::lowpass))
      throw InvariantViolation(where + ": channel 0 must be the only lowpass channel");
    if (c.dilation.dim() != dim_) throw InvariantViolation(where + ": dilation dimension differs from bank dim");
    const int rows = c.role == Role::lowpass ? r_ : 1;
    check_filter(c.primal, dim_, rows, r_, where + " primal");
    check_filter(c.dual, dim_, rows, r_, where + " dual");
  }
}

bool operator==(const FilterBank& a, const FilterBank& b) {
  if (a.name_ != b.name_ || a.dim_ != b.dim_ || a.r_ != b.r_ || a.channels_.size() != b.channels_.size())
    return false;
  for (std::size_t l = 0; l < a.channels_.size(); ++l) {
    const Channel &x = a.channels_[l], &y = b.channels_[l];
    if (x.role != y.role || !(x.dilation == y.dilation) || !(x.primal == y.primal) || !(x.dual == y.dual))
      return false;
  }
  return true;
}

std::vector<std::string> builtin_names() { return {"haar", "bspline-tf", "haar-split4", "haar2d"}; }

FilterBank builtin(const std::string& name) {
  if (name == "haar") return make_haar();
  if (name == "bspline-tf") return make_bspline_tf();
  if (name == "haar-split4") return make_haar_split4();
  if (name == "haar2d") return make_haar2d();
  throw UnknownName("unknown builtin bank \"" + name + "\"");
}

FilterBank dual_swapped(const FilterBank& bank) {
  std::vector<Channel> ch = bank.channels();
  for (auto& c : ch) std::swap(c.primal, c.dual);
  return FilterBank(bank.name(), bank.dim(), bank.multiplicity(), ch);
}

FilterBank self_dual(const FilterBank& bank) {
  std::vector<Channel> ch = bank.channels();
  for (auto& c : ch) c.dual = c.primal;
  return FilterBank(bank.name(), bank.dim(), bank.multiplicity(), ch);
}

std::string bank_to_json(const FilterBank& bank) {
  json j;
  j["format"] = kFormat;
  j["dim"] = bank.dim();
  j["multiplicity"] = bank.multiplicity();
  j["name"] = bank.name();
  j["channels"] = json::array();
  for (const auto& c : bank.channels()) {
    json ch;
    ch["role"] = role_name(c.role);
    std::vector<std::vector<std::int64_t>> m;
    for (int i = 0; i < c.dilation.dim(); ++i) {
      std::vector<std::int64_t> row;
      for (int k = 0; k < c.dilation.dim(); ++k) row.push_back(c.dilation.matrix()(i, k));
      m.push_back(row);
    }
    ch["dilation"] = m;
    ch["primal"] = filter_to_json(c.primal);
    ch["dual"] = filter_to_json(c.dual);
    j["channels"].push_back(ch);
  }
  return j.dump(2) + "\n";
}

FilterBank bank_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("bank descriptor is not valid JSON: ") + e.what());
  }
  reject_unknown(j, {"format", "dim", "multiplicity", "name", "channels"}, "bank");
  const json& fmt = field(j, "format", "bank");
  if (!fmt.is_string() || fmt.get<std::string>() != kFormat)
    throw FormatError(std::string("bank.format: expected \"") + kFormat + "\"");
  const std::int64_t dim = as_int(field(j, "dim", "bank"), "bank.dim");
  const std::int64_t r = as_int(field(j, "multiplicity", "bank"), "bank.multiplicity");
  const json& name = field(j, "name", "bank");
  if (!name.is_string()) throw FormatError("bank.name: expected a string");
  const json& chans = field(j, "channels", "bank");
  if (!chans.is_array()) throw FormatError("bank.channels: expected an array");
  std::vector<Channel> channels;
  for (std::size_t l = 0; l < chans.size(); ++l) {
    const std::string where = "bank.channels[" + std::to_string(l) + "]";
    const json& c = chans[l];
    reject_unknown(c, {"role", "dilation", "primal", "dual"}, where);
    const json& role = field(c, "role", where);
    Role rl;
    if (role == "lowpass")
      rl = Role::lowpass;
    else if (role == "wavelet")
      rl = Role::wavelet;
    else
      throw FormatError(where + ".role: expected \"lowpass\" or \"wavelet\"");
    const json& dil = field(c, "dilation", where);
    if (!dil.is_array() || dil.empty()) throw FormatError(where + ".dilation: expected a square integer matrix");
    IntMatrix m(dil.size(), dil.size());
    for (std::size_t i = 0; i < dil.size(); ++i) {
      const auto row = int_array(dil[i], where + ".dilation[" + std::to_string(i) + "]");
      if (row.size() != dil.size()) throw FormatError(where + ".dilation: matrix is not square");
      for (std::size_t k = 0; k < row.size(); ++k) m(i, k) = row[k];
    }
    FilterSeq primal = filter_from_json(field(c, "primal", where), where + ".primal");
    FilterSeq dual = c.contains("dual") ? filter_from_json(c["dual"], where + ".dual") : primal;
    try {
      channels.push_back({rl, DilationMatrix(m), std::move(primal), std::move(dual)});
    } catch (const SingularMatrix& e) {
      throw InvariantViolation(where + ".dilation: " + e.what());
    } catch (const NotExpansive& e) {
      throw InvariantViolation(where + ".dilation: " + e.what());
    }
  }
  return FilterBank(name.get<std::string>(), static_cast<int>(dim), static_cast<int>(r), std::move(channels));
}

FilterBank load_bank(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open bank file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return bank_from_json(ss.str());
}

void save_bank(const FilterBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write bank file " + path.string());
  out << bank_to_json(bank);
}

}  // namespace mixdil
