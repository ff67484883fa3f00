// Command-line front end. Exit codes: 0 all requested checks pass, 1 a check
// failed, 2 usage error, 3 unreadable or malformed input, 4 size limit exceeded.
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mixdil/das.hpp"
#include "mixdil/errors.hpp"
#include "mixdil/io.hpp"
#include "mixdil/refine.hpp"
#include "mixdil/stability.hpp"
#include "mixdil/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mixdil;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kFormat = 3, kEnvelope = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string num(const cd& z) {
  if (z.imag() == 0.0) return num(z.real());
  return num(z.real()) + (z.imag() < 0 ? "" : "+") + num(z.imag()) + "j";
}

FilterBank resolve_bank(const std::string& arg) {
  if (fs::exists(arg)) return load_bank(arg);
  try {
    return builtin(arg);
  } catch (const UnknownName&) {
    throw FormatError("no bank file or builtin bank named \"" + arg + "\"");
  }
}

IntVector parse_period(const std::string& s, int dim) {
  std::vector<std::int64_t> v;
  std::stringstream ss(s);
  std::string f;
  while (std::getline(ss, f, ',')) {
    std::int64_t x = 0;
    auto r = std::from_chars(f.data(), f.data() + f.size(), x);
    if (r.ec != std::errc() || r.ptr != f.data() + f.size() || x <= 0)
      throw UsageError("period entries must be positive integers: \"" + s + "\"");
    v.push_back(x);
  }
  if (v.size() == 1) v.assign(dim, v[0]);
  if (static_cast<int>(v.size()) != dim)
    throw UsageError("period \"" + s + "\" does not have " + std::to_string(dim) + " entries");
  return Eigen::Map<IntVector>(v.data(), dim);
}

json report_json(const VerificationReport& r) {
  json w = json::array();
  for (const auto& x : r.witnesses) w.push_back({{"location", x.location}, {"expected", x.expected}, {"got", x.got}});
  return {{"property", r.property},     {"verdict", to_string(r.verdict)}, {"max_residual", r.max_residual},
          {"tolerance", r.tolerance},   {"arithmetic", to_string(r.arithmetic)}, {"note", r.note},
          {"witnesses", w}};
}

void print_report(std::ostream& out, const VerificationReport& r) {
  out << r.property << ": " << to_string(r.verdict) << "  residual " << num(r.max_residual) << "  ("
      << to_string(r.arithmetic) << ")\n";
  if (!r.note.empty()) out << "  " << r.note << "\n";
  if (!r.passed())
    for (const auto& w : r.witnesses) out << "  at " << w.location << ": expected " << w.expected << ", got " << w.got << "\n";
}

// ---------------------------------------------------------------- verify

struct VerifyOpts {
  std::string bank;
  bool fourier = false, bi = false, critical = false, as_json = false;
  double tol = kDefaultTolerance;
  int grid = 0;
};

int run_verify(const VerifyOpts& o) {
  const FilterBank bank = resolve_bank(o.bank);
  std::vector<VerificationReport> reports{check_pr_time(bank, o.tol)};
  if (o.fourier) reports.push_back(check_pr_fourier(bank, o.grid, o.tol));
  if (o.bi) reports.push_back(check_biorthogonal(bank, o.tol));
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.passed();
  json doc = {{"bank", bank.name()}, {"checks", json::array()}};
  for (const auto& r : reports) doc["checks"].push_back(report_json(r));
  if (o.critical) {
    const CriticalSampling cs = critical_sampling(bank);
    ok = ok && cs.critical;
    doc["critical_sampling"] = {{"sum", cs.sum.str()}, {"critical", cs.critical}};
  }
  if (o.as_json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "bank " << bank.name() << "\n";
    for (const auto& r : reports) print_report(std::cout, r);
    if (o.critical) {
      const CriticalSampling cs = critical_sampling(bank);
      std::cout << "critical_sampling: sum " << cs.sum.str() << " vs " << bank.multiplicity() << ", "
                << (cs.critical ? "critical" : "redundant") << "\n";
    }
  }
  return ok ? kPass : kFail;
}

// ---------------------------------------------------------------- transform

struct TransformOpts {
  std::string bank, input, output, periodic;
  int levels = 1;
  bool csv = false;
};

int run_analyze(const TransformOpts& o) {
  const FilterBank bank = resolve_bank(o.bank);
  if (o.levels < 1) throw UsageError("--levels must be at least 1");
  const ArrayData a = load_array(o.input, o.csv);
  if (a.extents.size() != bank.dim())
    throw UsageError("input is " + std::to_string(a.extents.size()) + "-dimensional, bank is " +
                     std::to_string(bank.dim()) + "-dimensional");
  const fs::path prefix = o.output;
  if (!prefix.parent_path().empty()) fs::create_directories(prefix.parent_path());
  BandManifest m;
  if (!o.periodic.empty()) {
    const IntVector n = parse_period(o.periodic, bank.dim());
    if (n != a.extents) throw UsageError("period " + o.periodic + " does not match the input extents");
    const PeriodicArray v = to_periodic(a, diagonal_lattice(n));
    m = write_bands(analyze_periodic(bank, v, o.levels), prefix);
    m.period = v.period().basis();
    m.signal_offset = IntVector::Zero(bank.dim());
    m.signal_shape = n;
  } else {
    const IntVector zero = IntVector::Zero(bank.dim());
    m = write_bands(analyze(bank, to_seq(a, zero), o.levels), prefix, zero, a.extents);
  }
  m.rows = a.rows;
  const fs::path manifest = prefix.string() + ".json";
  save_manifest(manifest, m);
  std::cout << "wrote " << m.bands.size() << " bands, manifest " << manifest.string() << "\n";
  return kPass;
}

int run_synthesize(const TransformOpts& o) {
  const FilterBank bank = resolve_bank(o.bank);
  const BandManifest m = load_manifest(o.input);
  if (m.bank != bank.name())
    throw UsageError("manifest was written for bank \"" + m.bank + "\", not \"" + bank.name() + "\"");
  const fs::path dir = fs::path(o.input).parent_path();
  ArrayData out;
  if (m.periodic) {
    out = to_array(synthesize_periodic(bank, read_periodic_bands(m, dir, bank.wavelets())));
  } else {
    out = to_array(synthesize(bank, read_bands(m, dir, bank.wavelets())), m.signal_offset, m.signal_shape);
  }
  save_array(o.output, out, o.csv);
  std::cout << "wrote " << o.output << "\n";
  return kPass;
}

// ---------------------------------------------------------------- das

struct DasOpts {
  std::string bank, output;
  int channel = 0, level = 0;
  std::vector<std::int64_t> shift;
  bool dual = false;
};

int run_das(const DasOpts& o) {
  const FilterBank bank = resolve_bank(o.bank);
  const Side side = o.dual ? Side::dual : Side::primal;
  FilterSeq f;
  if (o.shift.empty()) {
    f = das_filter(bank, o.channel, o.level, side);
  } else {
    if (static_cast<int>(o.shift.size()) != bank.dim())
      throw UsageError("--shift needs " + std::to_string(bank.dim()) + " integers");
    f = das_element(bank, o.channel, o.level, Eigen::Map<const IntVector>(o.shift.data(), bank.dim()), side).seq;
  }
  std::ofstream file;
  if (!o.output.empty() && o.output != "-") {
    file.open(o.output);
    if (!file) throw FormatError("cannot write " + o.output);
  }
  std::ostream& out = file.is_open() ? file : std::cout;
  for (int i = 0; i < bank.dim(); ++i) out << (i ? "," : "") << "k" << i + 1;
  for (int a = 0; a < f.rows(); ++a)
    for (int b = 0; b < f.cols(); ++b) out << ",e" << a + 1 << b + 1;
  out << "\n";
  f.values().for_each([&](const IntVector& k, const cd* m) {
    bool nonzero = false;
    for (int e = 0; e < f.rows() * f.cols(); ++e) nonzero = nonzero || m[e] != 0.0;
    if (!nonzero) return;
    for (int i = 0; i < bank.dim(); ++i) out << (i ? "," : "") << k(i);
    for (int e = 0; e < f.rows() * f.cols(); ++e) out << "," << num(m[e]);
    out << "\n";
  });
  return kPass;
}

// ---------------------------------------------------------------- stability

struct StabilityOpts {
  std::string bank, period;
  int levels = 1, max_iter = 500;
  double tol = 1e-9;
  bool as_json = false;
};

int run_stability(const StabilityOpts& o) {
  const FilterBank bank = resolve_bank(o.bank);
  if (o.levels < 1) throw UsageError("--levels must be at least 1");
  const Lattice period = diagonal_lattice(parse_period(o.period, bank.dim()));
  const int admissible = max_levels(bank, period);
  if (o.levels > admissible)
    throw PeriodNotDivisible("period " + o.period + " admits at most " + std::to_string(admissible) + " levels");
  json rows = json::array();
  bool ok = true;
  if (!o.as_json) std::cout << "J  c1  c2  iterations  converged\n";
  for (int j = 1; j <= o.levels; ++j) {
    const StabilityReport r = frame_bounds(bank, j, period, o.max_iter, o.tol);
    ok = ok && r.converged;
    if (o.as_json)
      rows.push_back({{"J", j}, {"c1", r.c1}, {"c2", r.c2}, {"iterations", r.iterations}, {"converged", r.converged}});
    else
      std::cout << j << "  " << num(r.c1) << "  " << num(r.c2) << "  " << r.iterations << "  "
                << (r.converged ? "yes" : "no") << "\n";
  }
  if (o.as_json) std::cout << rows.dump(2) << "\n";
  return ok ? kPass : kFail;
}

// ---------------------------------------------------------------- refine

struct RefineOpts {
  std::string bank, output;
  int iters = 8, gram = 3, bounds = 64;
  bool dual = false, as_json = false;
};

int run_refine(const RefineOpts& o) {
  const FilterBank bank = resolve_bank(o.bank);
  if (o.iters < 1) throw UsageError("--iters must be at least 1");
  if (o.gram < 0) throw UsageError("--gram must be nonnegative");
  if (o.bounds < 1) throw UsageError("--bounds must be at least 1");
  const Side side = o.dual ? Side::dual : Side::primal;
  const Channel& low = bank.lowpass();
  const MaskDiagnostic diag = mask_spectrum(side == Side::primal ? low.primal : low.dual);
  if (!diag.ok) {
    std::cerr << "mask check failed: " << diag.message << "\n";
    return kFail;
  }
  const SampledFunction phi = cascade(bank, o.iters, side);
  const auto psi = derive_generators(bank, phi, side);
  const GramSequence gram = gram_shifts(phi, phi, Lattice::integers(bank.dim()), o.gram);
  const auto [lo, hi] = riesz_bounds(gram, o.bounds);
  if (!o.output.empty()) {
    const fs::path prefix = o.output;
    if (!prefix.parent_path().empty()) fs::create_directories(prefix.parent_path());
    auto write = [&](const std::string& suffix, auto&& what) {
      std::ofstream f(prefix.string() + suffix);
      if (!f) throw FormatError("cannot write " + prefix.string() + suffix);
      write_csv(what, f);
    };
    write(".phi.csv", phi);
    for (std::size_t l = 0; l < psi.size(); ++l) write(".psi" + std::to_string(l + 1) + ".csv", psi[l]);
    write(".gram.csv", gram);
  }
  if (o.as_json) {
    json d = {{"bank", bank.name()},
              {"level", o.iters},
              {"differences", phi.differences},
              {"warnings", phi.warnings},
              {"riesz_lower", lo},
              {"riesz_upper", hi}};
    std::cout << d.dump(2) << "\n";
  } else {
    std::cout << "bank " << bank.name() << ", grid level " << o.iters << "\n";
    std::cout << "integer-node iterations " << phi.differences.size() << ", last difference "
              << num(phi.differences.empty() ? 0.0 : phi.differences.back()) << "\n";
    for (const auto& w : phi.warnings) std::cout << "warning: " << w << "\n";
    std::cout << "riesz bounds " << num(lo) << " " << num(hi) << "\n";
  }
  return kPass;
}

// ---------------------------------------------------------------- redundancy

struct RedundancyOpts {
  std::string bank, period;
  int levels = 1;
};

int run_redundancy(const RedundancyOpts& o) {
  const FilterBank bank = resolve_bank(o.bank);
  if (o.levels < 1) throw UsageError("--levels must be at least 1");
  const Rational rate = redundancy_rate(bank, o.levels);
  std::cout << rate.str();
  if (!o.period.empty()) {
    const RedundancyCount c = redundancy_count(bank, o.levels, diagonal_lattice(parse_period(o.period, bank.dim())));
    std::cout << " (counted: " << c.stored << "/" << c.input << ")";
  }
  std::cout << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Filter banks with mixed dilation matrices"};
  app.require_subcommand(1);
  int code = kPass;

  VerifyOpts vo;
  auto* verify = app.add_subcommand("verify", "Check perfect reconstruction and related properties of a bank");
  verify->add_option("bank", vo.bank, "Bank file or builtin name")->required();
  verify->add_flag("--fourier", vo.fourier, "Also run the frequency-domain check");
  verify->add_option("--grid", vo.grid, "Frequency grid size for --fourier (0 compares coefficients)");
  verify->add_option("--tol", vo.tol, "Tolerance for floating-point comparisons");
  verify->add_flag("--bi", vo.bi, "Check biorthogonality");
  verify->add_flag("--critical", vo.critical, "Check critical sampling");
  verify->add_flag("--json", vo.as_json, "Machine-readable output");
  verify->callback([&] { code = run_verify(vo); });

  TransformOpts to;
  auto* transform = app.add_subcommand("transform", "Multilevel analysis and synthesis of array files");
  transform->require_subcommand(1);
  auto* an = transform->add_subcommand("analyze", "Write the bands of a J-level analysis");
  an->add_option("--bank", to.bank)->required();
  an->add_option("--input", to.input, "Input array (MDF1, or CSV for d = 1)")->required();
  an->add_option("--output", to.output, "Prefix for band files; the manifest is <prefix>.json")->required();
  an->add_option("--levels", to.levels)->required();
  an->add_option("--periodic", to.periodic, "Treat the input as periodic with period N[,N2,...]");
  an->add_flag("--csv", to.csv, "Read the input as CSV");
  an->callback([&] { code = run_analyze(to); });
  auto* syn = transform->add_subcommand("synthesize", "Rebuild an array from a band manifest");
  syn->add_option("--bank", to.bank)->required();
  syn->add_option("--input", to.input, "Band manifest")->required();
  syn->add_option("--output", to.output, "Output array")->required();
  syn->add_flag("--csv", to.csv, "Write the output as CSV");
  syn->callback([&] { code = run_synthesize(to); });

  DasOpts dop;
  auto* das = app.add_subcommand("das", "Print a composed filter or a discrete affine system element");
  das->add_option("--bank", dop.bank)->required();
  das->add_option("--channel", dop.channel, "Channel l (0 is the lowpass)")->required();
  das->add_option("--level", dop.level, "Level j")->required();
  das->add_option("--shift", dop.shift, "Shift k, one integer per dimension");
  das->add_flag("--dual", dop.dual, "Use the dual filters");
  das->add_option("--output", dop.output, "CSV file (default standard output)");
  das->callback([&] { code = run_das(dop); });

  StabilityOpts so;
  auto* stab = app.add_subcommand("stability", "Estimate frame bounds for levels 1..J");
  stab->add_option("--bank", so.bank)->required();
  stab->add_option("--levels", so.levels)->required();
  stab->add_option("--period", so.period, "N or N1,N2,...")->required();
  stab->add_option("--max-iter", so.max_iter);
  stab->add_option("--tol", so.tol);
  stab->add_flag("--json", so.as_json);
  stab->callback([&] { code = run_stability(so); });

  RefineOpts ro;
  auto* ref = app.add_subcommand("refine", "Sample the refinable function and its generators");
  ref->add_option("--bank", ro.bank)->required();
  ref->add_option("--iters", ro.iters, "Refinement level n (grid spacing M^-n)");
  ref->add_option("--gram", ro.gram, "Largest Gram lag");
  ref->add_option("--bounds", ro.bounds, "Frequency grid size for the Riesz bounds");
  ref->add_option("--output", ro.output, "Prefix for CSV output");
  ref->add_flag("--dual", ro.dual);
  ref->add_flag("--json", ro.as_json);
  ref->callback([&] { code = run_refine(ro); });

  RedundancyOpts rd;
  auto* red = app.add_subcommand("redundancy", "Coefficient count per input sample");
  red->add_option("--bank", rd.bank)->required();
  red->add_option("--levels", rd.levels)->required();
  red->add_option("--period", rd.period, "Also count on data with this period");
  red->callback([&] { code = run_redundancy(rd); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PeriodNotDivisible& e) {
    std::cerr << "error: PeriodNotDivisible: " << e.what() << "\n";
    return kUsage;
  } catch (const EnvelopeExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEnvelope;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFormat;
  } catch (const InvariantViolation& e) {
    std::cerr << "error: invalid bank: " << e.what() << "\n";
    return kFormat;
  } catch (const MaskDiagnosticFailed& e) {
    std::cerr << "mask check failed: " << e.what() << "\n";
    return kFail;
  } catch (const Diverged& e) {
    std::cerr << "cascade diverged: " << e.what() << "\n";
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return code;
}
