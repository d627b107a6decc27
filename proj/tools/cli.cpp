#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mirt/config.hpp"
#include "mirt/error.hpp"
#include "mirt/fields.hpp"
#include "mirt/geometry.hpp"
#include "mirt/io.hpp"
#include "mirt/parallel.hpp"
#include "mirt/phantom.hpp"
#include "mirt/reconstruct.hpp"
#include "mirt/rng.hpp"
#include "mirt/symbol.hpp"
#include "mirt/transform.hpp"

namespace mirt::cli {
namespace {

namespace fs = std::filesystem;

// Numerical gates for the check subcommands.
constexpr double kSigma5Gate = 1e-6;
constexpr double kSigma6Gate = 1e-10;
constexpr double kParametrixGate = 1e-8;
constexpr double kDeterminantGate = 1e-12;

/// Raised when a numerical check fails; maps to exit code 3.
class GateFailure : public Error {
 public:
  using Error::Error;
};

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> noise;
  std::optional<std::string> output_dir;
  std::string input;
};

class Session {
 public:
  Session(const Overrides& o, std::ostream& out) : out_(out), input_(o.input) {
    if (!o.config_path.empty()) cfg_ = load_config(o.config_path);
    if (o.seed) cfg_.run.seed = *o.seed;
    if (o.threads) cfg_.run.threads = *o.threads;
    if (o.noise) cfg_.run.noise = *o.noise;
    if (o.output_dir) cfg_.run.output_dir = *o.output_dir;
    cfg_.validate();
    set_thread_count(cfg_.run.threads);
    curve_.emplace(cfg_.curve);
    curve_->validate();
  }

  const Config& config() const { return cfg_; }
  const Curve& curve() const { return *curve_; }
  const std::string& input() const { return input_; }
  std::ostream& out() { return out_; }

  Grid3 grid() const {
    auto g = cfg_.grid.make();
    g.validate();
    return g;
  }

  fs::path output(const std::string& name) const {
    fs::create_directories(cfg_.run.output_dir);
    return cfg_.run.output_dir / name;
  }

  bool input_is_sinogram() const {
    if (input_.empty()) return false;
    std::ifstream is(input_, std::ios::binary);
    if (!is) throw ValidationError("cannot open " + input_);
    char magic[4] = {};
    is.read(magic, 4);
    return std::string(magic, 4) == "MSN1";
  }

  /// The --input tensor field, or the configured phantom.
  Tensor2Field field() const {
    if (!input_.empty()) return load_field<9>(input_);
    return make_phantom(cfg_.phantom, grid());
  }

  LineSet lines(const Grid3& g) const { return LineSet(*curve_, g, cfg_.lines); }

  Sinogram forward_with_noise(const Tensor2Field& f, const LineSet& ls) const {
    auto s = mirt_forward(f, ls);
    if (cfg_.run.noise > 0.0) {
      const double rms = s.norm() / std::sqrt(2.0 * static_cast<double>(s.size()));
      const double sd = cfg_.run.noise * rms;
      CounterRng rng(cfg_.run.seed, stream_id(Stream::kNoise, 0));
      for (std::size_t i = 0; i < s.size(); ++i) {
        s.chan_a[i] += sd * rng.normal();
        s.chan_b[i] += sd * rng.normal();
      }
    }
    return s;
  }

 private:
  std::ostream& out_;
  Config cfg_;
  std::string input_;
  std::optional<Curve> curve_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
  if (!os) throw FormatError("cannot write " + path.string());
}

int cmd_phantom(Session& s) {
  const auto f = make_phantom(s.config().phantom, s.grid());
  const auto path = s.output("phantom.mrt");
  save_field(path, f);
  s.out() << "kind = " << to_string(s.config().phantom.kind) << "\n"
          << "voxels = " << f.voxel_count() << "\n"
          << "norm = " << f.norm() << "\n"
          << "output = " << path.string() << "\n";
  return kExitOk;
}

int cmd_kt_check(Session& s) {
  const auto& c = s.config();
  KTCheckOptions opt;
  opt.ball_radius = c.run.kt_ball_radius;
  opt.n_samples = c.run.kt_samples;
  opt.seed = c.run.seed;
  opt.pole_band = c.lines.pole_band;
  opt.tolerances = c.tolerances.geometry();
  const auto rep = kt_check(s.curve(), opt);
  s.out() << format_kt_table(rep);
  const auto path = s.output("kt_report.txt");
  write_text(path, format_kt_keyvalue(rep));
  s.out() << "output = " << path.string() << "\n";
  return kExitOk;
}

int cmd_forward(Session& s) {
  const auto f = s.field();
  const auto ls = s.lines(f.grid());
  const auto sino = s.forward_with_noise(f, ls);
  const auto path = s.output("sinogram.msn");
  save_sinogram(path, sino);
  s.out() << "lines = " << ls.size() << "\n"
          << "noise = " << s.config().run.noise << "\n"
          << "sinogram_norm = " << sino.norm() << "\n"
          << "output = " << path.string() << "\n";
  return kExitOk;
}

int cmd_adjoint_test(Session& s) {
  const auto ls = s.lines(s.grid());
  const auto r = adjoint_test(ls, s.config().run.adjoint_pairs, s.config().run.seed);
  const double gate = s.config().tolerances.adjoint;
  s.out() << std::setprecision(6) << "pairs = " << r.pairs << "\n"
          << "adjoint_defect = " << r.max_defect << "\n"
          << "gate = " << gate << "\n"
          << "runtime_seconds = " << r.seconds << "\n";
  if (!(r.max_defect <= gate))
    throw GateFailure("adjoint defect " + std::to_string(r.max_defect) + " exceeds the gate");
  return kExitOk;
}

int cmd_normal(Session& s) {
  const auto f = s.field();
  const auto nf = normal_op(f, s.lines(f.grid()));
  const auto path = s.output("nf.mrt");
  save_field(path, nf);
  s.out() << "nf_norm = " << nf.norm() << "\n"
          << "output = " << path.string() << "\n";
  return kExitOk;
}

int cmd_decompose(Session& s) {
  const auto f = s.field();
  const auto d = decompose(f);
  const auto back = d.solenoidal + dprime(d.potential) + lambda_embed(d.trace);
  const double fs_norm = d.solenoidal.norm();
  save_field(s.output("f_s.mrt"), d.solenoidal);
  save_field(s.output("u.mrv"), d.potential);
  save_field(s.output("w.mrs"), d.trace);
  s.out() << std::setprecision(6) << "reassembly_error = " << (back - f).norm() / f.norm() << "\n"
          << "divergence_residual = "
          << (fs_norm > 0 ? delta_prime(d.solenoidal).norm() / fs_norm : 0.0) << "\n"
          << "trace_residual = " << (fs_norm > 0 ? mu_trace(d.solenoidal).norm() / fs_norm : 0.0)
          << "\n"
          << "output_dir = " << s.config().run.output_dir.string() << "\n";
  return kExitOk;
}

int cmd_symbol(Session& s) {
  const auto& c = s.config();
  SymbolSamplingOptions opt;
  opt.points = c.run.symbol_samples;
  opt.seed = c.run.seed;
  opt.ball_radius = c.run.kt_ball_radius;
  opt.tolerances = c.tolerances.symbol();
  const auto res = sample_symbols(s.curve(), opt);

  std::ostringstream table;
  table << "# x1 x2 x3 xi1 xi2 xi3 rank s1 s2 s3 s4 s5 s6 s7 s8 s9 parametrix_defect\n";
  table << std::setprecision(9);
  double min5 = 1.0, max6 = 0.0, max_def = 0.0, max_kron = 0.0;
  int bad_rank = 0;
  for (const auto& p : res.samples) {
    const auto& sv = p.singular_values;
    table << p.x.x() << ' ' << p.x.y() << ' ' << p.x.z() << ' ' << p.xi.x() << ' ' << p.xi.y()
          << ' ' << p.xi.z() << ' ' << p.rank;
    for (int i = 0; i < 9; ++i) table << ' ' << sv[i];
    table << ' ' << p.parametrix_defect << '\n';
    min5 = std::min(min5, sv[4] / sv[0]);
    max6 = std::max(max6, sv[5] / sv[0]);
    max_def = std::max(max_def, p.parametrix_defect);
    max_kron = std::max(max_kron, p.kronecker_defect);
    bad_rank += p.rank != 5;
  }
  const auto path = s.output("symbol.txt");
  write_text(path, table.str());
  s.out() << std::setprecision(6) << "samples = " << res.samples.size() << "\n"
          << "draws = " << res.draws << "\n"
          << "skipped = " << res.skipped << "\n"
          << "rank_exceptions = " << bad_rank << "\n"
          << "min_sigma5_ratio = " << min5 << "\n"
          << "max_sigma6_ratio = " << max6 << "\n"
          << "max_parametrix_defect = " << max_def << "\n"
          << "max_kronecker_defect = " << max_kron << "\n"
          << "output = " << path.string() << "\n";
  if (bad_rank > 0 || min5 < kSigma5Gate || max6 > kSigma6Gate || max_def > kParametrixGate)
    throw GateFailure("symbol checks failed");
  return kExitOk;
}

int cmd_ellipticity(Session& s) {
  const auto sw = ellipticity_sweep(s.config().run.ellipticity_tuples, s.config().run.seed);
  s.out() << std::setprecision(6) << "tuples = " << sw.tuples << "\n"
          << "trivial_nullspace = " << sw.trivial << "\n"
          << "worst_min_singular = " << sw.worst_min_singular << "\n"
          << "max_det_a_error = " << sw.max_det_a_error << "\n"
          << "max_det_b_error = " << sw.max_det_b_error << "\n";
  if (sw.trivial != sw.tuples || sw.max_det_a_error > kDeterminantGate ||
      sw.max_det_b_error > kDeterminantGate)
    throw GateFailure("ellipticity checks failed");
  return kExitOk;
}

int cmd_reconstruct(Session& s) {
  const auto start = std::chrono::steady_clock::now();
  const auto& c = s.config();
  Tensor2Field nf, f_s;
  if (s.input_is_sinogram()) {
    // Sinograms carry no grid or phantom, so both come from the config.
    const auto ls = s.lines(s.grid());
    const auto sino = load_sinogram(s.input());
    sino.check_compatible(ls);
    nf = mirt_adjoint(sino, ls);
    f_s = solenoidal_projection(make_phantom(c.phantom, ls.grid()));
  } else {
    const auto f = s.field();
    const auto ls = s.lines(f.grid());
    nf = mirt_adjoint(s.forward_with_noise(f, ls), ls);
    f_s = solenoidal_projection(f);
  }
  auto spec = c.tolerances.cutoff(c.lines.pole_band);
  const auto f_rec = apply_parametrix(nf, s.curve(), spec);
  auto rep = error_report(f_rec, f_s, default_mask(f_s));
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_field(s.output("nf.mrt"), nf);
  save_field(s.output("f_rec.mrt"), f_rec);
  save_field(s.output("f_s.mrt"), f_s);
  const auto path = s.output("recon_report.txt");
  write_text(path, format_recon_report(rep, false));
  s.out() << format_recon_report(rep) << "output_dir = " << c.run.output_dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Restricted mixed ray transform toolkit", "mirt"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("-c,--config", o.config_path, "Experiment config file (INI)");
  app.add_option("--seed", o.seed, "Override run.seed");
  app.add_option("--threads", o.threads, "OpenMP thread count (0 keeps the default)");
  app.add_option("--noise", o.noise, "Relative Gaussian noise on forward data");
  app.add_option("-o,--output-dir", o.output_dir, "Override run.output_dir");
  app.add_option("-i,--input", o.input, "Input MRT1 field (or MSN1 sinogram for reconstruct)");

  using Handler = int (*)(Session&);
  const std::vector<std::pair<std::string, std::pair<std::string, Handler>>> commands = {
      {"phantom", {"Write the configured phantom", cmd_phantom}},
      {"kt-check", {"Sampled Kirillov-Tuy statistics of the curve", cmd_kt_check}},
      {"forward", {"Forward transform of a field", cmd_forward}},
      {"adjoint-test", {"Inner-product test of the discrete adjoint", cmd_adjoint_test}},
      {"normal", {"Normal operator of a field", cmd_normal}},
      {"decompose", {"Solenoidal / potential / trace decomposition", cmd_decompose}},
      {"symbol", {"Principal symbol checks at sampled covectors", cmd_symbol}},
      {"ellipticity", {"Ellipticity systems for random angle tuples", cmd_ellipticity}},
      {"reconstruct", {"Parametrix reconstruction of the solenoidal part", cmd_reconstruct}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mirt: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    Session session(o, out);
    for (const auto& [name, entry] : commands)
      if (app.got_subcommand(name)) return entry.second(session);
  } catch (const GateFailure& e) {
    err << "mirt: gate failure: " << e.what() << "\n";
    return kExitGate;
  } catch (const Error& e) {
    err << "mirt: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "mirt: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace mirt::cli
