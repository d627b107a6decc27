#include "mirt/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mirt/error.hpp"

namespace mirt {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"curve", {"kind", "radius", "pitch", "height", "harmonic", "turns"}},
      {"grid", {"n", "half_width"}},
      {"lines", {"n_t", "n_alpha", "n_beta", "pole_band", "step_fraction"}},
      {"tolerances",
       {"tau_tan", "tau_indep", "root_residual", "tau_sigma", "tau_rank", "taper", "adjoint"}},
      {"phantom", {"kind", "width", "center", "amplitude"}},
      {"run",
       {"seed", "output_dir", "threads", "noise", "kt_samples", "kt_ball_radius",
        "symbol_samples", "ellipticity_tuples", "adjoint_pairs"}},
  };
  return keys;
}

template <typename T>
void read_value(const pt::ptree& section, const std::string& name, const std::string& key, T& out) {
  const auto child = section.get_child_optional(key);
  if (!child) return;
  const std::string text = child->get_value<std::string>();
  std::istringstream is(text);
  T v{};
  is >> v;
  if (is.fail() || !(is >> std::ws).eof())
    throw ValidationError("config: bad value '" + text + "' for " + name + "." + key);
  out = v;
}

std::vector<double> read_numbers(const pt::ptree& section, const std::string& name,
                                 const std::string& key, std::size_t count) {
  const auto child = section.get_child_optional(key);
  if (!child) return {};
  std::istringstream is(child->get_value<std::string>());
  std::vector<double> v;
  double x;
  while (is >> x) v.push_back(x);
  if (!is.eof() || v.size() != count)
    throw ValidationError("config: " + name + "." + key + " needs " + std::to_string(count) +
                          " numbers");
  return v;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError(std::string("config: ") + name + " must be positive");
}

}  // namespace

GeometryTolerances ToleranceConfig::geometry() const {
  GeometryTolerances g;
  g.tau_tan = tau_tan;
  g.tau_indep = tau_indep;
  g.root_residual = root_residual;
  return g;
}

SymbolTolerances ToleranceConfig::symbol() const {
  SymbolTolerances s;
  s.tau_sigma = tau_sigma;
  s.tau_rank = tau_rank;
  s.geometry = geometry();
  return s;
}

CutoffSpec ToleranceConfig::cutoff(double pole_band) const {
  CutoffSpec c;
  c.tau_sigma = tau_sigma;
  c.taper = taper;
  c.pole_band = pole_band;
  c.tau_rank = tau_rank;
  c.geometry = geometry();
  return c;
}

void Config::validate() const {
  require_positive(curve.radius, "curve.radius");
  require_positive(curve.turns, "curve.turns");
  if (curve.harmonic < 1) throw ValidationError("config: curve.harmonic must be >= 1");
  if (grid.n < 4) throw ValidationError("config: grid.n must be >= 4");
  require_positive(grid.half_width, "grid.half_width");
  if (lines.n_t < 1 || lines.n_alpha < 1 || lines.n_beta < 1)
    throw ValidationError("config: line counts must be positive");
  require_positive(lines.pole_band, "lines.pole_band");
  require_positive(lines.step_fraction, "lines.step_fraction");
  const auto& t = tolerances;
  require_positive(t.tau_tan, "tolerances.tau_tan");
  require_positive(t.tau_indep, "tolerances.tau_indep");
  require_positive(t.root_residual, "tolerances.root_residual");
  require_positive(t.tau_sigma, "tolerances.tau_sigma");
  require_positive(t.tau_rank, "tolerances.tau_rank");
  require_positive(t.taper, "tolerances.taper");
  require_positive(t.adjoint, "tolerances.adjoint");
  require_positive(phantom.width, "phantom.width");
  if (run.noise < 0.0) throw ValidationError("config: run.noise must be >= 0");
  if (run.threads < 0) throw ValidationError("config: run.threads must be >= 0");
  if (run.kt_samples < 1 || run.symbol_samples < 1 || run.ellipticity_tuples < 1 ||
      run.adjoint_pairs < 1)
    throw ValidationError("config: sample counts must be positive");
  require_positive(run.kt_ball_radius, "run.kt_ball_radius");
}

Config parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  const auto& keys = known_keys();
  for (const auto& [name, section] : tree) {
    const auto it = keys.find(name);
    if (it == keys.end()) throw ValidationError("config: unknown section or key '" + name + "'");
    for (const auto& [key, value] : section) {
      (void)value;
      if (!it->second.count(key))
        throw ValidationError("config: unknown key '" + name + "." + key + "'");
    }
  }

  Config c;
  const pt::ptree empty;
  auto sec = [&](const char* name) -> const pt::ptree& {
    const auto child = tree.get_child_optional(name);
    return child ? *child : empty;
  };

  const auto& curve = sec("curve");
  std::string kind;
  read_value(curve, "curve", "kind", kind);
  if (!kind.empty()) c.curve.kind = parse_curve_kind(kind);
  read_value(curve, "curve", "radius", c.curve.radius);
  read_value(curve, "curve", "pitch", c.curve.pitch);
  read_value(curve, "curve", "height", c.curve.height);
  read_value(curve, "curve", "harmonic", c.curve.harmonic);
  read_value(curve, "curve", "turns", c.curve.turns);

  const auto& grid = sec("grid");
  read_value(grid, "grid", "n", c.grid.n);
  read_value(grid, "grid", "half_width", c.grid.half_width);

  const auto& lines = sec("lines");
  read_value(lines, "lines", "n_t", c.lines.n_t);
  read_value(lines, "lines", "n_alpha", c.lines.n_alpha);
  read_value(lines, "lines", "n_beta", c.lines.n_beta);
  read_value(lines, "lines", "pole_band", c.lines.pole_band);
  read_value(lines, "lines", "step_fraction", c.lines.step_fraction);

  const auto& tol = sec("tolerances");
  read_value(tol, "tolerances", "tau_tan", c.tolerances.tau_tan);
  read_value(tol, "tolerances", "tau_indep", c.tolerances.tau_indep);
  read_value(tol, "tolerances", "root_residual", c.tolerances.root_residual);
  read_value(tol, "tolerances", "tau_sigma", c.tolerances.tau_sigma);
  read_value(tol, "tolerances", "tau_rank", c.tolerances.tau_rank);
  read_value(tol, "tolerances", "taper", c.tolerances.taper);
  read_value(tol, "tolerances", "adjoint", c.tolerances.adjoint);

  const auto& ph = sec("phantom");
  std::string pkind;
  read_value(ph, "phantom", "kind", pkind);
  if (!pkind.empty()) c.phantom.kind = parse_phantom_kind(pkind);
  read_value(ph, "phantom", "width", c.phantom.width);
  if (auto v = read_numbers(ph, "phantom", "center", 3); !v.empty())
    c.phantom.center = Vec3(v[0], v[1], v[2]);
  if (auto v = read_numbers(ph, "phantom", "amplitude", 9); !v.empty())
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c.phantom.amplitude(i, j) = v[flat_index(i, j)];

  const auto& run = sec("run");
  read_value(run, "run", "seed", c.run.seed);
  std::string out;
  read_value(run, "run", "output_dir", out);
  if (!out.empty()) c.run.output_dir = out;
  read_value(run, "run", "threads", c.run.threads);
  read_value(run, "run", "noise", c.run.noise);
  read_value(run, "run", "kt_samples", c.run.kt_samples);
  read_value(run, "run", "kt_ball_radius", c.run.kt_ball_radius);
  read_value(run, "run", "symbol_samples", c.run.symbol_samples);
  read_value(run, "run", "ellipticity_tuples", c.run.ellipticity_tuples);
  read_value(run, "run", "adjoint_pairs", c.run.adjoint_pairs);

  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const Config& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "[curve]\nkind = " << to_string(c.curve.kind) << "\nradius = " << c.curve.radius
     << "\npitch = " << c.curve.pitch << "\nheight = " << c.curve.height
     << "\nharmonic = " << c.curve.harmonic << "\nturns = " << c.curve.turns << "\n\n";
  os << "[grid]\nn = " << c.grid.n << "\nhalf_width = " << c.grid.half_width << "\n\n";
  os << "[lines]\nn_t = " << c.lines.n_t << "\nn_alpha = " << c.lines.n_alpha
     << "\nn_beta = " << c.lines.n_beta << "\npole_band = " << c.lines.pole_band
     << "\nstep_fraction = " << c.lines.step_fraction << "\n\n";
  const auto& t = c.tolerances;
  os << "[tolerances]\ntau_tan = " << t.tau_tan << "\ntau_indep = " << t.tau_indep
     << "\nroot_residual = " << t.root_residual << "\ntau_sigma = " << t.tau_sigma
     << "\ntau_rank = " << t.tau_rank << "\ntaper = " << t.taper << "\nadjoint = " << t.adjoint
     << "\n\n";
  os << "[phantom]\nkind = " << to_string(c.phantom.kind) << "\nwidth = " << c.phantom.width
     << "\ncenter = " << c.phantom.center.x() << " " << c.phantom.center.y() << " "
     << c.phantom.center.z() << "\namplitude =";
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) os << " " << c.phantom.amplitude(i, j);
  os << "\n\n";
  os << "[run]\nseed = " << c.run.seed << "\noutput_dir = " << c.run.output_dir.string()
     << "\nthreads = " << c.run.threads << "\nnoise = " << c.run.noise
     << "\nkt_samples = " << c.run.kt_samples << "\nkt_ball_radius = " << c.run.kt_ball_radius
     << "\nsymbol_samples = " << c.run.symbol_samples
     << "\nellipticity_tuples = " << c.run.ellipticity_tuples
     << "\nadjoint_pairs = " << c.run.adjoint_pairs << "\n";
  return os.str();
}

}  // namespace mirt
