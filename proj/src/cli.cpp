#include "qgp/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qgp/conditions.hpp"
#include "qgp/error.hpp"
#include "qgp/geometry.hpp"
#include "qgp/oracles.hpp"
#include "qgp/propagator.hpp"
#include "qgp/spectral.hpp"

namespace qgp::cli {

namespace {

constexpr std::size_t kMinGrid = 64;
constexpr std::size_t kMaxSweepParams = 3;
constexpr std::size_t kMaxSweepPoints = 10000;

const std::vector<std::string> kSections{"model", "run", "conditions", "output", "sweep"};

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ConfigError, where + ": " + what);
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string at(const std::string& source, int line) { return source + ":" + std::to_string(line); }

std::string where(const std::string& source, const Entry& e, const std::string& section) {
  return at(source, e.line) + ": [" + section + "] " + e.key;
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

double to_number(const std::string& text, const std::string& where_) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    config_error(where_, "expected a finite number, got '" + t + "'");
  }
  return v;
}

std::size_t to_count(const std::string& text, const std::string& where_) {
  const double v = to_number(text, where_);
  if (v < 0.0 || v != std::floor(v) || v > 1e9) config_error(where_, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& text, const std::string& where_) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  config_error(where_, "expected true or false, got '" + t + "'");
}

// Looks up `key` among overrides first, then in the section.
struct ParamReader {
  const Section& section;
  const std::string& source;
  const std::vector<Entry>& overrides;

  const Entry* entry(const std::string& key) const {
    for (const auto& e : overrides)
      if (e.key == key) return &e;
    return section.find(key);
  }
  double number(const std::string& key) const {
    const Entry* e = entry(key);
    if (!e) config_error(at(source, section.line) + ": [" + section.name + "]", "missing required field '" + key + "'");
    return to_number(e->value, where(source, *e, section.name));
  }
  double number(const std::string& key, double fallback) const {
    const Entry* e = entry(key);
    return e ? to_number(e->value, where(source, *e, section.name)) : fallback;
  }
  SmoothFunction smooth(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    const Entry* e = entry(key);
    if (!e) {
      if (fallback) return SmoothFunction::constant(*fallback);
      config_error(at(source, section.line) + ": [" + section.name + "]", "missing required field '" + key + "'");
    }
    return parse_smooth(e->value, where(source, *e, section.name));
  }
};

std::pair<std::size_t, std::size_t> parse_pair(const std::string& text, std::size_t dim, const std::string& w) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) config_error(w, "expected 'i,j' in '" + text + "'");
  const std::size_t i = to_count(text.substr(0, comma), w);
  const std::size_t j = to_count(text.substr(comma + 1), w);
  if (i >= dim || j >= dim || i == j) config_error(w, "level pair out of range or equal in '" + text + "'");
  return {i, j};
}

Matrix parse_operator(const std::string& text, std::size_t dim, const std::string& w) {
  const auto need2 = [&] {
    if (dim != 2) config_error(w, "operator '" + text + "' needs dim = 2");
  };
  if (text == "sx") { need2(); return pauli::x(); }
  if (text == "sy") { need2(); return pauli::y(); }
  if (text == "sz") { need2(); return pauli::z(); }
  if (text == "id") return Matrix::identity(dim);
  const auto colon = text.find(':');
  if (colon == std::string::npos) config_error(w, "unknown operator '" + text + "'");
  const std::string kind = text.substr(0, colon), rest = text.substr(colon + 1);
  Matrix op(dim);
  if (kind == "diag") {
    std::vector<double> values;
    std::string item;
    std::istringstream in(rest);
    while (std::getline(in, item, ',')) values.push_back(to_number(item, w));
    if (values.size() != dim) config_error(w, "diag operator needs " + std::to_string(dim) + " entries");
    return Matrix::diagonal(values);
  }
  const auto [i, j] = parse_pair(rest, dim, w);
  if (kind == "x") {
    op(i, j) = 1.0;
    op(j, i) = 1.0;
  } else if (kind == "y") {
    op(i, j) = Complex(0.0, -1.0);
    op(j, i) = Complex(0.0, 1.0);
  } else {
    config_error(w, "unknown operator kind '" + kind + "'");
  }
  return op;
}

std::filesystem::path prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::ConfigError, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  return out;
}

int fail(std::ostream& log, const Error& e) {
  log << "error: " << e.what() << '\n';
  return e.kind() == ErrorKind::ConfigError ? kExitConfig : kExitNumerical;
}

struct RunSetup {
  HamiltonianModel model;
  TimeGrid grid;
  SpectralFrame frame;
};

RunSetup setup(const Scenario& s, const std::vector<Entry>& overrides = {}) {
  RunSetup r;
  r.model = build_model(s.model, s.source, overrides);
  if (s.level >= r.model.dim) {
    config_error(s.source + ": [run] level", "level " + std::to_string(s.level) + " exceeds model dimension " +
                                                 std::to_string(r.model.dim));
  }
  r.grid = TimeGrid::uniform(s.start, s.end, s.grid);
  r.frame = build_frame(r.model, r.grid);
  return r;
}

std::optional<RotatingSpinParams> rotating_params(const Scenario& s, const std::vector<Entry>& overrides = {}) {
  if (s.model_name != "rotating_spin") return std::nullopt;
  const ParamReader p{s.model, s.source, overrides};
  RotatingSpinParams r{p.number("eta"), p.number("xi"), p.number("K", 1.0)};
  if (p.entry("normalize") && to_bool(p.entry("normalize")->value, s.source + ": [model] normalize")) {
    r = RotatingSpinParams::normalized(r.eta, r.xi, r.K);
  }
  return r;
}

std::optional<RobustModelParams> robust_params(const Scenario& s) {
  if (s.model_name != "robust") return std::nullopt;
  const ParamReader p{s.model, s.source, {}};
  const RobustModelParams d = RobustModelParams::figure1();
  return RobustModelParams{p.number("eta", d.eta), p.number("eta0", d.eta0), p.number("eta1", d.eta1),
                           p.number("eta2", d.eta2)};
}

struct SweepAxis {
  std::string key;
  std::vector<double> values;
};

std::vector<SweepAxis> sweep_axes(const Section& sweep, const std::string& source) {
  std::vector<SweepAxis> axes;
  for (const auto& e : sweep.entries) {
    const std::string w = where(source, e, "sweep");
    for (const auto& a : axes)
      if (a.key == e.key) config_error(w, "parameter swept twice");
    SweepAxis axis{e.key, {}};
    const auto words = split_words(e.value);
    if (!words.empty() && words[0] == "linspace") {
      if (words.size() != 4) config_error(w, "expected 'linspace lo hi count'");
      const double lo = to_number(words[1], w), hi = to_number(words[2], w);
      const std::size_t n = to_count(words[3], w);
      if (n == 1) axis.values.push_back(lo);
      for (std::size_t i = 0; n > 1 && i < n; ++i) {
        axis.values.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
      }
    } else {
      std::string item;
      std::istringstream in(e.value);
      while (std::getline(in, item, ',')) {
        if (!trim(item).empty()) axis.values.push_back(to_number(item, w));
      }
    }
    if (axis.values.empty()) config_error(w, "empty range");
    axes.push_back(std::move(axis));
  }
  if (axes.empty()) config_error(at(source, sweep.line) + ": [sweep]", "no swept parameters");
  if (axes.size() > kMaxSweepParams) {
    config_error(at(source, sweep.line) + ": [sweep]", "at most " + std::to_string(kMaxSweepParams) +
                                                          " swept parameters");
  }
  std::size_t total = 1;
  for (const auto& a : axes) {
    total *= a.values.size();
    if (total > kMaxSweepPoints) {
      config_error(at(source, sweep.line) + ": [sweep]", "more than " + std::to_string(kMaxSweepPoints) +
                                                            " sweep points");
    }
  }
  return axes;
}

// Orthographic view of the Bloch sphere for the SVG.
struct Projection {
  double azimuth = 0.6, elevation = 0.35, scale = 200.0, cx = 260.0, cy = 260.0;

  std::pair<double, double> operator()(double x, double y, double z) const {
    const double ca = std::cos(azimuth), sa = std::sin(azimuth);
    const double ce = std::cos(elevation), se = std::sin(elevation);
    const double u = ca * x - sa * y;
    const double depth = sa * x + ca * y;
    const double v = ce * z - se * depth;
    return {cx + scale * u, cy - scale * v};
  }
};

std::string polyline(const Projection& proj, const std::vector<std::array<double, 3>>& pts, const char* colour,
                     double width) {
  std::string s = "<polyline fill=\"none\" stroke=\"";
  s += colour;
  char buf[64];
  std::snprintf(buf, sizeof buf, "\" stroke-width=\"%.2f\" points=\"", width);
  s += buf;
  for (const auto& p : pts) {
    const auto [u, v] = proj(p[0], p[1], p[2]);
    std::snprintf(buf, sizeof buf, "%.3f,%.3f ", u, v);
    s += buf;
  }
  s += "\"/>\n";
  return s;
}

}  // namespace

const Entry* Section::find(const std::string& key) const {
  const Entry* found = nullptr;
  for (const auto& e : entries)
    if (e.key == key) found = &e;
  return found;
}

std::vector<const Entry*> Section::all(const std::string& key) const {
  std::vector<const Entry*> out;
  for (const auto& e : entries)
    if (e.key == key) out.push_back(&e);
  return out;
}

const Section* ConfigFile::find(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

ConfigFile parse_config(std::istream& in, const std::string& source) {
  ConfigFile file;
  file.source = source;
  std::string raw;
  int line = 0;
  Section* current = nullptr;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') config_error(at(source, line), "unterminated section header");
      const std::string name = trim(text.substr(1, text.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), name) == kSections.end()) {
        config_error(at(source, line), "unknown section [" + name + "]");
      }
      if (file.find(name)) config_error(at(source, line), "duplicate section [" + name + "]");
      file.sections.push_back(Section{name, line, {}});
      current = &file.sections.back();
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) config_error(at(source, line), "expected 'key = value'");
    if (!current) config_error(at(source, line), "entry outside any section");
    Entry e{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
    if (e.key.empty()) config_error(at(source, line), "empty key");
    current->entries.push_back(std::move(e));
  }
  return file;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + path.string());
  return parse_config(in, path.string());
}

Scenario load_scenario(const ConfigFile& file, const Overrides& overrides) {
  Scenario s;
  s.source = file.source;
  const Section* model = file.find("model");
  if (!model) config_error(file.source, "missing [model] section");
  s.model = *model;
  const Entry* name = model->find("name");
  if (!name) config_error(at(file.source, model->line) + ": [model]", "missing required field 'name'");
  s.model_name = name->value;

  if (const Section* run = file.find("run")) {
    for (const auto& e : run->entries) {
      const std::string w = where(file.source, e, "run");
      if (e.key == "start") s.start = to_number(e.value, w);
      else if (e.key == "end") s.end = to_number(e.value, w);
      else if (e.key == "grid") s.grid = to_count(e.value, w);
      else if (e.key == "level") s.level = to_count(e.value, w);
      else if (e.key == "tol") s.tol = to_number(e.value, w);
      else config_error(w, "unknown field");
    }
  }
  if (const Section* c = file.find("conditions")) {
    for (const auto& e : c->entries) {
      const std::string w = where(file.source, e, "conditions");
      if (e.key == "delta") s.delta = to_number(e.value, w);
      else if (e.key == "traditional_threshold") s.traditional_threshold = to_number(e.value, w);
      else if (e.key == "simulate") s.simulate_conditions = to_bool(e.value, w);
      else config_error(w, "unknown field");
    }
  }
  if (const Section* o = file.find("output")) {
    for (const auto& e : o->entries) {
      const std::string w = where(file.source, e, "output");
      if (e.key == "dir") s.out_dir = e.value;
      else if (e.key == "trajectory") s.write_trajectory = to_bool(e.value, w);
      else if (e.key == "fidelity") s.write_fidelity = to_bool(e.value, w);
      else config_error(w, "unknown field");
    }
  }
  if (const Section* sw = file.find("sweep")) s.sweep = *sw;

  if (overrides.out) s.out_dir = *overrides.out;
  if (overrides.grid) s.grid = *overrides.grid;
  if (overrides.tol) s.tol = *overrides.tol;
  if (overrides.delta) s.delta = *overrides.delta;

  if (s.grid < kMinGrid) config_error(file.source + ": [run] grid", "grid size must be at least 64");
  if (!(s.end > s.start)) config_error(file.source + ": [run] end", "end must exceed start");
  if (!(s.delta > 0.0 && s.delta < 1.0)) config_error(file.source + ": [conditions] delta", "delta must lie in (0, 1)");
  if (!(s.tol > 0.0)) config_error(file.source + ": [run] tol", "tol must be positive");
  // Validates the model parameters early so config errors surface before any numerics.
  build_model(s.model, s.source);
  return s;
}

SmoothFunction parse_smooth(const std::string& text, const std::string& w) {
  const auto words = split_words(text);
  if (words.empty()) config_error(w, "empty function descriptor");
  if (words[0] == "poly") {
    if (words.size() < 2) config_error(w, "poly needs at least one coefficient");
    std::vector<double> c;
    for (std::size_t i = 1; i < words.size(); ++i) c.push_back(to_number(words[i], w));
    return SmoothFunction::polynomial(std::move(c));
  }
  if (words[0] == "sin") {
    if (words.size() != 4 && words.size() != 5) config_error(w, "expected 'sin amplitude omega phase [offset]'");
    return SmoothFunction::sinusoid(to_number(words[1], w), to_number(words[2], w), to_number(words[3], w),
                                    words.size() == 5 ? to_number(words[4], w) : 0.0);
  }
  if (words.size() == 1) return SmoothFunction::constant(to_number(words[0], w));
  config_error(w, "unknown function type '" + words[0] + "' (use poly or sin)");
}

HamiltonianModel build_model(const Section& model, const std::string& source, const std::vector<Entry>& overrides) {
  const ParamReader p{model, source, overrides};
  const Entry* name = model.find("name");
  if (!name) config_error(at(source, model.line) + ": [model]", "missing required field 'name'");
  const std::string& n = name->value;
  try {
    if (n == "rotating_spin") {
      RotatingSpinParams r{p.number("eta"), p.number("xi"), p.number("K", 1.0)};
      if (const Entry* e = p.entry("normalize"); e && to_bool(e->value, where(source, *e, "model"))) {
        r = RotatingSpinParams::normalized(r.eta, r.xi, r.K);
      }
      return rotating_spin(r);
    }
    if (n == "robust") {
      const RobustModelParams d = RobustModelParams::figure1();
      return robust_model({p.number("eta", d.eta), p.number("eta0", d.eta0), p.number("eta1", d.eta1),
                           p.number("eta2", d.eta2)});
    }
    if (n == "bloch_curve") {
      BlochCurveModel c;
      c.theta = p.smooth("theta");
      c.phi = p.smooth("phi");
      c.A = p.smooth("A", 0.0);
      c.B = p.smooth("B", 1.0);
      return bloch_curve(c);
    }
    if (n == "fourier") {
      const Entry* d = p.entry("dim");
      if (!d) config_error(at(source, model.line) + ": [model]", "missing required field 'dim'");
      const std::size_t dim = to_count(d->value, where(source, *d, "model"));
      if (dim < 1) config_error(where(source, *d, "model"), "dim must be positive");
      std::vector<FourierTerm> terms;
      for (const Entry* e : model.all("term")) {
        const std::string w = where(source, *e, "model");
        const auto words = split_words(e->value);
        if (words.size() < 2 || words.size() > 4) config_error(w, "expected 'term = op omega [amplitude] [phase]'");
        FourierTerm t;
        t.op = parse_operator(words[0], dim, w);
        t.omega = to_number(words[1], w);
        t.amplitude = words.size() > 2 ? to_number(words[2], w) : 1.0;
        t.phase = words.size() > 3 ? to_number(words[3], w) : 0.0;
        terms.push_back(std::move(t));
      }
      return fourier_nlevel(dim, terms);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    config_error(at(source, model.line) + ": [model]", std::string(e.what()));
  }
  config_error(where(source, *name, "model"), "unknown model '" + n + "' (rotating_spin, robust, bloch_curve, fourier)");
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_simulate(const Scenario& s, std::ostream& log) {
  try {
    const RunSetup r = setup(s);
    StepperOptions opts;
    opts.tol = s.tol;
    const EvolutionResult evo = evolve_schrodinger(r.model, r.frame.state(0, s.level), r.grid, opts);
    const AdiabaticTrajectory orbit = adiabatic_trajectory(r.frame, s.level);
    const FidelitySeries f = fidelity(evo, orbit);
    const auto rot = rotating_params(s);
    const auto rob = robust_params(s);

    const auto dir = prepare_dir(s.out_dir);
    if (s.write_trajectory) {
      auto out = open_out(dir / "trajectory.csv");
      out << "tau";
      for (std::size_t i = 0; i < r.model.dim; ++i) out << ",re_" << i << ",im_" << i;
      out << ",norm\n";
      for (std::size_t k = 0; k < r.grid.size(); ++k) {
        out << format_double(r.grid.samples[k]);
        for (const Complex& a : evo.states[k]) out << ',' << format_double(a.real()) << ',' << format_double(a.imag());
        out << ',' << format_double(evo.norms[k]) << '\n';
      }
    }
    double worst = 0.0;
    if (s.write_fidelity) {
      auto out = open_out(dir / "fidelity.csv");
      out << "tau,F_simulated,F_closed_form\n";
      for (std::size_t k = 0; k < r.grid.size(); ++k) {
        const double tau = r.grid.samples[k];
        double closed = std::numeric_limits<double>::quiet_NaN();
        if (rot) closed = closed_form_F(*rot, tau);
        if (rob) closed = std::sqrt(closed_form_P(*rob, s.level == 1 ? Orbit::Plus : Orbit::Minus, tau));
        if (!std::isnan(closed)) worst = std::max(worst, std::abs(closed - f.values[k]));
        out << format_double(tau) << ',' << format_double(f.values[k]) << ',' << format_double(closed) << '\n';
      }
    }
    log << "model: " << r.model.label << '\n';
    log << "samples: " << r.grid.size() << "  steps: " << evo.stats.steps << "  rejected: " << evo.stats.rejected
        << '\n';
    log << "max norm drift: " << format_double(evo.stats.max_norm_drift) << '\n';
    log << "min fidelity: " << format_double(f.min()) << '\n';
    if (rot || rob) log << "max |F_simulated - F_closed_form|: " << format_double(worst) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    return fail(log, e);
  }
}

int cmd_conditions(const Scenario& s, std::ostream& log) {
  try {
    const RunSetup r = setup(s);
    ConditionOptions opts;
    opts.delta = s.delta;
    opts.traditional_threshold = s.traditional_threshold;
    ConditionReport report = condition_report(r.frame, s.level, opts, r.model.label);
    if (s.simulate_conditions) {
      StepperOptions so;
      so.tol = s.tol;
      const EvolutionResult evo = evolve_schrodinger(r.model, r.frame.state(0, s.level), r.grid, so);
      const auto p = occupation(evo, r.frame, s.level);
      report.observed_min_probability = *std::min_element(p.begin(), p.end());
    }
    const auto dir = prepare_dir(s.out_dir);
    {
      auto out = open_out(dir / "conditions.csv");
      write_conditions_csv(out, report);
    }
    const std::string summary = condition_summary(report);
    {
      auto out = open_out(dir / "summary.txt");
      out << summary;
    }
    log << summary;
    return kExitOk;
  } catch (const Error& e) {
    return fail(log, e);
  }
}

int cmd_figure1(const std::filesystem::path& out_dir, std::size_t grid_size, double tol, std::ostream& log) {
  try {
    if (grid_size < kMinGrid) throw Error(ErrorKind::ConfigError, "figure1: grid size must be at least 64");
    const RobustModelParams params = RobustModelParams::figure1();
    const HamiltonianModel model = robust_model(params);
    const TimeGrid grid = TimeGrid::uniform(0.0, 2.0 * std::numbers::pi, grid_size);
    const SpectralFrame frame = build_frame(model, grid);
    StepperOptions opts;
    opts.tol = tol;
    const EvolutionResult evo = evolve_schrodinger(model, frame.state(0, kUpperLevel), grid, opts);
    const auto prob = occupation(evo, frame, kUpperLevel);

    const auto dir = prepare_dir(out_dir);
    std::vector<std::array<double, 3>> evo_pts, adi_pts;
    std::vector<double> adi_z;
    double worst_norm = 0.0;
    {
      auto out = open_out(dir / "bloch.csv");
      out << "tau,evo_x,evo_y,evo_z,adi_x,adi_y,adi_z\n";
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto e = bloch_vector(evo.states[k]);
        const auto a = bloch_vector(frame.state(k, kUpperLevel));
        worst_norm = std::max(worst_norm, std::abs(std::hypot(e[0], e[1], e[2]) - 1.0));
        evo_pts.push_back({e[0], e[1], e[2]});
        adi_pts.push_back({a[0], a[1], a[2]});
        adi_z.push_back(a[2]);
        out << format_double(grid.samples[k]) << ',' << format_double(e[0]) << ',' << format_double(e[1]) << ','
            << format_double(e[2]) << ',' << format_double(a[0]) << ',' << format_double(a[1]) << ','
            << format_double(a[2]) << '\n';
      }
    }
    double min_p = 1.0, worst_dev = 0.0;
    {
      auto out = open_out(dir / "P.csv");
      out << "tau,P_simulated,P_closed_form\n";
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double closed = closed_form_P(params, Orbit::Plus, grid.samples[k]);
        min_p = std::min(min_p, prob[k]);
        worst_dev = std::max(worst_dev, std::abs(prob[k] - closed));
        out << format_double(grid.samples[k]) << ',' << format_double(prob[k]) << ',' << format_double(closed) << '\n';
      }
    }
    {
      const Projection proj;
      auto out = open_out(dir / "figure1.svg");
      out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"560\" viewBox=\"0 0 520 560\">\n";
      out << "<rect width=\"520\" height=\"560\" fill=\"white\"/>\n";
      out << "<circle cx=\"260\" cy=\"260\" r=\"200\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
      std::vector<std::array<double, 3>> equator;
      for (int i = 0; i <= 180; ++i) {
        const double a = 2.0 * std::numbers::pi * i / 180.0;
        equator.push_back({std::cos(a), std::sin(a), 0.0});
      }
      out << polyline(proj, equator, "#dddddd", 1.0);
      out << polyline(proj, {{{-1, 0, 0}}, {{1, 0, 0}}}, "#dddddd", 1.0);
      out << polyline(proj, {{{0, -1, 0}}, {{0, 1, 0}}}, "#dddddd", 1.0);
      out << polyline(proj, {{{0, 0, -1}}, {{0, 0, 1}}}, "#dddddd", 1.0);
      out << polyline(proj, adi_pts, "blue", 0.6);
      out << polyline(proj, evo_pts, "red", 1.6);
      out << "<text x=\"20\" y=\"520\" font-family=\"sans-serif\" font-size=\"14\" fill=\"red\">evolution orbit</text>\n";
      out << "<text x=\"20\" y=\"540\" font-family=\"sans-serif\" font-size=\"14\" fill=\"blue\">adiabatic orbit</text>\n";
      out << "</svg>\n";
    }
    const double floor = p_min(params);
    const double freq = dominant_angular_frequency(grid, adi_z);
    log << "robust model eta=1 eta0=20 eta1=1 eta2=100, tau in [0, 2pi], " << grid.size() << " samples\n";
    log << "min P_+: " << format_double(min_p) << "  P_min: " << format_double(floor) << '\n';
    log << "max |P_simulated - P_closed_form|: " << format_double(worst_dev) << '\n';
    log << "max Bloch-vector norm defect: " << format_double(worst_norm) << '\n';
    log << "adiabatic z dominant angular frequency: " << format_double(freq) << " (2 eta2 = "
        << format_double(2.0 * params.eta2) << ")\n";
    if (min_p < floor - 1e-6) {
      log << "error: min P_+ below P_min\n";
      return kExitNumerical;
    }
    return kExitOk;
  } catch (const Error& e) {
    return fail(log, e);
  }
}

int cmd_sweep(const Scenario& s, std::ostream& log) {
  try {
    if (!s.sweep) config_error(s.source, "missing [sweep] section");
    const auto axes = sweep_axes(*s.sweep, s.source);
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.values.size();

    const auto dir = prepare_dir(s.out_dir);
    auto out = open_out(dir / "sweep.csv");
    for (const auto& a : axes) out << a.key << ',';
    out << "traditional_ratio,traditional,new_ratio,new,min_fidelity\n";
    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t point = 0; point < total; ++point) {
      // First axis varies slowest.
      std::size_t rem = point;
      for (std::size_t a = axes.size(); a-- > 0;) {
        idx[a] = rem % axes[a].values.size();
        rem /= axes[a].values.size();
      }
      std::vector<Entry> overrides;
      for (std::size_t a = 0; a < axes.size(); ++a) {
        overrides.push_back(Entry{axes[a].key, format_double(axes[a].values[idx[a]]), s.sweep->line});
      }
      const RunSetup r = setup(s, overrides);
      ConditionOptions opts;
      opts.delta = s.delta;
      opts.traditional_threshold = s.traditional_threshold;
      const ConditionVerdict trad = traditional_condition(r.frame, s.level, opts.traditional_threshold);
      const ConditionVerdict fresh = new_condition(r.frame, s.level, opts.delta);
      StepperOptions so;
      so.tol = s.tol;
      const EvolutionResult evo = evolve_schrodinger(r.model, r.frame.state(0, s.level), r.grid, so);
      const FidelitySeries f = fidelity(evo, adiabatic_trajectory(r.frame, s.level));
      for (std::size_t a = 0; a < axes.size(); ++a) out << format_double(axes[a].values[idx[a]]) << ',';
      out << format_double(trad.max_ratio) << ',' << (trad.pass ? "PASS" : "FAIL") << ','
          << format_double(fresh.max_ratio) << ',' << (fresh.pass ? "PASS" : "FAIL") << ',' << format_double(f.min())
          << '\n';
    }
    log << "sweep: " << total << " points written to " << (dir / "sweep.csv").string() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    return fail(log, e);
  }
}

}  // namespace qgp::cli
