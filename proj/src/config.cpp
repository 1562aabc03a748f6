#include "nlsb/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "nlsb/radial.hpp"

namespace nlsb {

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  const auto grid_eq = grid.points_per_eps == o.grid.points_per_eps && grid.align == o.grid.align &&
                       grid.margin_decay_lengths == o.grid.margin_decay_lengths;
  const auto solver_eq = solver.tol_residual == o.solver.tol_residual && solver.max_newton == o.solver.max_newton &&
                         solver.krylov_tol == o.solver.krylov_tol && solver.krylov_max == o.solver.krylov_max &&
                         solver.damping == o.solver.damping && solver.backtrack == o.solver.backtrack &&
                         solver.min_step == o.solver.min_step;
  return problem == o.problem && grid_eq && eps_schedule == o.eps_schedule && solver_eq && analysis == o.analysis &&
         uniqueness == o.uniqueness && seed == o.seed && output_dir == o.output_dir;
}

ConfigError::ConfigError(int line, std::string field, const std::string& what)
    : Error(ErrorKind::Config,
            (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                (field.empty() ? std::string() : field + ": ") + what),
      line_(line),
      field_(std::move(field)) {}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  int line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  void real(const std::string& key, double& out) {
    if (const Entry* e = take(key)) out = parse_real(key, e->value, e->line);
  }
  void integer(const std::string& key, int& out) {
    if (const Entry* e = take(key)) {
      long long v = parse_int(key, e->value, e->line);
      if (v < -2147483647LL || v > 2147483647LL) throw ConfigError(e->line, key, "integer out of range");
      out = static_cast<int>(v);
    }
  }
  void unsigned64(const std::string& key, std::uint64_t& out) {
    if (const Entry* e = take(key)) {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
      if (ec != std::errc() || ptr != e->value.data() + e->value.size()) {
        throw ConfigError(e->line, key, "expected a non-negative integer, got '" + e->value + "'");
      }
      out = v;
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const Entry* e = take(key)) {
      if (e->value == "true" || e->value == "1") {
        out = true;
      } else if (e->value == "false" || e->value == "0") {
        out = false;
      } else {
        throw ConfigError(e->line, key, "expected true or false, got '" + e->value + "'");
      }
    }
  }
  void text(const std::string& key, std::string& out) {
    if (const Entry* e = take(key)) out = e->value;
  }
  void reals(const std::string& key, std::vector<double>& out) {
    if (const Entry* e = take(key)) {
      out.clear();
      for (const auto& tok : split_ws(e->value)) out.push_back(parse_real(key, tok, e->line));
    }
  }
  void point(const std::string& key, int dim, Point& out) {
    if (const Entry* e = take(key)) {
      const auto toks = split_ws(e->value);
      if (static_cast<int>(toks.size()) != dim) {
        throw ConfigError(e->line, key, "expected " + std::to_string(dim) + " coordinates");
      }
      out = Point{};
      for (int a = 0; a < dim; ++a) out[a] = parse_real(key, toks[a], e->line);
    }
  }

  void reject_leftovers() const {
    for (const auto& [key, e] : entries_) {
      if (!used_.count(key)) throw ConfigError(e.line, key, "unknown key");
    }
  }

 private:
  const Entry* take(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.insert({key, true});
    return &it->second;
  }

  static double parse_real(const std::string& key, const std::string& s, int line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ConfigError(line, key, "expected a finite number, got '" + s + "'");
    }
    return v;
  }
  static long long parse_int(const std::string& key, const std::string& s, int line) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError(line, key, "expected an integer, got '" + s + "'");
    }
    return v;
  }

  std::map<std::string, Entry> entries_;
  std::map<std::string, bool> used_;
};

void validate_with_lines(const ExperimentConfig& cfg, const std::map<std::string, int>& lines) {
  auto err = [&](const std::string& field, const std::string& what) -> ConfigError {
    const auto it = lines.find(field);
    return ConfigError(it == lines.end() ? 0 : it->second, field, what);
  };
  const ProblemConfig& pr = cfg.problem;
  if (pr.dim < 1 || pr.dim > 3) throw err("problem.dim", "must be 1, 2 or 3");
  if (!(pr.p > 2.0)) throw err("problem.p", "must exceed 2");
  if (pr.dim >= 3 && !(pr.p < critical_exponent(pr.dim))) throw err("problem.p", "must be below 2N/(N-2)");
  if (pr.wells.empty()) {
    if (!(pr.background > 0.0)) throw err("problem.background", "a constant potential needs a positive background");
  } else {
    if (!(pr.m > 1.0)) throw err("problem.m", "must exceed 1");
    if (!(pr.patch_radius > 0.0)) throw err("problem.patch_radius", "must be positive");
    if (pr.background < 0.0) throw err("problem.background", "must be non-negative (0 selects the default)");
    try {
      (void)make_potential(pr);
    } catch (const Error& e) {
      const auto it = lines.find("problem.well.0.center");
      throw ConfigError(it == lines.end() ? 0 : it->second, "problem.well", e.what());
    }
  }

  if (!(cfg.grid.points_per_eps > 0.0)) throw err("grid.points_per_eps", "must be positive");
  if (!(cfg.grid.align > 0.0)) throw err("grid.align", "must be positive");
  if (!(cfg.grid.margin_decay_lengths > 0.0)) throw err("grid.margin", "must be positive");

  if (cfg.eps_schedule.empty()) throw err("eps.schedule", "must list at least one eps");
  for (std::size_t i = 0; i < cfg.eps_schedule.size(); ++i) {
    if (!(cfg.eps_schedule[i] > 0.0)) throw err("eps.schedule", "entries must be positive");
    if (i > 0 && !(cfg.eps_schedule[i] < cfg.eps_schedule[i - 1])) {
      throw err("eps.schedule", "entries must be strictly decreasing");
    }
  }

  const NewtonConfig& s = cfg.solver;
  if (!(s.tol_residual > 0.0)) throw err("solver.tol_residual", "must be positive");
  if (s.max_newton < 0) throw err("solver.max_newton", "must be non-negative");
  if (!(s.krylov_tol > 0.0) || !(s.krylov_tol < 1.0)) throw err("solver.krylov_tol", "must lie in (0, 1)");
  if (s.krylov_max < 1) throw err("solver.krylov_max", "must be at least 1");
  if (!(s.damping > 0.0) || s.damping > 1.0) throw err("solver.damping", "must lie in (0, 1]");
  if (!(s.backtrack > 0.0) || !(s.backtrack < 1.0)) throw err("solver.backtrack", "must lie in (0, 1)");
  if (!(s.min_step > 0.0) || s.min_step > s.damping) throw err("solver.min_step", "must lie in (0, damping]");

  const AnalysisConfig& a = cfg.analysis;
  if (a.ball_radius < 0.0) throw err("analysis.ball_radius", "must be non-negative (0 selects the default)");
  if (a.sphere_points < 0) throw err("analysis.sphere_points", "must be non-negative");
  if (!(a.fit_eps_min >= 0.0) || !(a.fit_eps_max > a.fit_eps_min)) throw err("analysis.fit_window", "empty window");
  if (!(a.decompose_tol > 0.0)) throw err("analysis.decompose_tol", "must be positive");
  if (!(a.overlap_q1 > 0.0) || !(a.overlap_q2 > 0.0)) throw err("analysis.overlap_powers", "must be positive");
  if (!(a.negative_threshold >= 0.0)) throw err("analysis.negative_threshold", "must be non-negative");

  const UniquenessConfig& u = cfg.uniqueness;
  for (const auto& [key, v] : {std::pair{"uniqueness.amplitudes", u.amplitude_lo}, {"uniqueness.amplitudes", u.amplitude_hi}}) {
    if (!(v >= 0.8 && v <= 1.2)) throw err(key, "amplitude scalings must lie in [0.8, 1.2]");
  }
  if (!(u.shift >= 0.0 && u.shift <= 0.5)) throw err("uniqueness.shift", "must lie in [0, 0.5] (units of eps)");

  if (cfg.output_dir.empty()) throw err("output_dir", "must not be empty");
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) { validate_with_lines(cfg, {}); }

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "", "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "", "missing key");
    if (entries.count(key)) throw ConfigError(lineno, key, "duplicate key");
    entries[key] = {value, lineno};
  }

  std::map<std::string, int> lines;
  for (const auto& [k, e] : entries) lines[k] = e.line;

  Reader r(entries);
  ExperimentConfig cfg;
  ProblemConfig& pr = cfg.problem;
  r.integer("problem.dim", pr.dim);
  if (pr.dim < 1 || pr.dim > 3) throw ConfigError(r.line_of("problem.dim"), "problem.dim", "must be 1, 2 or 3");
  r.real("problem.p", pr.p);
  r.real("problem.m", pr.m);
  r.real("problem.patch_radius", pr.patch_radius);
  r.real("problem.background", pr.background);
  for (int j = 0;; ++j) {
    const std::string base = "problem.well." + std::to_string(j) + ".";
    if (!r.has(base + "center") && !r.has(base + "depth") && !r.has(base + "coeff")) break;
    if (!r.has(base + "center")) throw ConfigError(0, base + "center", "missing for a declared well");
    WellConfig w;
    r.point(base + "center", pr.dim, w.center);
    r.real(base + "depth", w.depth);
    r.real(base + "coeff", w.coeff);
    pr.wells.push_back(w);
  }

  r.real("grid.points_per_eps", cfg.grid.points_per_eps);
  r.real("grid.align", cfg.grid.align);
  r.real("grid.margin", cfg.grid.margin_decay_lengths);
  r.reals("eps.schedule", cfg.eps_schedule);

  r.real("solver.tol_residual", cfg.solver.tol_residual);
  r.integer("solver.max_newton", cfg.solver.max_newton);
  r.real("solver.krylov_tol", cfg.solver.krylov_tol);
  r.integer("solver.krylov_max", cfg.solver.krylov_max);
  r.real("solver.damping", cfg.solver.damping);
  r.real("solver.backtrack", cfg.solver.backtrack);
  r.real("solver.min_step", cfg.solver.min_step);

  AnalysisConfig& a = cfg.analysis;
  r.real("analysis.ball_radius", a.ball_radius);
  r.integer("analysis.sphere_points", a.sphere_points);
  if (r.has("analysis.fit_window")) {
    std::vector<double> win;
    r.reals("analysis.fit_window", win);
    if (win.size() != 2) throw ConfigError(lines["analysis.fit_window"], "analysis.fit_window", "expected two values");
    a.fit_eps_min = win[0];
    a.fit_eps_max = win[1];
  }
  r.real("analysis.decompose_tol", a.decompose_tol);
  if (r.has("analysis.overlap_powers")) {
    std::vector<double> q;
    r.reals("analysis.overlap_powers", q);
    if (q.size() != 2) throw ConfigError(lines["analysis.overlap_powers"], "analysis.overlap_powers", "expected two values");
    a.overlap_q1 = q[0];
    a.overlap_q2 = q[1];
  }
  r.boolean("analysis.coercivity", a.coercivity);
  r.real("analysis.negative_threshold", a.negative_threshold);

  if (r.has("uniqueness.amplitudes")) {
    std::vector<double> amp;
    r.reals("uniqueness.amplitudes", amp);
    if (amp.size() != 2) throw ConfigError(lines["uniqueness.amplitudes"], "uniqueness.amplitudes", "expected two values");
    cfg.uniqueness.amplitude_lo = amp[0];
    cfg.uniqueness.amplitude_hi = amp[1];
  }
  r.real("uniqueness.shift", cfg.uniqueness.shift);
  r.boolean("uniqueness.dump_xi", cfg.uniqueness.dump_xi);

  r.unsigned64("seed", cfg.seed);
  r.text("output_dir", cfg.output_dir);
  r.reject_leftovers();

  validate_with_lines(cfg, lines);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  auto kv = [&](const std::string& k, const std::string& v) { out << k << " = " << v << '\n'; };
  auto list = [&](const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + format_double(xs[i]);
    return s;
  };
  const ProblemConfig& pr = cfg.problem;
  kv("problem.dim", std::to_string(pr.dim));
  kv("problem.p", format_double(pr.p));
  kv("problem.m", format_double(pr.m));
  kv("problem.patch_radius", format_double(pr.patch_radius));
  kv("problem.background", format_double(pr.background));
  for (std::size_t j = 0; j < pr.wells.size(); ++j) {
    const std::string base = "problem.well." + std::to_string(j) + ".";
    kv(base + "center", list(std::vector<double>(pr.wells[j].center.begin(), pr.wells[j].center.begin() + pr.dim)));
    kv(base + "depth", format_double(pr.wells[j].depth));
    kv(base + "coeff", format_double(pr.wells[j].coeff));
  }
  kv("grid.points_per_eps", format_double(cfg.grid.points_per_eps));
  kv("grid.align", format_double(cfg.grid.align));
  kv("grid.margin", format_double(cfg.grid.margin_decay_lengths));
  kv("eps.schedule", list(cfg.eps_schedule));
  kv("solver.tol_residual", format_double(cfg.solver.tol_residual));
  kv("solver.max_newton", std::to_string(cfg.solver.max_newton));
  kv("solver.krylov_tol", format_double(cfg.solver.krylov_tol));
  kv("solver.krylov_max", std::to_string(cfg.solver.krylov_max));
  kv("solver.damping", format_double(cfg.solver.damping));
  kv("solver.backtrack", format_double(cfg.solver.backtrack));
  kv("solver.min_step", format_double(cfg.solver.min_step));
  const AnalysisConfig& a = cfg.analysis;
  kv("analysis.ball_radius", format_double(a.ball_radius));
  kv("analysis.sphere_points", std::to_string(a.sphere_points));
  kv("analysis.fit_window", list({a.fit_eps_min, a.fit_eps_max}));
  kv("analysis.decompose_tol", format_double(a.decompose_tol));
  kv("analysis.overlap_powers", list({a.overlap_q1, a.overlap_q2}));
  kv("analysis.coercivity", a.coercivity ? "true" : "false");
  kv("analysis.negative_threshold", format_double(a.negative_threshold));
  kv("uniqueness.amplitudes", list({cfg.uniqueness.amplitude_lo, cfg.uniqueness.amplitude_hi}));
  kv("uniqueness.shift", format_double(cfg.uniqueness.shift));
  kv("uniqueness.dump_xi", cfg.uniqueness.dump_xi ? "true" : "false");
  kv("seed", std::to_string(cfg.seed));
  kv("output_dir", cfg.output_dir);
  return out.str();
}

PotentialModel make_potential(const ProblemConfig& pr) {
  if (pr.wells.empty()) return PotentialModel::constant(pr.dim, pr.background);
  std::vector<WellSpec> wells;
  for (const auto& w : pr.wells) wells.push_back({w.center, w.depth, w.coeff});
  return make_multiwell(pr.dim, wells, pr.m, pr.patch_radius, pr.background);
}

ProblemTemplate make_template(const ExperimentConfig& cfg) {
  return ProblemTemplate{make_potential(cfg.problem), cfg.problem.p, cfg.grid};
}

AnsatzSpec make_ansatz(const ExperimentConfig& cfg) {
  const PotentialModel pot = make_potential(cfg.problem);
  if (!pot.is_constant()) return well_ansatz(pot, cfg.problem.p);
  AnsatzSpec a;
  a.bumps.push_back(
      {std::make_shared<const RadialProfile>(solve_ground_state(pot.background(), cfg.problem.p, pot.dim())), Point{},
       1.0});
  return a;
}

}  // namespace nlsb
