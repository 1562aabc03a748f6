#include "nlsb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

#include "nlsb/analysis.hpp"
#include "nlsb/coercivity.hpp"
#include "nlsb/csv.hpp"
#include "nlsb/decompose.hpp"
#include "nlsb/field_io.hpp"

namespace nlsb {

namespace {

constexpr double kFloor = 1e-12;

std::mutex g_log_mutex;

void log_line(const RunOptions& opts, const std::string& line) {
  if (!opts.verbose || !opts.log) return;
  std::lock_guard<std::mutex> lock(g_log_mutex);
  *opts.log << line << '\n';
  opts.log->flush();
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

int error_code_of(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return err->exit_code();
  return 1;
}

std::string well_label(int j) { return std::to_string(j + 1); }

/// Ball radius for the Pohozaev identity: configured, else half the minimum well
/// separation; one well uses 2δ and a constant potential 4 decay lengths.
double pohozaev_radius(const ExperimentConfig& cfg, const PotentialModel& pot, double eps) {
  if (cfg.analysis.ball_radius > 0.0) return cfg.analysis.ball_radius;
  const auto& wells = pot.wells();
  if (wells.size() >= 2) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < wells.size(); ++i) {
      for (std::size_t j = i + 1; j < wells.size(); ++j) sep = std::min(sep, norm(wells[i].center - wells[j].center));
    }
    return 0.5 * sep;
  }
  if (wells.size() == 1) return 2.0 * pot.patch_radius();
  return 4.0 * eps / std::sqrt(pot.background());
}

struct EpsAnalysis {
  double eps = 0.0;
  std::string error;  ///< load / decomposition failure
  int error_code = 0;
  std::optional<BumpDecomposition> dec;
  std::vector<std::vector<std::string>> decomposition_rows, pohozaev_rows, overlap_rows, coercivity_rows;
  std::vector<int> codes;  ///< exit codes of per-row failures
  std::optional<double> rho;
  std::vector<std::pair<std::pair<int, int>, double>> normalized_overlaps;
};

}  // namespace

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

void CommandStatus::note(int code, const std::string& what) {
  if (exit_code == 0 && code != 0) {
    exit_code = code;
    message = what;
  }
}

GroundStateSummary cmd_groundstate(double v_a, double p, int dim, double r_max, double tol,
                                   const std::string& output_dir) {
  ShootingConfig sc;
  sc.r_max = r_max;
  if (tol > 0.0) sc.bisect_tol = tol;
  const RadialProfile prof = solve_ground_state(v_a, p, dim, sc);
  GroundStateSummary s;
  s.center_value = prof.center_value();
  s.decay_rate = prof.decay_rate();
  s.ode_residual = ode_residual(prof);
  s.profile_file = (std::filesystem::path(output_dir) / ("profile_va" + format_shortest(v_a) + "_p" +
                                                         format_shortest(p) + "_dim" + std::to_string(dim) + ".nlsb"))
                       .string();
  write_profile(s.profile_file, prof);
  return s;
}

std::string field_path(const ExperimentConfig& cfg, double eps) {
  return out_path(cfg, "u_eps" + format_shortest(eps) + ".nlsb");
}

Point shift_direction(std::uint64_t seed, int dim) {
  std::mt19937_64 rng(seed);
  // Portable uniform doubles: the top 53 bits of the engine output.
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double two_pi = 2.0 * std::acos(-1.0);
  if (dim == 1) return Point{uniform() < 0.5 ? -1.0 : 1.0, 0.0, 0.0};
  if (dim == 2) {
    const double t = two_pi * uniform();
    return Point{std::cos(t), std::sin(t), 0.0};
  }
  const double z = 2.0 * uniform() - 1.0;
  const double t = two_pi * uniform();
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Point{s * std::cos(t), s * std::sin(t), z};
}

CommandStatus cmd_solve(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate_config(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  const ProblemTemplate tpl = make_template(cfg);
  const AnsatzSpec ansatz = make_ansatz(cfg);
  log_line(opts, "[solve] continuation over " + std::to_string(cfg.eps_schedule.size()) + " eps values");
  const auto steps = continuation_solve(tpl, cfg.eps_schedule, ansatz, cfg.solver);

  CommandStatus status;
  CsvTable table({"eps", "converged", "iterations", "final_residual", "positivity", "krylov_iterations", "nodes",
                  "field_file", "error"});
  for (std::size_t i = 0; i < cfg.eps_schedule.size(); ++i) {
    const double eps = cfg.eps_schedule[i];
    if (i >= steps.size()) {
      const std::string why = "not attempted: continuation stopped at eps=" + format_shortest(steps.back().eps);
      table.add({cell(eps), cell(false), cell(0), "", "", cell(0), "", "", cell(why)});
      continue;
    }
    const ContinuationStep& st = steps[i];
    std::string file;
    if (st.error.empty()) {
      file = field_path(cfg, eps);
      write_field(file, st.u, eps, cfg.problem.p);
    } else {
      status.note(static_cast<int>(ErrorKind::Convergence), st.error);
    }
    const std::size_t nodes = st.spec ? st.spec->grid().size() : 0;
    table.add({cell(eps), cell(st.report.converged), cell(st.report.iterations), cell(st.report.final_residual),
               cell(st.report.positivity), cell(st.report.krylov_iterations), cell(static_cast<int>(nodes)),
               cell(std::filesystem::path(file).filename().string()), cell(st.error)});
    log_line(opts, "[solve] eps=" + format_shortest(eps) + (st.error.empty() ? " converged" : " failed: " + st.error) +
                       " iterations=" + std::to_string(st.report.iterations) +
                       " residual=" + format_double(st.report.final_residual));
  }
  table.write(out_path(cfg, "solve.csv"));
  return status;
}

namespace {

EpsAnalysis analyze_one(const ExperimentConfig& cfg, const ProblemTemplate& tpl, const AnsatzSpec& ansatz,
                        double eps, const RunOptions& opts) {
  EpsAnalysis out;
  out.eps = eps;
  const int dim = cfg.problem.dim;
  const std::size_t k = ansatz.bumps.size();
  const std::string eps_s = cell(eps);
  std::optional<ProblemSpec> spec;
  ScalarField u;
  try {
    FieldFile f = read_field(field_path(cfg, eps));
    if (f.eps != eps || f.p != cfg.problem.p) fail(ErrorKind::Consistency, "field file eps/p differ from the config");
    spec.emplace(make_problem(tpl, eps));
    if (!(f.field.grid == spec->grid())) fail(ErrorKind::Consistency, "field file grid differs from the grid rule");
    u = std::move(f.field);
    DecomposeConfig dc;
    dc.rel_tol = cfg.analysis.decompose_tol;
    out.dec = decompose(*spec, u, ansatz, dc);
  } catch (const std::exception& e) {
    out.error = e.what();
    out.error_code = error_code_of(e);
  }

  // decomposition.csv
  for (std::size_t j = 0; j < k; ++j) {
    if (!out.dec) {
      out.decomposition_rows.push_back({eps_s, well_label(j), "", "", "", "", "", "", "", "", "", "", cell(out.error)});
      continue;
    }
    const BumpDecomposition& d = *out.dec;
    const Point c = d.centers[j];
    const double off = norm(c - d.reference[j]);
    double maxproj = 0.0;
    for (int s = 0; s <= dim; ++s) maxproj = std::max(maxproj, d.projection_residuals[j * (dim + 1) + s]);
    out.decomposition_rows.push_back({eps_s, well_label(j), cell(c[0]), cell(c[1]), cell(c[2]), cell(off),
                                      cell(off / eps), cell(d.amplitudes[j]), cell(d.w_norm), cell(d.v_norm),
                                      cell(maxproj), cell(d.iterations), ""});
  }
  if (out.error_code) out.codes.push_back(out.error_code);
  if (!out.dec) return out;
  const BumpDecomposition& d = *out.dec;

  // pohozaev.csv
  const double radius = pohozaev_radius(cfg, spec->potential(), eps);
  for (std::size_t j = 0; j < k; ++j) {
    for (int dir = 0; dir < dim; ++dir) {
      try {
        const PohozaevReport r = pohozaev_terms(*spec, u, d.centers[j], radius, dir, cfg.analysis.sphere_points);
        out.pohozaev_rows.push_back({eps_s, well_label(j), cell(dir + 1), cell(r.lhs_volume), cell(r.i1), cell(r.i2),
                                     cell(r.i3), cell(r.residual), cell(r.rel_residual), cell(r.lhs_abs),
                                     cell(radius), ""});
      } catch (const std::exception& e) {
        out.codes.push_back(error_code_of(e));
        out.pohozaev_rows.push_back(
            {eps_s, well_label(j), cell(dir + 1), "", "", "", "", "", "", "", cell(radius), cell(e.what())});
      }
    }
  }

  // overlap.csv
  const double q1 = cfg.analysis.overlap_q1, q2 = cfg.analysis.overlap_q2;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double ov = overlap_integral(*spec, *ansatz.bumps[i].profile, d.centers[i], *ansatz.bumps[j].profile,
                                         d.centers[j], q1, q2);
      const double normalized = ov * std::pow(eps, -dim);
      const double eps6 = std::pow(eps, 6.0);
      out.normalized_overlaps.push_back({{static_cast<int>(i), static_cast<int>(j)}, normalized});
      out.overlap_rows.push_back({eps_s, well_label(i), well_label(j), cell(q1), cell(q2),
                                  cell(norm(d.reference[i] - d.reference[j])), cell(ov), cell(normalized), cell(eps6),
                                  cell(normalized < eps6), ""});
    }
  }

  // coercivity.csv
  if (cfg.analysis.coercivity) {
    try {
      CoercivityConfig cc;
      cc.negative_threshold = cfg.analysis.negative_threshold;
      cc.seed = static_cast<unsigned>(cfg.seed);
      const CoercivityReport r = coercivity_estimate(*spec, d, ansatz, cc);
      double tq = 0.0;
      for (double q : r.translation_quotients) tq = std::max(tq, std::abs(q));
      out.rho = r.rho;
      out.coercivity_rows.push_back({eps_s, cell(r.rho), cell(r.unprojected_min), cell(r.negative_directions),
                                     cell(tq), cell(r.lanczos_steps), ""});
    } catch (const std::exception& e) {
      out.codes.push_back(error_code_of(e));
      out.coercivity_rows.push_back({eps_s, "", "", "", "", "", cell(e.what())});
    }
  }
  log_line(opts, "[analyze] eps=" + format_shortest(eps) + " done");
  return out;
}

}  // namespace

CommandStatus cmd_analyze(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate_config(cfg);
  const ProblemTemplate tpl = make_template(cfg);
  const AnsatzSpec ansatz = make_ansatz(cfg);
  const std::size_t n = cfg.eps_schedule.size();
  const int dim = cfg.problem.dim;
  std::vector<EpsAnalysis> results(n);
  parallel_for(n, opts.jobs, [&](std::size_t i) {
    try {
      results[i] = analyze_one(cfg, tpl, ansatz, cfg.eps_schedule[i], opts);
    } catch (const std::exception& e) {
      results[i].eps = cfg.eps_schedule[i];
      results[i].error = e.what();
      results[i].error_code = error_code_of(e);
      results[i].codes.push_back(results[i].error_code);
    }
  });

  CommandStatus status;
  CsvTable dec_t({"eps", "well", "center_x", "center_y", "center_z", "offset", "offset_ratio", "alpha", "w_norm",
                  "v_norm", "max_projection_residual", "iterations", "error"});
  CsvTable poh_t({"eps", "well", "direction", "lhs", "i1", "i2", "i3", "residual", "rel_residual", "lhs_abs",
                  "radius", "error"});
  CsvTable ovl_t({"eps", "well_i", "well_j", "q1", "q2", "separation", "overlap", "normalized", "eps_pow6",
                  "below_eps_pow6", "error"});
  CsvTable coe_t({"eps", "rho", "unprojected_min", "negative_directions", "max_translation_quotient",
                  "lanczos_steps", "error"});
  for (const auto& r : results) {
    for (int c : r.codes) status.note(c, r.error.empty() ? "analysis row failed" : r.error);
    for (const auto& row : r.decomposition_rows) dec_t.add(row);
    for (const auto& row : r.pohozaev_rows) poh_t.add(row);
    for (const auto& row : r.overlap_rows) ovl_t.add(row);
    for (const auto& row : r.coercivity_rows) coe_t.add(row);
  }

  // Rate fits over the configured eps window.
  CsvTable rates({"quantity", "well", "slope", "expected", "max_deviation", "samples", "pass", "error"});
  const PotentialModel pot = tpl.potential;
  const std::size_t k = ansatz.bumps.size();
  std::vector<const EpsAnalysis*> window;
  for (const auto& r : results) {
    if (r.dec && r.eps >= cfg.analysis.fit_eps_min && r.eps <= cfg.analysis.fit_eps_max) window.push_back(&r);
  }
  auto fit_row = [&](const std::string& quantity, const std::string& well,
                     const std::vector<std::pair<double, double>>& samples, double expected,
                     const std::function<bool(double)>& pass) {
    try {
      const RateFit f = fit_rate(samples);
      rates.add({quantity, well, cell(f.slope), cell(expected), cell(f.max_deviation),
                 cell(static_cast<int>(samples.size())), cell(pass(f.slope)), ""});
    } catch (const std::exception& e) {
      rates.add({quantity, well, "", cell(expected), "", cell(static_cast<int>(samples.size())), cell(false),
                 cell(e.what())});
    }
  };
  if (!pot.is_constant()) {
    const double m = pot.exponent();
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<std::pair<double, double>> alpha, offset;
      for (const auto* r : window) {
        const double a = std::abs(r->dec->amplitudes[j]);
        if (a > kFloor) alpha.push_back({r->eps, a});
        const double off = norm(r->dec->centers[j] - r->dec->reference[j]);
        if (off > kFloor) offset.push_back({r->eps, off});
      }
      fit_row("alpha", well_label(j), alpha, m, [&](double s) { return std::abs(s - m) <= 0.25; });
      fit_row("offset", well_label(j), offset, 1.0, [](double s) { return s > 1.0; });

      // Strict decrease of |x_j − a_j|/ε along the decreasing eps schedule;
      // values below the floor count as having decreased.
      bool decreasing = window.size() >= 2;
      double prev = std::numeric_limits<double>::infinity();
      for (const auto* r : window) {
        const double off = norm(r->dec->centers[j] - r->dec->reference[j]);
        const double ratio = off <= kFloor ? 0.0 : off / r->eps;
        if (!(ratio < prev) && !(off <= kFloor && prev == 0.0)) decreasing = false;
        prev = ratio;
      }
      rates.add({"offset_ratio_decreasing", well_label(j), "", "", "", cell(static_cast<int>(window.size())),
                 cell(decreasing), ""});
    }
    std::vector<std::pair<double, double>> wn;
    for (const auto* r : window) {
      if (r->dec->w_norm > kFloor) wn.push_back({r->eps, r->dec->w_norm});
    }
    const double expected_w = 0.5 * dim + m;
    fit_row("w_norm", "all", wn, expected_w, [&](double s) { return std::abs(s - expected_w) <= 0.3; });

    // log(normalized overlap) against 1/ε, expected slope −min(√V_i, √V_j)·L.
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        std::vector<std::pair<double, double>> pts;
        for (const auto* r : window) {
          for (const auto& [ij, v] : r->normalized_overlaps) {
            if (ij.first == static_cast<int>(i) && ij.second == static_cast<int>(j) && v > 0.0) {
              pts.push_back({1.0 / r->eps, std::log(v)});
            }
          }
        }
        const auto& wi = pot.wells()[i];
        const auto& wj = pot.wells()[j];
        const double expected = -std::min(std::sqrt(wi.depth), std::sqrt(wj.depth)) * norm(wi.center - wj.center);
        const std::string label = well_label(i) + "-" + well_label(j);
        if (pts.size() < 2) {
          rates.add({"overlap_log_vs_inv_eps", label, "", cell(expected), "", cell(static_cast<int>(pts.size())),
                     cell(false), "needs at least two samples"});
          continue;
        }
        double mx = 0, my = 0;
        for (const auto& [x, y] : pts) {
          mx += x;
          my += y;
        }
        mx /= pts.size();
        my /= pts.size();
        double sxx = 0, sxy = 0;
        for (const auto& [x, y] : pts) {
          sxx += (x - mx) * (x - mx);
          sxy += (x - mx) * (y - my);
        }
        const double slope = sxy / sxx;
        double dev = 0.0;
        for (const auto& [x, y] : pts) dev = std::max(dev, std::abs(y - my - slope * (x - mx)));
        const bool pass = slope < 0.0 && std::abs(slope - expected) <= 0.2 * std::abs(expected);
        rates.add({"overlap_log_vs_inv_eps", label, cell(slope), cell(expected), cell(dev),
                   cell(static_cast<int>(pts.size())), cell(pass), ""});
      }
    }
  }
  if (cfg.analysis.coercivity) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    int count = 0;
    for (const auto* r : window) {
      if (r->rho) {
        lo = std::min(lo, *r->rho);
        hi = std::max(hi, *r->rho);
        ++count;
      }
    }
    if (count > 0) {
      // slope column: relative spread (max − min)/max of the projected quotient.
      const double spread = hi > 0.0 ? (hi - lo) / hi : std::numeric_limits<double>::infinity();
      rates.add({"rho_spread", "all", cell(spread), cell(0.2), cell(lo), cell(count), cell(lo > 0.0 && spread < 0.2),
                 ""});
    }
  }

  dec_t.write(out_path(cfg, "decomposition.csv"));
  poh_t.write(out_path(cfg, "pohozaev.csv"));
  ovl_t.write(out_path(cfg, "overlap.csv"));
  coe_t.write(out_path(cfg, "coercivity.csv"));
  rates.write(out_path(cfg, "rates.csv"));
  return status;
}

CommandStatus cmd_uniqueness(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate_config(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  const ProblemTemplate tpl = make_template(cfg);
  const AnsatzSpec ansatz = make_ansatz(cfg);
  const Point dir = shift_direction(cfg.seed, cfg.problem.dim);
  const std::size_t n = cfg.eps_schedule.size();
  const char* pair_names[2] = {"amplitude", "shift"};
  std::vector<std::vector<std::string>> rows(2 * n);
  std::vector<int> codes(2 * n, 0);
  std::vector<std::string> messages(2 * n);

  parallel_for(2 * n, opts.jobs, [&](std::size_t item) {
    const double eps = cfg.eps_schedule[item / 2];
    const int which = static_cast<int>(item % 2);
    std::pair<AnsatzTweak, AnsatzTweak> tweaks;
    if (which == 0) {
      tweaks = {AnsatzTweak{cfg.uniqueness.amplitude_lo, Point{}}, AnsatzTweak{cfg.uniqueness.amplitude_hi, Point{}}};
    } else {
      const Point s = (cfg.uniqueness.shift * eps) * dir;
      tweaks = {AnsatzTweak{1.0, s}, AnsatzTweak{1.0, -1.0 * s}};
    }
    const std::string eps_s = cell(eps);
    try {
      const ProblemSpec spec = make_problem(tpl, eps);
      const UniquenessReport r = uniqueness_probe(spec, ansatz, tweaks, cfg.solver, false);
      std::string xi_file;
      if (!r.pass) {
        codes[item] = 1;
        messages[item] = "uniqueness check failed at eps=" + format_shortest(eps);
        if (cfg.uniqueness.dump_xi && r.xi_field) {
          xi_file = "xi_eps" + format_shortest(eps) + "_" + pair_names[which] + ".nlsb";
          write_field(out_path(cfg, xi_file), *r.xi_field, eps, cfg.problem.p);
        }
      }
      rows[item] = {eps_s, pair_names[which], cell(r.sup_diff), cell(r.sup_norm), cell(r.relative),
                    r.pass ? "pass" : "fail", cell(r.first.iterations), cell(r.second.iterations), xi_file, ""};
    } catch (const SolveError& e) {
      codes[item] = e.exit_code();
      messages[item] = e.what();
      rows[item] = {eps_s, pair_names[which], "", "", "", "solver-failure", "", "", "", cell(e.what())};
    } catch (const std::exception& e) {
      codes[item] = error_code_of(e);
      messages[item] = e.what();
      rows[item] = {eps_s, pair_names[which], "", "", "", "error", "", "", "", cell(e.what())};
    }
    log_line(opts, "[uniqueness] eps=" + format_shortest(eps) + " " + pair_names[which] + " " + rows[item][5]);
  });

  CommandStatus status;
  CsvTable table({"eps", "pair", "sup_diff", "sup_norm", "relative", "status", "iterations_first",
                  "iterations_second", "xi_file", "error"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    status.note(codes[i], messages[i]);
    table.add(rows[i]);
  }
  table.write(out_path(cfg, "uniqueness.csv"));
  return status;
}

}  // namespace nlsb
