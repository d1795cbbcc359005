#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>

#include "biharm/cli.hpp"
#include "biharm/eigen.hpp"
#include "biharm/estimates.hpp"
#include "biharm/solver.hpp"

namespace biharm::cli {
namespace {

namespace fs = std::filesystem;

fs::path prepare_out_dir(const RunConfig& config) {
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ConfigError("output directory '" + config.out_dir + "' cannot be created");
  return dir;
}

std::ofstream open_output(const fs::path& dir, const std::string& name, const std::string& command,
                          const RunConfig& config) {
  std::ofstream os(dir / name);
  if (!os) throw ConfigError("cannot write '" + (dir / name).string() + "'");
  os << "# biharm " << command << '\n' << "# config " << describe(config) << '\n';
  return os;
}

Grid2D config_grid(const RunConfig& config) {
  try {
    return build_grid(config.width, config.height, config.nx, config.ny);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

Field eigen_power_forcing(real c, const Discretization& disc, real p) {
  Field f = positive_part_power(disc.phi1, p);
  f *= -c;
  return f;
}

Field config_forcing(const RunConfig& config, const Discretization& disc) {
  if (config.forcing == ForcingKind::eigen_power) return eigen_power_forcing(config.c, disc, config.p);
  std::ifstream in(config.forcing_file);
  if (!in) throw ConfigError("cannot open forcing_file '" + config.forcing_file + "'");
  try {
    return read_field_csv(in, disc.grid);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("forcing_file: ") + e.what());
  }
}

ContinuationOptions continuation_options(const RunConfig& config) {
  ContinuationOptions opts;
  opts.newton_max_iter = config.newton_max_iter;
  opts.newton.linear_tol = config.linear_tol;
  return opts;
}

// Maps the exception taxonomy onto the exit-code contract.
template <class Body>
int guarded(const char* command, std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << command << ": configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const HypothesisViolation& e) {
    log << command << ": hypothesis violation: " << e.what() << '\n';
    return kHypothesisViolation;
  } catch (const ContinuationFailure& e) {
    log << command << ": continuation failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const NoConvergence& e) {
    log << command << ": solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const DegenerateLinearization& e) {
    log << command << ": solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const InvalidArgument& e) {
    log << command << ": configuration error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace

real c1_proxy(const Field& u) {
  const Grid2D& g = u.grid();
  auto value = [&](std::size_t i, std::size_t j) -> real {
    if (i < 1 || j < 1 || i > g.nx() || j > g.ny()) return 0;
    return u.at(i, j);
  };
  real grad = 0;
  for (std::size_t j = 1; j <= g.ny(); ++j)
    for (std::size_t i = 1; i <= g.nx(); ++i) {
      const real ux = (value(i + 1, j) - value(i - 1, j)) / (2 * g.hx());
      const real uy = (value(i, j + 1) - value(i, j - 1)) / (2 * g.hy());
      grad = std::max(grad, std::hypot(ux, uy));
    }
  return std::max(u.max_abs(), grad);
}

Field sine_series(const Grid2D& grid, const std::vector<real>& coefficients, std::size_t modes) {
  if (coefficients.size() != modes * modes) throw InvalidArgument("sine_series: need modes^2 coefficients");
  const real pi = std::acos(real{-1});
  return Field::sample(grid, [&](real x, real y) {
    real sum = 0;
    for (std::size_t k = 1; k <= modes; ++k) {
      const real sx = std::sin(static_cast<real>(k) * pi * x / grid.width());
      for (std::size_t l = 1; l <= modes; ++l)
        sum += coefficients[(k - 1) * modes + (l - 1)] * sx * std::sin(static_cast<real>(l) * pi * y / grid.height());
    }
    return sum;
  });
}

std::vector<real> random_smooth_coefficients(std::uint64_t seed, std::size_t sample, std::size_t modes) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(sample)};
  std::mt19937_64 gen(seq);
  std::vector<real> out(modes * modes);
  for (std::size_t k = 1; k <= modes; ++k)
    for (std::size_t l = 1; l <= modes; ++l) {
      const real unit = static_cast<real>(gen() >> 11) * 0x1.0p-53L * 2 - 1;
      out[(k - 1) * modes + (l - 1)] = unit / static_cast<real>(k * k + l * l);
    }
  return out;
}

int run_eig(const RunConfig& config, std::ostream& log) {
  return guarded("eig", log, [&] {
    validate(config);
    const fs::path dir = prepare_out_dir(config);
    const Grid2D grid = config_grid(config);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(config.eig_count), grid.size());

    const SparseOperator lap = laplacian_matrix(grid);
    const std::vector<EigenPair> lap_pairs = smallest_eigenpairs(lap, grid, k, config.eigen_tol);
    const WeightedSpectrum bih =
        weighted_eigenvalues(biharmonic_matrix(grid), Field::constant(grid, 1), k, config.eigen_tol);

    std::vector<real> values, residuals;
    for (const EigenPair& e : lap_pairs) {
      values.push_back(e.value);
      residuals.push_back(e.residual);
    }
    auto os = open_output(dir, "laplacian_spectrum.csv", "eig", config);
    write_spectrum_csv(os, values, residuals);
    auto ob = open_output(dir, "biharmonic_spectrum.csv", "eig", config);
    write_spectrum_csv(ob, bih.values, bih.residuals);
    auto of = open_output(dir, "phi1.csv", "eig", config);
    write_field_csv(of, lap_pairs.front().vector);

    log << std::setprecision(15);
    log << "lambda1_h = " << static_cast<double>(lap_pairs[0].value) << '\n';
    if (k > 1) log << "lambda2_h = " << static_cast<double>(lap_pairs[1].value) << '\n';
    log << "lambda1_h^2 = " << static_cast<double>(lap_pairs[0].value * lap_pairs[0].value) << '\n';
    log << "biharmonic mu1 = " << static_cast<double>(bih.values[0]) << '\n';
    return kSuccess;
  });
}

int run_hypotheses(const RunConfig& config, std::ostream& log) {
  return guarded("hypotheses", log, [&] {
    validate(config);
    std::vector<real> grid_p;
    if (config.p_grid) {
      grid_p = *config.p_grid;
    } else {
      // Default grid straddles the window by 20% of its width on each side.
      const HypothesisReport w = check_hypotheses(config.dimension, config.p, config.r);
      if (!std::isfinite(w.p_lower) || !std::isfinite(w.p_upper) || !(w.p_lower < w.p_upper))
        throw ConfigError("no exponent window for N=" + std::to_string(config.dimension) + "; give p_grid explicitly");
      const real width = w.p_upper - w.p_lower;
      for (int i = 0; i <= 14; ++i) grid_p.push_back(w.p_lower - width / 5 + width * 1.4L * i / 14);
    }
    if (grid_p.empty()) throw ConfigError("p_grid is empty");
    const fs::path dir = prepare_out_dir(config);
    auto os = open_output(dir, "hypotheses.csv", "hypotheses", config);
    write_hypotheses_csv_header(os);
    int passing = 0;
    for (real p : grid_p) {
      const HypothesisReport rep = check_hypotheses(config.dimension, p, config.r);
      write_hypotheses_csv_row(os, rep);
      passing += rep.all_pass() ? 1 : 0;
    }
    log << "hypotheses: " << passing << " of " << grid_p.size() << " p values pass\n";
    return kSuccess;
  });
}

int run_continuation(const RunConfig& config, std::ostream& log) {
  return guarded("continue", log, [&] {
    validate(config);
    const fs::path dir = prepare_out_dir(config);
    const auto disc = discretize(config_grid(config), config.eigen_tol);
    Field f = config_forcing(config, *disc);
    const ProblemSpec spec = ProblemSpec::create(disc, config.dimension, config.p, config.r, std::move(f));
    try {
      auto [sol, trace] = homotopy_path(spec, config.t_ref, config.continuation_steps, config.newton_tol,
                                        continuation_options(config));
      auto of = open_output(dir, "solution.csv", "continue", config);
      write_field_csv(of, sol.u);
      auto om = open_output(dir, "solution.meta", "continue", config);
      write_solution_meta(om, sol);
      auto ot = open_output(dir, "trace.csv", "continue", config);
      write_trace_csv(ot, trace);
      log << std::setprecision(6) << "continue: reached tau=0, residual " << static_cast<double>(sol.residual_norm)
          << ", sup " << static_cast<double>(sol.u.max_abs()) << ", mu1 "
          << static_cast<double>(sol.index_certificate->mu1) << ", mu2 "
          << static_cast<double>(sol.index_certificate->mu2) << '\n';
      return kSuccess;
    } catch (const ContinuationFailure& e) {
      auto ot = open_output(dir, "trace.csv", "continue", config);
      write_trace_csv(ot, e.trace());
      throw;
    }
  });
}

int run_sweep(const RunConfig& config, std::ostream& log) {
  return guarded("sweep", log, [&] {
    validate(config);
    std::vector<real> cs = config.c_grid;
    if (cs.empty()) throw ConfigError("c_grid is empty");
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());

    const fs::path dir = prepare_out_dir(config);
    const auto disc = discretize(config_grid(config), config.eigen_tol);
    const Field phi_pow = positive_part_power(disc->phi1, config.p);
    const real phi_moment = integrate(phi_pow, disc->phi1);  // integral of phi1^(p+1)

    struct Row {
      real c, f_norm, u_sup, u_c1, t, predicted_sup;
      int index;
      std::string status;
    };
    std::vector<Row> rows;
    int successes = 0;
    for (real c : cs) {
      Row row{c, 0, 0, 0, 0, 0, -1, ""};
      if (c == 0) {
        row.status = "rejected_zero_forcing";
        rows.push_back(row);
        continue;
      }
      Field f = eigen_power_forcing(c, *disc, config.p);
      row.f_norm = lp_norm(f, config.r);
      // Leading-order amplitude from the resonance identity with u ~ t phi1.
      const real t_pred = std::pow(std::max<real>(0, -integrate(f, disc->phi1)) / phi_moment, 1 / config.p);
      row.predicted_sup = t_pred * disc->phi1.max_abs();
      try {
        const ProblemSpec spec = ProblemSpec::create(disc, config.dimension, config.p, config.r, std::move(f));
        auto [sol, trace] = homotopy_path(spec, config.t_ref, config.continuation_steps, config.newton_tol,
                                          continuation_options(config));
        row.u_sup = sol.u.max_abs();
        row.u_c1 = c1_proxy(sol.u);
        row.t = sol.decomposition.amplitude;
        row.index = sol.index_certificate->index;
        row.status = "ok";
        ++successes;
      } catch (const HypothesisViolation&) {
        row.status = "rejected_hypothesis";
      } catch (const ContinuationFailure& e) {
        row.status = to_string(e.trace().status);
      } catch (const NoConvergence&) {
        row.status = "no_convergence";
      }
      rows.push_back(row);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.f_norm < b.f_norm; });

    auto os = open_output(dir, "envelope.csv", "sweep", config);
    os << "c,f_norm_r,u_sup,u_c1,t,index,u_sup_predicted,status\n" << std::setprecision(17);
    for (const Row& r : rows)
      os << static_cast<double>(r.c) << ',' << static_cast<double>(r.f_norm) << ',' << static_cast<double>(r.u_sup)
         << ',' << static_cast<double>(r.u_c1) << ',' << static_cast<double>(r.t) << ',' << r.index << ','
         << static_cast<double>(r.predicted_sup) << ',' << r.status << '\n';
    log << "sweep: " << successes << " of " << rows.size() << " rows solved\n";
    return successes > 0 ? kSuccess : kSolverFailure;
  });
}

int run_hardy_sobolev(const RunConfig& config, std::ostream& log) {
  return guarded("hardy-sobolev", log, [&] {
    validate(config);
    if (config.samples < 1) throw ConfigError("samples must be at least 1");
    const HypothesisReport hyp = check_hypotheses(config.dimension, config.p, config.r);
    if (!hyp.dimension_ok || !hyp.p_ok) throw HypothesisViolation("hardy-sobolev: violated " + hyp.failures());
    const ExponentBundle bundle = exponent_bundle(config.dimension, config.p);

    const fs::path dir = prepare_out_dir(config);
    const Grid2D coarse = config_grid(config);
    const Grid2D fine = build_grid(config.width, config.height, 2 * config.nx + 1, 2 * config.ny + 1);
    const auto dc = discretize(coarse, config.eigen_tol);
    const auto df = discretize(fine, config.eigen_tol);

    constexpr std::size_t kModes = 10;
    auto os = open_output(dir, "hardy_sobolev.csv", "hardy-sobolev", config);
    os << "sample,ratio_coarse,ratio_fine\n" << std::setprecision(17);
    real max_coarse = 0, max_fine = 0;
    for (int s = 0; s < config.samples; ++s) {
      const std::vector<real> coeffs = random_smooth_coefficients(config.seed, static_cast<std::size_t>(s), kModes);
      const real rc = hardy_sobolev_ratio(sine_series(coarse, coeffs, kModes), dc->phi1, bundle, dc->laplacian,
                                          dc->biharmonic);
      const real rf = hardy_sobolev_ratio(sine_series(fine, coeffs, kModes), df->phi1, bundle, df->laplacian,
                                          df->biharmonic);
      max_coarse = std::max(max_coarse, rc);
      max_fine = std::max(max_fine, rf);
      os << s << ',' << static_cast<double>(rc) << ',' << static_cast<double>(rf) << '\n';
    }
    auto sm = open_output(dir, "hardy_sobolev_summary.csv", "hardy-sobolev", config);
    sm << "max_ratio_coarse,max_ratio_fine,fine_over_coarse\n" << std::setprecision(17)
       << static_cast<double>(max_coarse) << ',' << static_cast<double>(max_fine) << ','
       << static_cast<double>(max_fine / max_coarse) << '\n';
    log << std::setprecision(6) << "hardy-sobolev: max ratio coarse " << static_cast<double>(max_coarse) << ", fine "
        << static_cast<double>(max_fine) << '\n';
    return kSuccess;
  });
}

}  // namespace biharm::cli
