#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biharm/common.hpp"
#include "biharm/grid.hpp"

namespace biharm::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kSolverFailure = 3,
  kHypothesisViolation = 4,
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ForcingKind { eigen_power, file };

/// Resolved run configuration. See README for the key list.
struct RunConfig {
  real width = 1;
  real height = 1;
  std::size_t nx = 31;
  std::size_t ny = 31;

  int dimension = 6;
  real p = 2.1L;
  real r = 2.5L;

  ForcingKind forcing = ForcingKind::eigen_power;
  real c = 0.05L;  // f = -c phi1^p
  std::string forcing_file;

  real linear_tol = 1e-14L;
  real newton_tol = 1e-10L;
  int newton_max_iter = 25;
  int continuation_steps = 10;
  real t_ref = 0.3L;
  real eigen_tol = 1e-12L;
  int eig_count = 3;

  std::optional<std::vector<real>> p_grid;  // hypotheses; default straddles the window
  std::vector<real> c_grid{0.001L, 0.01L, 0.05L, 0.1L};
  int samples = 50;

  std::string out_dir = "out";
  std::uint64_t seed = 42;
};

/// Parses flat `key = value` lines; '#' starts a comment. Unknown keys,
/// malformed values and out-of-range values throw ConfigError.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);
/// Throws ConfigError on invalid combinations (nonpositive tolerances, ...).
void validate(const RunConfig& config);
/// One line, `key=value` pairs, listing every resolved setting.
std::string describe(const RunConfig& config);

int run_eig(const RunConfig& config, std::ostream& log);
int run_hypotheses(const RunConfig& config, std::ostream& log);
int run_continuation(const RunConfig& config, std::ostream& log);
int run_sweep(const RunConfig& config, std::ostream& log);
int run_hardy_sobolev(const RunConfig& config, std::ostream& log);

/// max(sup|u|, max nodewise central-difference gradient magnitude), with
/// zero boundary values.
real c1_proxy(const Field& u);

/// Sum of a_kl sin(k pi x / a) sin(l pi y / b) over k, l = 1..modes.
Field sine_series(const Grid2D& grid, const std::vector<real>& coefficients, std::size_t modes);

/// Deterministic coefficients for sine_series: uniform in [-1,1) scaled by
/// 1/(k^2 + l^2).
std::vector<real> random_smooth_coefficients(std::uint64_t seed, std::size_t sample, std::size_t modes);

}  // namespace biharm::cli
