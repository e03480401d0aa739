#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "carlab/field.hpp"
#include "carlab/lowerbound.hpp"
#include "carlab/params.hpp"
#include "carlab/solver.hpp"
#include "carlab/verify.hpp"

namespace carlab {

struct InitialCondition {
  std::string type = "maxwellian";  // maxwellian | indicator | two_bumps | csv
  double mass = 1.0;
  double temperature = 1.0;
  double radius = 1.0;
  double height = 1.0;
  std::vector<std::vector<double>> centers;  // two_bumps; empty means the standard pair
  std::string path;                          // csv

  std::unique_ptr<Density> density(int d) const;  // null for csv
};

struct RunConfig {
  RunConfig() { kernel.theta_min = 0.05; }

  KernelParams kernel;
  double v_max = 6.0;
  int n = 48;
  double dt_init = 1e-3;
  double t_end = 0.1;
  std::vector<double> plateau_radii{1.0};
  InitialCondition initial;
  double T0 = 0.1;
  double c_s = 1.0;
  int n_max = 8;
  std::optional<double> ell0;  // analytic mode; measured from the datum when absent
  std::uint64_t seed = 42;
  std::uint64_t mc_samples = 1000000;
  int threads = 0;

  void validate() const;  // throws ConfigError
  VelocityGrid grid() const;
  // Initial datum: rasterized density or the CSV field (grid must match).
  DistributionField initial_field() const;
};

// Unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& c);

// Doubles as %.17g, so files round-trip exactly and reruns are byte-identical.
std::string format_double(double x);

// Header i1..id, v1..vd, f; one row per node in row-major order.
void write_field_csv(std::ostream& os, const GridFunction& f);
// Reads a field written by write_field_csv; the grid is reconstructed from
// the indices and coordinates.
DistributionField read_field_csv(std::istream& is);
DistributionField read_field_csv(const std::string& path);

// t, mass, energy, entropy, sup_f, plateau_R<r>..., dt, clamped_mass.
void write_trace_csv(std::ostream& os, const SolveTrace& tr);
// n, xi_n, R_n, T_n, ell_n, log_ell_n.
void write_states_csv(std::ostream& os, const std::vector<SpreadingState>& states);

nlohmann::json certificate_to_json(const CertificateReport& c);
nlohmann::json report_to_json(const EstimateReport& r);
// name, measured_constant, measured_exponent, expected_exponent, tolerance, pass.
void write_summary_csv(std::ostream& os, const std::vector<EstimateReport>& reports);

void write_text(const std::string& path, const std::string& text);

}  // namespace carlab
