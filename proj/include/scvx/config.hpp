#pragma once

// Run configuration: a JSON document whose omitted keys take the nominal
// Apollo values. Keys may be nested objects or dotted flat paths
// ("scvx.w_tr": 1e3).

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "scvx/conic.hpp"
#include "scvx/mission.hpp"

namespace scvx {

class ConfigError : public std::runtime_error {
 public:
  /// `key` is the dotted path of the offending entry, empty for parse errors.
  ConfigError(const std::string& what, std::string key, int line = 0, int column = 0)
      : std::runtime_error(what), key_(std::move(key)), line_(line), column_(column) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }      // 1-based, 0 when not a parse error
  int column() const { return column_; }

 private:
  std::string key_;
  int line_;
  int column_;
};

struct RunConfig {
  MissionSpec mission;
  ApolloGeometry vehicle;
  ScvxConfig scvx;
  std::vector<double> sweep = {150.0, 250.0, 350.0, 450.0};
  std::filesystem::path output_dir = "scvx_out";
  std::string solver;  // empty: SCVX_SOLVER, then "ipm"
  SolverSettings solver_settings;
  double c1 = kDefaultC1;
  FuelModel fuel_model = FuelModel::squared;
  int dense_samples = 20;   // per control interval in the dense output
  std::uint64_t seed = 0;   // randomized fixtures only
  std::vector<std::string> warnings;  // unknown keys and similar

  /// Builds the vehicle and the problem for `t_f`; throws ConfigError.
  VehicleModel build_vehicle() const;
  RendezvousProblem build_problem(double t_f) const;
  RendezvousProblem build_problem() const { return build_problem(mission.t_f); }

  /// Checks every module invariant, including every sweep entry. Throws ConfigError.
  void validate() const;
};

RunConfig parse_config(const std::string& text);
/// Throws ConfigError when the file cannot be read or fails validation.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace scvx
