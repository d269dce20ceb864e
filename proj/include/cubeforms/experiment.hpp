// Experiment configuration, exact verification suites and report output.
// These back the command-line front end and the C API.

#pragma once

#include "cubeforms/meshlab.hpp"
#include "cubeforms/spaces.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cubeforms {

inline constexpr const char* kVersion = "1.0.0";

/// Raised for malformed configs and invalid space/mesh specifications.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpaceSpec {
  std::string kind = "Qminus";  // P | Qminus | serendipity | SLambda1_2d | custom
  int r = 1;
  int k = 0;
  int n = 2;
  std::string basis;            // custom only: forms separated by ';'

  bool operator==(const SpaceSpec&) const = default;
};

struct TargetSpec {
  std::string id = "trig";      // trig | poly
  std::string form;             // poly only

  bool operator==(const TargetSpec&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  SpaceSpec space;
  MeshSpec mesh;
  std::vector<int> subdivisions{4, 8, 16, 32};
  TargetSpec target;
  int quadrature_order = 0;     // 0: default_quadrature_order
  std::string out_dir = ".";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Flat `key = value` text with [space], [mesh], [target], [run] sections.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

/// Parses a form such as `2*x1^2*x2*dx1^dx2 + x3*dx2`; terms without a dx
/// factor are 0-forms. `k` is inferred and must agree across terms.
DiffForm parse_form(const std::string& text, int n);
FormSpace make_space(const SpaceSpec& spec);
TargetForm make_target(const TargetSpec& spec, int n, int k);

struct RunRecord {
  ExperimentConfig config;
  std::string version;
  std::string timestamp;
  ConvergenceReport report;
};

RunRecord run_experiment(const ExperimentConfig& config, int threads = 1);

inline constexpr const char* kCsvHeader =
    "family,n,k,r,space,N,h,error,rate_pair,rate_lsq,pred_affine,pred_multilinear";

void write_csv(const ConvergenceReport& report, std::ostream& os);
std::string format_table(const ConvergenceReport& report);
std::string record_json(const RunRecord& record);
/// last pair rate >= predicted rate for the mesh family - tol
bool rates_meet_prediction(const ConvergenceReport& report, double tol);

// ------------------------------------------------------------- checks

struct CheckResult {
  std::string name;
  bool passed = true;
  int cases = 0;
  std::vector<std::string> failures;  // "r=.. k=.. n=..: detail"
};

struct CheckOptions {
  int max_n = 3;
  int max_r = 3;
  int unisolvence_max_n = 3;
  int pullback_maps = 4;        // random multilinear maps per n
  unsigned seed = 20140501u;
  /// Builder for Qminus; tests substitute a corrupted one.
  std::function<FormSpace(int, int, int)> qminus = build_Qminus;
};

/// Corrupted builder dropping the last basis form (failure-path testing).
FormSpace build_Qminus_corrupted(int r, int k, int n);

std::vector<CheckResult> run_checks(
    const CheckOptions& options,
    const std::function<void(const CheckResult&)>& on_result = {});

/// Random multilinear diffeomorphism with rational corners near the unit cube.
MultilinearMap random_multilinear_map(int n, unsigned seed, bool affine);

}  // namespace cubeforms
