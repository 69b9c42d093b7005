#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvf/error.hpp"
#include "cvf/geometry.hpp"

namespace cvf::cli {

using Json = nlohmann::ordered_json;

/// Malformed or invalid manifest (exit status 2).
class ManifestError : public Error {
 public:
  using Error::Error;
};

/// An analysis raised an error while running (exit status 1).
class AnalysisError : public Error {
 public:
  AnalysisError(const std::string& analysis, const std::string& what)
      : Error("analysis '" + analysis + "' failed: " + what), analysis_(analysis) {}
  const std::string& analysis() const { return analysis_; }

 private:
  std::string analysis_;
};

struct Tolerances {
  double zero = 1e-9;
  double classification = 1e-6;
  double conformal = 1e-7;
  double isolation_radius = 0.05;
  double lemma = 1e-7;
  double taylor_first = 1e-6;
  double taylor_second = 1e-4;
  double remainder_order = 2.7;
  double umbilicity = 1e-4;
  double trace_zero = 1e-5;
};

struct Manifest {
  Json source;
  Chart chart;
  VectorField field;
  std::vector<std::string> analyses;  // expanded, "all" removed
  Tolerances tol;
  int conformal_samples = 100;
  int identity_samples = 50;
  int taylor_directions = 2;
  int max_checked_zeros = 4;
  int grid_resolution = 13;
  int steps_per_unit = 200;
  double fd_step = 1e-3;
  double trace_radius = 0.2;
  int trace_grid = 7;
  int max_traced = 4;
  std::uint64_t seed = 0;
};

struct Overrides {
  std::optional<double> zero_tol;
  std::optional<double> class_tol;
  std::optional<double> isolation_radius;
  std::optional<int> geo_steps;
  std::optional<double> fd_step;
  std::optional<std::uint64_t> seed;
};

const std::vector<std::string>& analysis_names();

Manifest parse_manifest(const Json& doc, const Overrides& overrides = {});
Manifest load_manifest(const std::string& path, const Overrides& overrides = {});

/// Runs the analyses in order and returns the report; "status" is "pass" iff
/// every analysis passed.
Json run(const Manifest& manifest);

/// JSON text with every number printed to 17 significant digits and
/// non-finite numbers as null.
std::string dump(const Json& doc);

Json schema();
Json catalog();

/// Command-line entry point; returns the process exit status.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cvf::cli
