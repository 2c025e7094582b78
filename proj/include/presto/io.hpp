#pragma once

#include <json.hpp>
#include <optional>
#include <ostream>
#include <string>

#include "presto/driver.hpp"
#include "presto/process.hpp"
#include "presto/rbsde.hpp"
#include "presto/stopping.hpp"
#include "presto/tree.hpp"

namespace presto {

using Json = nlohmann::json;

struct Model {
  FiltrationTree tree;
  std::optional<LadlagProcess> obstacle;
  std::optional<Driver> driver;
};

/// {"name": "...", "params": {...}}; unknown names are rejected with the
/// registry list.
Driver driver_from_json(const Json& j);
Json driver_to_json(const Driver& driver);

Json tree_to_json(const FiltrationTree& tree);
FiltrationTree tree_from_json(const Json& j);

Json obstacle_to_json(const LadlagProcess& obstacle);
LadlagProcess obstacle_from_json(const Json& j, const FiltrationTree& tree);

Json model_to_json(const FiltrationTree& tree, const std::optional<LadlagProcess>& obstacle);
Model load_model(const std::string& path);

Json stopping_time_to_json(const ExtendedStoppingTime& tau);
ExtendedStoppingTime stopping_time_from_json(const Json& j, const FiltrationTree& tree);

/// One row per (stage, instant, atom); the left rows carry dA and the
/// Brownian residual entering the stage, the value rows carry the reflection
/// dB and the projection of the right limit, the plus rows carry the
/// integrand and the mark-level jump.
void write_solution_csv(std::ostream& os, const FiltrationTree& tree, const RbsdeSolution& sol);

Json solution_summary(const FiltrationTree& tree, const RbsdeSolution& sol);
Json skorokhod_report_to_json(const SkorokhodReport& report);
Json validation_report_to_json(const ValidationReport& report);
Json diagnostics_to_json(int S, const StoppingDiagnostics& diag);

/// Writes via a temp file and renames, so failures leave no partial output.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace presto
