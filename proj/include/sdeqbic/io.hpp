#pragma once

#include "sdeqbic/gql.hpp"
#include "sdeqbic/limits.hpp"
#include "sdeqbic/noise.hpp"
#include "sdeqbic/qbic.hpp"
#include "sdeqbic/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace sdeqbic {

using ordered_json = nlohmann::ordered_json;

/// Shortest representation that round-trips the exact double.
std::string format_double(double value);

/// Persists a path as "t,x" CSV, full precision.
void save_path_csv(const Path& path, const std::filesystem::path& file);

/// Loads a "t,x" CSV; h is inferred from the grid, which must be uniform.
Path load_path_csv(const std::filesystem::path& file);

ordered_json to_json(const NoiseSpec& spec);
NoiseSpec noise_from_json(const nlohmann::json& j);

ordered_json to_json(const OptimizeDiagnostics& diag);
ordered_json to_json(const FitResult& fit);
ordered_json to_json(const QbicReport& report);
ordered_json to_json(const LimitReport& report, const CandidateSet& candidates);

}  // namespace sdeqbic
