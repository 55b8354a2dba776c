#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>
#include <latept/late_sim.hpp>
#include <latept/ultrametric.hpp>

namespace latept {

// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format_double(double v);
std::string format_u64(std::uint64_t v);

// Joins pre-formatted fields with commas and appends a newline.
std::string csv_line(const std::vector<std::string>& fields);

nlohmann::json matrix_to_json(const UltraMatrix& A);

// Accepts either a bare nested array [[...],...] (eta taken from
// default_eta) or an object {"entries": [[...]], "eta": ...}.
UltraMatrix matrix_from_json(const nlohmann::json& spec, double default_eta);

nlohmann::json tree_to_json(const DecompositionTree& t);

// Replica table with the fixed header
// n,replica,late_count,tuple_count,tuple_count_distinct,seed.
std::string replica_rows_csv(const std::vector<ReplicaRow>& rows);

}  // namespace latept
