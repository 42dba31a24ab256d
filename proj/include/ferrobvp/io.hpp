#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ferrobvp/mesh.hpp"
#include "ferrobvp/model.hpp"

namespace ferrobvp {

/// Writes `<stem>.csv` with columns y, Q11, Q12, M1, M2, |Q|, |M|, theta, phi
/// at 17 significant digits. Two-field states are written embedded.
void write_solution_csv(const std::filesystem::path& csv, const FieldState& s);
void write_solution_csv(const std::filesystem::path& csv, const ORState& s);

/// Reads a solution CSV back. The y column must be the uniform mesh on
/// [-1, 1]; boundary rows must carry the Dirichlet data to 1e-12.
FieldState read_solution_csv(const std::filesystem::path& csv);

/// Sidecar JSON with system, parameters, mesh size, energy and residual;
/// `extra` is merged on top.
template <int Fields>
nlohmann::json solution_sidecar(const NodalState<Fields>& s, const ModelParams& p, const nlohmann::json& extra = {});

nlohmann::json params_to_json(const ModelParams& p);
ModelParams params_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Creates the directory (and parents) and checks that a file can be
/// written into it; throws std::runtime_error otherwise.
void ensure_writable_dir(const std::filesystem::path& dir);

}  // namespace ferrobvp
