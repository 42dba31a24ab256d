#include "ferrobvp/io.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ferrobvp/discretization.hpp"

namespace ferrobvp {

void write_solution_csv(const std::filesystem::path& csv, const FieldState& s) {
  std::ofstream out(csv);
  if (!out) throw std::runtime_error("cannot write " + csv.string());
  const Diagnostics d = diagnostics(s);
  out << std::setprecision(17);
  out << "y,Q11,Q12,M1,M2,|Q|,|M|,theta,phi\n";
  const auto& t = s.table();
  for (int i = 0; i < s.n_nodes(); ++i) {
    out << d.y[i] << ',' << t(i, field::q11) << ',' << t(i, field::q12) << ',' << t(i, field::m1) << ','
        << t(i, field::m2) << ',' << d.q_norm[i] << ',' << d.m_norm[i] << ',' << d.theta[i] << ',' << d.phi[i]
        << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + csv.string());
}

void write_solution_csv(const std::filesystem::path& csv, const ORState& s) { write_solution_csv(csv, embed(s)); }

FieldState read_solution_csv(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot read " + csv.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("y,Q11,Q12,M1,M2", 0) != 0)
    throw std::runtime_error(csv.string() + ": missing solution CSV header");
  std::vector<std::array<double, 5>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::array<double, 5> r{};
    for (int k = 0; k < 5; ++k) {
      std::string cell;
      if (!std::getline(ss, cell, ',')) throw std::runtime_error(csv.string() + ": short row");
      r[k] = std::stod(cell);
    }
    rows.push_back(r);
  }
  if (rows.size() < 3) throw std::runtime_error(csv.string() + ": too few rows");
  auto mesh = make_mesh(static_cast<int>(rows.size()) - 1);
  FieldState s(mesh);
  for (int i = 0; i < mesh->n_nodes(); ++i) {
    if (std::abs(rows[i][0] - mesh->node(i)) > 1e-12)
      throw std::runtime_error(csv.string() + ": y column is not a uniform mesh on [-1, 1]");
    for (int f = 0; f < 4; ++f) s.table()(i, f) = rows[i][f + 1];
  }
  const int last = mesh->n_nodes() - 1;
  for (int f = 0; f < 4; ++f) {
    if (std::abs(s.table()(0, f) - FieldState::dirichlet_value(f, false)) > 1e-12 ||
        std::abs(s.table()(last, f) - FieldState::dirichlet_value(f, true)) > 1e-12)
      throw std::runtime_error(csv.string() + ": boundary rows do not match the Dirichlet data");
  }
  s.apply_dirichlet();
  return s;
}

nlohmann::json params_to_json(const ModelParams& p) {
  return {{"l1", p.l1}, {"l2", p.l2}, {"c", p.c}, {"xi", p.xi}};
}

ModelParams params_from_json(const nlohmann::json& j) {
  return ModelParams::make(j.at("l1").get<double>(), j.at("l2").get<double>(), j.at("c").get<double>(),
                           j.at("xi").get<double>());
}

template <int Fields>
nlohmann::json solution_sidecar(const NodalState<Fields>& s, const ModelParams& p, const nlohmann::json& extra) {
  nlohmann::json j;
  j["system"] = Fields == 4 ? "full" : "or";
  j["params"] = params_to_json(p);
  j["n_cells"] = s.mesh().n_cells();
  j["energy"] = energy(s, p);
  j["residual"] = residual(s, p).norm();
  if (extra.is_object()) j.update(extra);
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setw(2) << j << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

void ensure_writable_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error("cannot create output directory " + dir.string());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw std::runtime_error("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

template nlohmann::json solution_sidecar<2>(const NodalState<2>&, const ModelParams&, const nlohmann::json&);
template nlohmann::json solution_sidecar<4>(const NodalState<4>&, const ModelParams&, const nlohmann::json&);

}  // namespace ferrobvp
