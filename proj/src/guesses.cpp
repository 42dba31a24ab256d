#include "ferrobvp/guesses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ferrobvp/asymptotics.hpp"
#include "ferrobvp/bulk_landscape.hpp"

namespace ferrobvp {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

int parse_int(const std::string& s, const std::string& name) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad integer '" + s + "' in guess name '" + name + "'");
  }
}

double parse_sign(const std::string& s, const std::string& name) {
  if (s == "+" || s == "plus") return 1.0;
  if (s == "-" || s == "minus") return -1.0;
  throw std::invalid_argument("bad sign '" + s + "' in guess name '" + name + "'");
}

double ramp_width(const Mesh& mesh, const ModelParams& p) {
  return std::clamp(std::sqrt(p.l1), 2.0 * mesh.h(), 0.5);
}

// 0 at y = +-1, 1 beyond distance w from both ends, linear in between.
double interior_weight(double y, double w) {
  return std::min({1.0, (y + 1.0) / w, (1.0 - y) / w});
}

// Blends the boundary data (left value at y=-1, right value at y=1) into an
// interior profile over ramps of width w.
double blend(double y, double interior, double left, double right, double w) {
  const double t = interior_weight(y, w);
  const double edge = y < 0.0 ? left : right;
  return edge + t * (interior - edge);
}

// Product of tanh fronts at k equispaced interior points.
double wall_profile(double y, int k, double w) {
  double v = 1.0;
  for (int j = 1; j <= k; ++j) {
    const double yj = -1.0 + 2.0 * j / (k + 1);
    v *= -std::tanh((y - yj) / w);
  }
  return v;
}

template <int Fields>
void set_linear(NodalState<Fields>& s) {
  for (int i = 0; i < s.n_nodes(); ++i) {
    const double y = s.mesh().node(i);
    for (int f = 0; f < Fields; ++f) s.table()(i, f) = NodalState<Fields>::is_transverse(f) ? 0.0 : -y;
  }
}

template <int Fields>
NodalState<Fields> plateau(const std::shared_ptr<const Mesh>& mesh, const ModelParams& p, double m_sign, int walls) {
  NodalState<Fields> s(mesh);
  const double rho = rho_star(p.c);
  const double sigma = std::sqrt(1.0 + 2.0 * p.c * rho);
  const double w = ramp_width(*mesh, p);
  const int q = 0;
  const int m = Fields == 4 ? field::m1 : 1;
  for (int i = 0; i < s.n_nodes(); ++i) {
    const double y = mesh->node(i);
    const double shape = walls == 0 ? 1.0 : wall_profile(y, walls, std::max(w, 2.0 * mesh->h()));
    s.table()(i, q) = blend(y, rho, 1.0, -1.0, w);
    s.table()(i, m) = blend(y, m_sign * sigma * shape, 1.0, -1.0, w);
  }
  s.apply_dirichlet();
  return s;
}

FieldState rotation(const std::shared_ptr<const Mesh>& mesh, const ModelParams& p, int a, int b) {
  FieldState s(mesh);
  const double rho = rho_star(p.c);
  const double sigma = std::sqrt(1.0 + 2.0 * p.c * rho);
  const double w = ramp_width(*mesh, p);
  for (int i = 0; i < s.n_nodes(); ++i) {
    const double y = mesh->node(i);
    const double t = (y + 1.0) / 2.0;
    const double qa = 1.0 + interior_weight(y, w) * (rho - 1.0);
    const double ma = 1.0 + interior_weight(y, w) * (sigma - 1.0);
    const double th = a * std::numbers::pi * t;
    const double ph = b * std::numbers::pi * t;
    s.table().row(i) << qa * std::cos(th), qa * std::sin(th), ma * std::cos(ph), ma * std::sin(ph);
  }
  s.apply_dirichlet();
  return s;
}

template <int Fields>
NodalState<Fields> random_guess(const std::shared_ptr<const Mesh>& mesh, std::uint64_t seed) {
  NodalState<Fields> s(mesh);
  set_linear(s);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int f = 0; f < Fields; ++f) {
    for (int k = 1; k <= 6; ++k) {
      const double amp = 0.6 * normal(rng) / k;
      for (int i = 0; i < s.n_nodes(); ++i) {
        s.table()(i, f) += amp * std::sin(k * std::numbers::pi * (mesh->node(i) + 1.0) / 2.0);
      }
    }
  }
  s.apply_dirichlet();
  return s;
}

template <int Fields>
std::vector<std::string> fixed_names() {
  std::vector<std::string> names = {"linear", "plateau-plus", "plateau-minus"};
  if constexpr (Fields == 4) {
    names.insert(names.end(), {"limit-plus", "limit-minus"});
    for (int a : {1, -1, 3, -3}) {
      for (int b : {1, -1, 3, -3}) names.push_back("rotation:" + std::to_string(a) + ":" + std::to_string(b));
    }
    names.insert(names.end(), {"walls:1:+", "walls:1:-", "walls:2:+", "walls:2:-", "sine:1:+", "sine:1:-",
                               "sine:2:+", "sine:2:-"});
  } else {
    names.insert(names.end(), {"walls:1:+", "walls:1:-", "walls:2:+", "walls:2:-", "walls:3:+", "walls:3:-",
                               "walls:4:+", "walls:4:-"});
  }
  return names;
}

}  // namespace

template <int Fields>
NodalState<Fields> make_guess(const std::string& name, const std::shared_ptr<const Mesh>& mesh, const ModelParams& p) {
  p.validate();
  const auto parts = split(name, ':');
  if (parts.empty()) throw std::invalid_argument("empty guess name");
  const std::string& kind = parts[0];
  auto need_full = [&] {
    if (Fields != 4) throw std::invalid_argument("guess '" + name + "' needs the four-field system");
  };

  if (kind == "linear" && parts.size() == 1) {
    NodalState<Fields> s(mesh);
    set_linear(s);
    s.apply_dirichlet();
    return s;
  }
  if ((kind == "plateau-plus" || kind == "plateau-minus") && parts.size() == 1) {
    return plateau<Fields>(mesh, p, kind == "plateau-plus" ? 1.0 : -1.0, 0);
  }
  if (kind == "walls" && parts.size() == 3) {
    const int k = parse_int(parts[1], name);
    if (k < 0) throw std::invalid_argument("wall count must be nonnegative in '" + name + "'");
    return plateau<Fields>(mesh, p, parse_sign(parts[2], name), k);
  }
  if (kind == "random" && parts.size() == 2) {
    std::uint64_t seed = 0;
    try {
      seed = std::stoull(parts[1]);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad seed in guess name '" + name + "'");
    }
    return random_guess<Fields>(mesh, seed);
  }
  if constexpr (Fields == 4) {
    if ((kind == "limit-plus" || kind == "limit-minus") && parts.size() == 1) {
      FieldState s = limit_map_l0(mesh, p.c, kind == "limit-plus" ? 1 : -1);
      // Replace the sharp ends by ramps to the boundary data.
      const double w = ramp_width(*mesh, p);
      for (int i = 0; i < s.n_nodes(); ++i) {
        const double y = mesh->node(i);
        for (int f = 0; f < 4; ++f) {
          const double edge = FieldState::dirichlet_value(f, y > 0.0);
          s.table()(i, f) = edge + interior_weight(y, w) * (s.table()(i, f) - edge);
        }
      }
      s.apply_dirichlet();
      return s;
    }
    if (kind == "rotation" && parts.size() == 3) {
      const int a = parse_int(parts[1], name);
      const int b = parse_int(parts[2], name);
      if (a % 2 == 0 || b % 2 == 0) throw std::invalid_argument("rotation turns must be odd in '" + name + "'");
      return rotation(mesh, p, a, b);
    }
    if (kind == "sine" && parts.size() == 3) {
      const int k = parse_int(parts[1], name);
      const double sign = parse_sign(parts[2], name);
      FieldState s(mesh);
      set_linear(s);
      for (int i = 0; i < s.n_nodes(); ++i) {
        const double v = sign * 0.5 * std::sin(k * std::numbers::pi * (mesh->node(i) + 1.0) / 2.0);
        s.table()(i, field::q12) = v;
        s.table()(i, field::m2) = v;
      }
      s.apply_dirichlet();
      return s;
    }
  } else {
    if (kind == "limit-plus" || kind == "limit-minus" || kind == "rotation" || kind == "sine") need_full();
  }
  throw std::invalid_argument("unknown guess '" + name + "'");
}

template <int Fields>
int fixed_guess_count() {
  return static_cast<int>(fixed_names<Fields>().size());
}

template <int Fields>
std::vector<NamedGuess<Fields>> guess_suite(const std::shared_ptr<const Mesh>& mesh, const ModelParams& p, int size,
                                            std::uint64_t seed) {
  std::vector<std::string> names = fixed_names<Fields>();
  if (size < static_cast<int>(names.size())) names.resize(std::max(size, 0));
  for (std::uint64_t i = 0; static_cast<int>(names.size()) < size; ++i) {
    names.push_back("random:" + std::to_string(seed + i));
  }
  std::vector<NamedGuess<Fields>> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back({n, make_guess<Fields>(n, mesh, p)});
  return out;
}

template NodalState<2> make_guess<2>(const std::string&, const std::shared_ptr<const Mesh>&, const ModelParams&);
template NodalState<4> make_guess<4>(const std::string&, const std::shared_ptr<const Mesh>&, const ModelParams&);
template int fixed_guess_count<2>();
template int fixed_guess_count<4>();
template std::vector<NamedGuess<2>> guess_suite<2>(const std::shared_ptr<const Mesh>&, const ModelParams&, int,
                                                   std::uint64_t);
template std::vector<NamedGuess<4>> guess_suite<4>(const std::shared_ptr<const Mesh>&, const ModelParams&, int,
                                                   std::uint64_t);

}  // namespace ferrobvp
