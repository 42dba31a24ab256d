#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ferrobvp/mesh.hpp"
#include "ferrobvp/model.hpp"

namespace ferrobvp {

/// Named initial states for Newton and deflation. Recognised names:
///
///   linear                (-y, 0, -y, 0)
///   plateau-plus|minus    Q11 = rho*, M1 = +-sigma* with sqrt(l) ramps to the boundary data
///   walls:<k>:<+|->       plateau with k interior sign changes of M1
///   limit-plus|minus      l -> 0 rotation map, pinned at the ends (full system only)
///   rotation:<a>:<b>      Q phase 0 -> a*pi, M phase 0 -> b*pi, a and b odd (full only)
///   sine:<k>:<+|->        linear state plus +-0.5 sin(k pi (y+1)/2) in Q12 and M2 (full only)
///   random:<seed>         linear state plus seeded smooth noise in every field
///
/// Throws std::invalid_argument for unknown names or names that need
/// transverse components on the two-field system.
template <int Fields>
NodalState<Fields> make_guess(const std::string& name, const std::shared_ptr<const Mesh>& mesh, const ModelParams& p);

template <int Fields>
struct NamedGuess {
  std::string name;
  NodalState<Fields> state;
};

/// Deterministic list of the fixed guesses followed by random:<seed + i>
/// entries until `size` is reached; truncated when `size` is smaller.
template <int Fields>
std::vector<NamedGuess<Fields>> guess_suite(const std::shared_ptr<const Mesh>& mesh, const ModelParams& p, int size,
                                            std::uint64_t seed = 0);

/// Number of fixed (non-random) guesses in the suite.
template <int Fields>
int fixed_guess_count();

}  // namespace ferrobvp
