#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "usdkit/distill.hpp"
#include "usdkit/lossy_operator.hpp"
#include "usdkit/tolerances.hpp"

namespace usdkit {

/// Unitary embedding of a passive K on system (+) ancilla:
///   U = [[K, sqrt(I - K K^dagger)], [sqrt(I - K^dagger K), -K^dagger]].
struct Dilation {
  ComplexMatrix unitary;  // 2N x 2N
  int system_dim = 0;
};

Dilation dilate(const LossyOperator& k);

/// Counts per outcome label, in outcome order (conclusive "0".."M-1", then
/// "inconclusive"; "success"/"failure" for distillation runs). Empty when
/// shots == 0. Identical inputs and seed give identical counts.
struct ShotResult {
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;

  std::uint64_t count_of(const std::string& label) const;
};

/// Projective sampling of the USD measurement, one result per input state.
/// State i draws from its own substream, mt19937_64 seeded with
/// splitmix64(seed, i). Each shot consumes exactly two uniforms: one for the
/// conclusive/inconclusive branch, one for the conclusive projection.
std::vector<ShotResult> measure_usd(const LossyOperator& k, const StateSet& states,
                                    std::uint64_t shots, std::uint64_t seed,
                                    double ortho_tol = tol::orthogonality);

/// Bernoulli sampling of the distillation filter; one uniform per shot.
ShotResult measure_distillation(const DistillationPlan& plan, std::uint64_t shots,
                                std::uint64_t seed);

namespace rng {

/// SplitMix64 stream derivation: the (index+1)-th output of the splitmix
/// sequence started at seed. Used to give every sampled state its own
/// deterministic substream.
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t index);

}  // namespace rng

}  // namespace usdkit
