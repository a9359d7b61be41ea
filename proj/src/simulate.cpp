#include "usdkit/simulate.hpp"

#include <cmath>
#include <random>

#include "usdkit/error.hpp"
#include "usdkit/numkernel.hpp"

namespace usdkit {

namespace {

// 53-bit uniform in [0, 1); avoids std::uniform_real_distribution whose
// output is implementation-defined.
double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

namespace rng {

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = 0;
  for (std::uint64_t i = 0; i <= index; ++i) {
    seed += 0x9E3779B97F4A7C15ULL;
    z = seed;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z = z ^ (z >> 31);
  }
  return z;
}

}  // namespace rng

std::uint64_t ShotResult::count_of(const std::string& label) const {
  for (const auto& [key, value] : counts) {
    if (key == label) return value;
  }
  return 0;
}

Dilation dilate(const LossyOperator& k) {
  if (!k.passive()) fail(ErrorCode::NotPassive, "dilation requires a passive operator");

  const int n = k.dim();
  const SvdResult& f = k.svd();
  std::vector<double> defect(n);
  for (int i = 0; i < n; ++i) {
    defect[i] = std::sqrt(std::max(0.0, 1.0 - f.singular_values[i] * f.singular_values[i]));
  }
  // D_c = V sqrt(I - S^2) V^dagger, D_r = U sqrt(I - S^2) U^dagger.
  ComplexMatrix sv(n, n), su(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      sv(i, j) = f.right_vectors(i, j) * defect[j];
      su(i, j) = f.left_vectors(i, j) * defect[j];
    }
  }
  const ComplexMatrix d_c = sv * f.right_vectors.adjoint();
  const ComplexMatrix d_r = su * f.left_vectors.adjoint();
  const ComplexMatrix k_adj = k.matrix().adjoint();

  ComplexMatrix u(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      u(i, j) = k.matrix()(i, j);
      u(i, n + j) = d_r(i, j);
      u(n + i, j) = d_c(i, j);
      u(n + i, n + j) = -k_adj(i, j);
    }
  }
  return Dilation{std::move(u), n};
}

std::vector<ShotResult> measure_usd(const LossyOperator& k, const StateSet& states,
                                    std::uint64_t shots, std::uint64_t seed, double ortho_tol) {
  if (!k.passive()) fail(ErrorCode::NotPassive, "sampling requires a passive operator");
  const int m = states.count();

  std::vector<Vector> inputs;
  inputs.reserve(m);
  for (int i = 0; i < m; ++i) {
    const Vector g = states.state(i);
    if (std::abs(norm(g) - 1.0) > tol::normalization) {
      fail(ErrorCode::NotNormalized, "input states must be normalized");
    }
    inputs.push_back(g);
  }

  const ComplexMatrix out_gram = gram(k.matrix() * states.states());
  if (normalized_offdiag_max(out_gram) > ortho_tol) {
    fail(ErrorCode::NotDiscriminated, "K does not map the set to orthogonal outputs");
  }

  // Conclusive outcome basis: the normalized images.
  std::vector<Vector> outcome_basis;
  outcome_basis.reserve(m);
  for (int i = 0; i < m; ++i) outcome_basis.push_back(normalized(k.matrix() * inputs[i]));

  std::vector<ShotResult> results;
  results.reserve(m);
  for (int i = 0; i < m; ++i) {
    const Vector image = k.matrix() * inputs[i];
    const double p_conclusive = std::min(1.0, norm(image) * norm(image));
    std::vector<double> branch(m);
    double branch_sum = 0.0;
    for (int j = 0; j < m; ++j) {
      branch[j] = std::norm(inner(outcome_basis[j], image));
      branch_sum += branch[j];
    }

    ShotResult r;
    r.shots = shots;
    r.seed = seed;
    std::vector<std::uint64_t> tally(m + 1, 0);  // last slot: inconclusive
    std::mt19937_64 gen(rng::splitmix64(seed, static_cast<std::uint64_t>(i)));
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
      const double u_branch = uniform01(gen);
      const double u_project = uniform01(gen);
      if (u_branch >= p_conclusive) {
        ++tally[m];
        continue;
      }
      double edge = 0.0;
      int outcome = m - 1;
      for (int j = 0; j < m; ++j) {
        edge += branch[j] / branch_sum;
        if (u_project < edge) {
          outcome = j;
          break;
        }
      }
      ++tally[outcome];
    }
    if (shots > 0) {
      for (int j = 0; j < m; ++j) r.counts.emplace_back(std::to_string(j), tally[j]);
      r.counts.emplace_back("inconclusive", tally[m]);
    }
    results.push_back(std::move(r));
  }
  return results;
}

ShotResult measure_distillation(const DistillationPlan& plan, std::uint64_t shots,
                                std::uint64_t seed) {
  ShotResult r;
  r.shots = shots;
  r.seed = seed;
  std::uint64_t success = 0;
  std::mt19937_64 gen(rng::splitmix64(seed, 0));
  for (std::uint64_t shot = 0; shot < shots; ++shot) {
    if (uniform01(gen) < plan.success_probability) ++success;
  }
  if (shots > 0) {
    r.counts.emplace_back("success", success);
    r.counts.emplace_back("failure", shots - success);
  }
  return r;
}

}  // namespace usdkit
