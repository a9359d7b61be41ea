#pragma once

namespace usdkit::tol {

// Fixed numeric tolerances used across the library. The CLI echoes these in
// the "tolerances" section of every report; only `orthogonality` can be
// overridden per invocation (--tol).

inline constexpr double svd_reconstruction = 1e-10;  // relative Frobenius
inline constexpr double hermiticity = 1e-10;         // relative to matrix scale
inline constexpr double singularity_rel = 1e-12;     // s_min <= this * s_max -> singular
inline constexpr double passivity_slack = 1e-12;     // spectral norm <= 1 + slack
inline constexpr double degeneracy_rel = 1e-8;       // singular value clustering
inline constexpr double orthogonality = 1e-8;        // discrimination checks
inline constexpr double equivalence_rel = 1e-9;      // singular value comparison
inline constexpr double population = 1e-9;           // |<g|v>| above this counts as populated
inline constexpr double rho_rank = 1e-10;            // numerical rank of rho_?
inline constexpr double schmidt_rank = 1e-12;        // lambda above this counts toward rank
inline constexpr double psd_negative = 1e-8;         // eigenvalue below -this is an error
inline constexpr double normalization = 1e-9;        // state norm / prior sum checks
inline constexpr int max_jacobi_sweeps = 64;

}  // namespace usdkit::tol
