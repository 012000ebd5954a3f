#pragma once

namespace vardet {

// Tolerance regimes used across the library.  Algebraic identities are held
// to 1e-10, PSD checks allow 1e-9 of eigenvalue slack, and anything that
// comes out of an iterative optimizer is only trusted to 1e-6.
inline constexpr double kAlgebraicTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kVarianceClamp = 1e-12;
inline constexpr double kDetectionMargin = 1e-9;
inline constexpr double kOptimizerTol = 1e-6;
inline constexpr double kRankCutoff = 1e-10;
inline constexpr double kIndependenceTol = 1e-8;

// Minimum number of optimizer restarts that must agree before an
// optimizer-derived floor is trusted as a detection bound.
inline constexpr int kMinAgreeingRestarts = 10;

}  // namespace vardet
