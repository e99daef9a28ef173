#pragma once

// Reference values computed symbolically by tests/oracles/derive_values.py
// before any estimator code existed. Do not edit by hand; rerun the script.

namespace gradest::testing {

// OU dX = -th1 X dt + th2 dB, th = (1, 0.5), x0 = 1, T = 1, g = x^2.
inline constexpr double kOuValue = 0.24341837283203611;
inline constexpr double kOuDTheta1 = -0.34491983525949562;
inline constexpr double kOuDTheta2 = 0.43233235838169365;
inline constexpr double kOuDx = 0.27067056647322538;

// Birth-death lambda = (th1, th2 x), th = (10, 1), x0 = 0, T = 2, g = x.
inline constexpr double kBdMean = 8.6466471676338731;
inline constexpr double kBdDTheta1 = 0.86466471676338731;
inline constexpr double kBdDTheta2 = -5.9399415029016192;

// Euler GBM, N = 256, th1 = 0.1, x0 = 1, T = 1: d/dth1 of (1 + th1 dt)^N.
inline constexpr double kGbmEulerDTheta1 = 1.1047178081425754;

}  // namespace gradest::testing
