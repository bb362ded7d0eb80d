#pragma once

// Thin FFTW wrappers. Plans are created under a global mutex (the FFTW planner is not
// thread-safe); execution is reentrant.

#include <complex>
#include <vector>

namespace tsd::fourier {

/// Y_j = X_0 + (-1)^j X_{n-1} + 2 sum_{k=1}^{n-2} X_k cos(pi j k / (n-1)), unnormalized DCT-I.
std::vector<double> dct1(const std::vector<double>& x);

/// In-place 2-D complex DFT of an n x n row-major array, exponent sign `sign` (-1 forward, +1 backward).
void dft2(std::vector<std::complex<double>>& data, int n, int sign);

}  // namespace tsd::fourier
