#pragma once

#include <complex>
#include <span>
#include <vector>

namespace valence {

/// One-sided DFT of a real sequence: n/2 + 1 bins, unnormalized.
std::vector<std::complex<double>> real_fft(std::span<const double> x);

}  // namespace valence
