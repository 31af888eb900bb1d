#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace cyclo::fft {

/// Smallest n >= target whose prime factors are 2, 3 and 5, and even.
std::size_t good_size(std::size_t target);

/// out[q] = sum_k H[k] e^{2 pi i k q / n} for the Hermitian sequence whose
/// first n/2 + 1 entries are `half`. `half` is consumed.
void inverse_real(std::vector<std::complex<double>>& half, std::vector<double>& out, std::size_t n);

/// out[k] = sum_t x[t] e^{-2 pi i k t / n}, k = 0..n/2, for real x of length n.
std::vector<std::complex<double>> forward_real(const std::vector<double>& x);

}  // namespace cyclo::fft
