#pragma once

#include <complex>
#include <span>

namespace mkdv::fft {

/// In-place unnormalized DFTs (FFTW backend, plans cached per size).
/// backward: x_m = sum_j X_j e^{+2*pi*i*j*m/M};  forward: the adjoint.
/// Thread safe: plan creation is locked, execution is not.
void backward(std::span<std::complex<double>> data);
void forward(std::span<std::complex<double>> data);

/// Smallest 5-smooth integer >= n (good FFTW sizes).
int fast_size(int n);

}  // namespace mkdv::fft
