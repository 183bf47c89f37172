#pragma once

#include <complex>
#include <span>
#include <vector>

namespace smi::dsp {

// Real-input FFT, n/2+1 bins. FFTW planning is serialized internally, so
// these are safe to call from worker threads.
std::vector<std::complex<double>> rfft(std::span<const double> x);

// Inverse of rfft; n is the time-domain length. Output scaled by 1/n.
std::vector<double> irfft(std::span<const std::complex<double>> spectrum, int64_t n);

// |X_k|^2 / n for k = 0..n/2.
std::vector<double> periodogram(std::span<const double> x);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // population
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace smi::dsp
