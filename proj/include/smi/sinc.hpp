#pragma once

#include <cstdint>
#include <span>

namespace smi {

// Shape of the learnable band-pass front end. Cutoffs live in Hz; kernels are
// Hamming-windowed differences of two scaled sinc low-passes.
struct SincBankSpec {
  int64_t kernel_len = 129;  // odd
  double sample_rate = 16000.0;
  double min_low_hz = 30.0;    // lower bound for f1
  double margin_hz = 50.0;     // keep-out below Nyquist
  double min_band_hz = 1.0;    // f2 - f1 floor under the smooth clamp
};

struct Cutoffs {
  double f1_hz;
  double f2_hz;
  // partials of (f1, f2) w.r.t. the unconstrained parameters (a, b)
  double df1_da;
  double df2_da;
  double df2_db;
};

// Smoothly maps unconstrained (a, b) onto min_low_hz < f1 < f2 < Nyquist-margin.
// f1 = lo + span1*tanh(|a|/span1), f2 = f1 + span2*tanh((|b|+min_band)/span2).
Cutoffs cutoffs_from_params(double a, double b, const SincBankSpec& spec);

// Inverse of the map above for initialization at chosen band edges.
void params_for_cutoffs(double f1_hz, double f2_hz, const SincBankSpec& spec,
                        double* a, double* b);

// Symmetric zero-phase kernel: out[n] = (sin(2*pi*F2*n') - sin(2*pi*F1*n')) /
// (pi*n') * w[n] with F = f/sample_rate and n' centered; center tap
// 2*(F2-F1)*w[c]. f1 == f2 gives the zero kernel.
void band_pass_kernel(double f1_hz, double f2_hz, const SincBankSpec& spec,
                      std::span<double> out);

// Partials of the kernel w.r.t. the cutoffs in Hz:
// d out[n]/d f2 = (2/sr)*cos(2*pi*F2*n')*w[n], d/d f1 the negative analogue.
void band_pass_kernel_grads(double f1_hz, double f2_hz, const SincBankSpec& spec,
                            std::span<double> d_f1, std::span<double> d_f2);

}  // namespace smi
