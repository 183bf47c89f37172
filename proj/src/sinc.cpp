#include "smi/sinc.hpp"

#include <cmath>

#include "smi/errors.hpp"

namespace smi {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

double hamming(int64_t n, int64_t len) {
  return 0.54 - 0.46 * std::cos(kTwoPi * static_cast<double>(n) /
                                static_cast<double>(len - 1));
}
}  // namespace

Cutoffs cutoffs_from_params(double a, double b, const SincBankSpec& spec) {
  const double nyq = spec.sample_rate / 2.0;
  const double lo = spec.min_low_hz;
  const double hi = nyq - spec.margin_hz;

  const double span1 = hi - lo;
  const double u = std::fabs(a);
  const double t1 = std::tanh(u / span1);
  const double f1 = lo + span1 * t1;
  const double dt1_du = 1.0 - t1 * t1;
  const double sign_a = (a > 0.0) ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
  const double df1_da = dt1_du * sign_a;

  const double span2 = hi - f1;
  const double v = std::fabs(b) + spec.min_band_hz;
  const double t2 = std::tanh(v / span2);
  const double f2 = f1 + span2 * t2;
  const double dt2_dv = 1.0 - t2 * t2;
  const double sign_b = (b > 0.0) ? 1.0 : (b < 0.0 ? -1.0 : 0.0);
  // f2 depends on a through both f1 and span2:
  // df2/df1 = 1 - t2 + dt2*(v/span2)
  const double df2_df1 = 1.0 - t2 + dt2_dv * (v / span2);
  return Cutoffs{f1, f2, df1_da, df2_df1 * df1_da, dt2_dv * sign_b};
}

void params_for_cutoffs(double f1_hz, double f2_hz, const SincBankSpec& spec,
                        double* a, double* b) {
  const double nyq = spec.sample_rate / 2.0;
  const double lo = spec.min_low_hz;
  const double hi = nyq - spec.margin_hz;
  if (!(lo < f1_hz && f1_hz < f2_hz && f2_hz < hi))
    throw InvalidInputError("cutoffs outside representable band");
  const double span1 = hi - lo;
  *a = span1 * std::atanh((f1_hz - lo) / span1);
  const double span2 = hi - f1_hz;
  double v = span2 * std::atanh((f2_hz - f1_hz) / span2);
  if (v < spec.min_band_hz)
    throw InvalidInputError("band narrower than the minimum width");
  *b = v - spec.min_band_hz;
}

void band_pass_kernel(double f1_hz, double f2_hz, const SincBankSpec& spec,
                      std::span<double> out) {
  const int64_t len = spec.kernel_len;
  if (static_cast<int64_t>(out.size()) != len)
    throw InvalidInputError("kernel buffer length mismatch");
  const double F1 = f1_hz / spec.sample_rate;
  const double F2 = f2_hz / spec.sample_rate;
  const int64_t c = (len - 1) / 2;
  for (int64_t n = 0; n < len; ++n) {
    const double np = static_cast<double>(n - c);
    double v;
    if (n == c) {
      v = 2.0 * (F2 - F1);
    } else {
      v = (std::sin(kTwoPi * F2 * np) - std::sin(kTwoPi * F1 * np)) / (kPi * np);
    }
    out[static_cast<size_t>(n)] = v * hamming(n, len);
  }
}

void band_pass_kernel_grads(double f1_hz, double f2_hz, const SincBankSpec& spec,
                            std::span<double> d_f1, std::span<double> d_f2) {
  const int64_t len = spec.kernel_len;
  if (static_cast<int64_t>(d_f1.size()) != len ||
      static_cast<int64_t>(d_f2.size()) != len)
    throw InvalidInputError("kernel gradient buffer length mismatch");
  const double F1 = f1_hz / spec.sample_rate;
  const double F2 = f2_hz / spec.sample_rate;
  const double inv_sr = 1.0 / spec.sample_rate;
  const int64_t c = (len - 1) / 2;
  for (int64_t n = 0; n < len; ++n) {
    const double np = static_cast<double>(n - c);
    const double w = hamming(n, len);
    // d/dF [2F*sinc(2F n')] = 2*cos(2*pi*F*n'), continuous through n' = 0
    d_f2[static_cast<size_t>(n)] = 2.0 * std::cos(kTwoPi * F2 * np) * w * inv_sr;
    d_f1[static_cast<size_t>(n)] = -2.0 * std::cos(kTwoPi * F1 * np) * w * inv_sr;
  }
}

}  // namespace smi
