#pragma once

#include <complex>
#include <string>
#include <vector>

namespace ssmvep {

struct Biquad {
  double b0 = 0, b1 = 0, b2 = 0;  // numerator
  double a1 = 0, a2 = 0;          // denominator, a0 = 1
};

struct FilterSpec {
  double low_cut_hz = 0;
  double high_cut_hz = 0;
  int order = 0;  // analog prototype order; the band-pass carries 2*order poles
  double passband_ripple_db = 0;
  double sampling_rate = 0;
  std::vector<Biquad> sections;     // cascaded second-order realization
  std::vector<double> numerator;    // expanded transfer function
  std::vector<double> denominator;  // expanded, leading coefficient 1
};

// Chebyshev type I band-pass: analog prototype, band transform around the
// warped edges, bilinear mapping, second-order sections. The pass band
// [low_hz, high_hz] holds |H| within [-ripple_db, 0] dB; both stop bands
// decay monotonically.
FilterSpec design_cheby1_bandpass(double low_hz, double high_hz, int order, double ripple_db,
                                  double fs);

// |H(e^{i 2 pi f / fs})| evaluated on the cascaded sections.
double filter_gain(const FilterSpec& spec, double f_hz);

// Zero-phase forward-backward filtering. The signal is extended at both ends
// by odd-symmetric reflection of 3 * (2 * order + 1) samples, each pass
// starts from per-section steady state, and the two pass orders
// (forward-backward and backward-forward) are averaged, which makes the
// operator commute with time reversal exactly. Requires the signal to be
// longer than the extension.
std::vector<double> filtfilt(const FilterSpec& spec, const std::vector<double>& x);

struct PsdEstimate {
  std::vector<double> frequency;  // exactly k * fs / segment_length
  std::vector<double> power;      // one-sided density, signal^2 per Hz
  int segment_length = 0;
  double overlap_fraction = 0;
  std::string window;
  double sampling_rate = 0;
  int n_segments = 0;
};

// Welch average periodogram with per-segment mean removal and window power
// normalization. Windows: "hann" (default), "hamming", "boxcar".
PsdEstimate welch_psd(const std::vector<double>& x, double fs, int segment_length,
                      double overlap_fraction = 0.5, const std::string& window = "hann");

// Real FFT helpers (length n in, n/2+1 bins out; inverse normalizes by 1/n).
std::vector<std::complex<double>> rfft(const std::vector<double>& x);
std::vector<double> irfft(const std::vector<std::complex<double>>& spectrum, int n);

}  // namespace ssmvep
