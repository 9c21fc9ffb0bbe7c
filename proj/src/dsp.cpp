#include "ssmvep/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "ssmvep/errors.hpp"

namespace ssmvep {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// FFTW's planner is not thread safe; executing a plan is. Guard plan
// creation and destruction so callers may transform in parallel.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Chebyshev type I low-pass prototype, pass band edge at 1 rad/s.
void cheby1_prototype(int n, double ripple_db, std::vector<cd>& poles, double& gain) {
  const double eps = std::sqrt(std::pow(10.0, ripple_db / 10.0) - 1.0);
  const double mu = std::asinh(1.0 / eps) / static_cast<double>(n);
  poles.clear();
  cd prod(1.0, 0.0);
  for (int k = 0; k < n; ++k) {
    const double theta = kPi * static_cast<double>(2 * k + 1 - n) / (2.0 * n);
    const cd p(-std::sinh(mu) * std::cos(theta), -std::cosh(mu) * std::sin(theta));
    poles.push_back(p);
    prod *= -p;
  }
  gain = prod.real();
  if (n % 2 == 0) gain /= std::sqrt(1.0 + eps * eps);
}

// Split a conjugate-complete pole set into complex-conjugate pairs and pairs
// of real poles, ordered by ascending magnitude.
std::vector<std::pair<cd, cd>> pair_poles(std::vector<cd> poles) {
  std::vector<std::pair<cd, cd>> pairs;
  std::vector<cd> reals;
  std::vector<cd> upper;
  for (const cd& p : poles) {
    if (std::abs(p.imag()) < 1e-12 * std::max(1.0, std::abs(p.real()))) {
      reals.push_back(cd(p.real(), 0.0));
    } else if (p.imag() > 0.0) {
      upper.push_back(p);
    }
  }
  for (const cd& p : upper) pairs.emplace_back(p, std::conj(p));
  std::sort(reals.begin(), reals.end(), [](const cd& x, const cd& y) {
    return std::abs(x.real()) < std::abs(y.real());
  });
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) {
    pairs.emplace_back(reals[i], reals[i + 1]);
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
    return std::max(std::abs(x.first), std::abs(x.second)) <
           std::max(std::abs(y.first), std::abs(y.second));
  });
  return pairs;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

struct SosState {
  double z1 = 0, z2 = 0;
};

// Direct form II transposed.
void sosfilt_inplace(const std::vector<Biquad>& sections, std::vector<SosState>& state,
                     std::vector<double>& x) {
  for (std::size_t s = 0; s < sections.size(); ++s) {
    const Biquad& q = sections[s];
    double z1 = state[s].z1, z2 = state[s].z2;
    for (double& v : x) {
      const double y = q.b0 * v + z1;
      z1 = q.b1 * v - q.a1 * y + z2;
      z2 = q.b2 * v - q.a2 * y;
      v = y;
    }
    state[s].z1 = z1;
    state[s].z2 = z2;
  }
}

// Steady-state section states for a unit-level input, so a constant input
// produces the section's DC response from the first sample.
std::vector<SosState> sos_steady_state(const std::vector<Biquad>& sections) {
  std::vector<SosState> zi(sections.size());
  double scale = 1.0;
  for (std::size_t s = 0; s < sections.size(); ++s) {
    const Biquad& q = sections[s];
    const double denom = 1.0 + q.a1 + q.a2;
    if (denom == 0.0) throw NumericalError("filtfilt: section has zero DC denominator");
    const double h1 = (q.b0 + q.b1 + q.b2) / denom;
    zi[s].z1 = scale * (h1 - q.b0);
    zi[s].z2 = scale * (q.b2 - q.a2 * h1);
    scale *= h1;
  }
  return zi;
}

}  // namespace

FilterSpec design_cheby1_bandpass(double low_hz, double high_hz, int order, double ripple_db,
                                  double fs) {
  if (!(fs > 0.0)) throw ValidationError("design_cheby1_bandpass: sampling rate must be positive");
  if (!(low_hz > 0.0) || !(high_hz > low_hz) || !(high_hz < fs / 2.0)) {
    std::ostringstream os;
    os << "design_cheby1_bandpass: band edges must satisfy 0 < low < high < fs/2, got ["
       << low_hz << ", " << high_hz << "] at fs = " << fs;
    throw ValidationError(os.str());
  }
  if (order < 1 || order > 12) {
    throw ValidationError("design_cheby1_bandpass: order must be in [1, 12]");
  }
  if (!(ripple_db > 0.0)) {
    throw ValidationError("design_cheby1_bandpass: ripple must be positive");
  }

  std::vector<cd> proto;
  double gain = 0.0;
  cheby1_prototype(order, ripple_db, proto, gain);

  // Pre-warp the band edges so the bilinear map lands them exactly.
  const double wl = 2.0 * fs * std::tan(kPi * low_hz / fs);
  const double wh = 2.0 * fs * std::tan(kPi * high_hz / fs);
  const double w0 = std::sqrt(wl * wh);
  const double bw = wh - wl;

  // Low-pass -> band-pass: each prototype pole becomes two, n zeros move to
  // s = 0 and n stay at infinity.
  std::vector<cd> apoles;
  for (const cd& p : proto) {
    const cd q = p * (bw / 2.0);
    const cd disc = std::sqrt(q * q - cd(w0 * w0, 0.0));
    apoles.push_back(q + disc);
    apoles.push_back(q - disc);
  }
  double again = gain * std::pow(bw, order);

  // Bilinear transform; zeros at s=0 map to z=1, the ones at infinity to
  // z=-1.
  const double fs2 = 2.0 * fs;
  std::vector<cd> zpoles;
  cd denom_prod(1.0, 0.0);
  for (const cd& s : apoles) {
    zpoles.push_back((cd(fs2, 0.0) + s) / (cd(fs2, 0.0) - s));
    denom_prod *= cd(fs2, 0.0) - s;
  }
  const double zgain = again * std::pow(fs2, order) / denom_prod.real();
  if (!(zgain > 0.0) || !std::isfinite(zgain)) {
    throw NumericalError("design_cheby1_bandpass: degenerate gain in bilinear transform");
  }

  FilterSpec spec;
  spec.low_cut_hz = low_hz;
  spec.high_cut_hz = high_hz;
  spec.order = order;
  spec.passband_ripple_db = ripple_db;
  spec.sampling_rate = fs;

  const double section_gain = std::pow(zgain, 1.0 / static_cast<double>(order));
  for (const auto& [p1, p2] : pair_poles(zpoles)) {
    if (std::max(std::abs(p1), std::abs(p2)) >= 1.0) {
      throw NumericalError("design_cheby1_bandpass: design produced a pole outside the unit circle");
    }
    Biquad q;
    q.b0 = section_gain;
    q.b1 = 0.0;
    q.b2 = -section_gain;  // zeros at z = +1 and z = -1
    q.a1 = -(p1 + p2).real();
    q.a2 = (p1 * p2).real();
    spec.sections.push_back(q);
  }

  spec.numerator = {1.0};
  spec.denominator = {1.0};
  for (const Biquad& q : spec.sections) {
    spec.numerator = poly_mul(spec.numerator, {q.b0, q.b1, q.b2});
    spec.denominator = poly_mul(spec.denominator, {1.0, q.a1, q.a2});
  }
  return spec;
}

double filter_gain(const FilterSpec& spec, double f_hz) {
  const cd zinv = std::exp(cd(0.0, -2.0 * kPi * f_hz / spec.sampling_rate));
  cd h(1.0, 0.0);
  for (const Biquad& q : spec.sections) {
    h *= (q.b0 + (q.b1 + q.b2 * zinv) * zinv) / (1.0 + (q.a1 + q.a2 * zinv) * zinv);
  }
  return std::abs(h);
}

std::vector<double> filtfilt(const FilterSpec& spec, const std::vector<double>& x) {
  const std::size_t pad = 3 * (2 * static_cast<std::size_t>(spec.order) + 1);
  if (x.size() <= pad) {
    std::ostringstream os;
    os << "filtfilt: signal of length " << x.size() << " is too short; need more than " << pad
       << " samples";
    throw ValidationError(os.str());
  }

  const std::size_t n = x.size();
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * x[0] - x[pad - i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 2 - i]);

  const std::vector<SosState> zi = sos_steady_state(spec.sections);
  auto run = [&](std::vector<double>& sig) {
    std::vector<SosState> state = zi;
    for (SosState& st : state) {
      st.z1 *= sig.front();
      st.z2 *= sig.front();
    }
    sosfilt_inplace(spec.sections, state, sig);
  };

  // Both pass orders are applied and averaged. A single forward-then-backward
  // pass is not symmetric under time reversal: with poles close to the unit
  // circle the edge transients of the two orders differ by far more than the
  // reflection pad absorbs. The average makes the operator commute with
  // reversal exactly while keeping the same squared-magnitude response.
  std::vector<double> fwd = ext;
  run(fwd);
  std::reverse(fwd.begin(), fwd.end());
  run(fwd);
  std::reverse(fwd.begin(), fwd.end());

  std::vector<double> bwd = ext;
  std::reverse(bwd.begin(), bwd.end());
  run(bwd);
  std::reverse(bwd.begin(), bwd.end());
  run(bwd);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (fwd[pad + i] + bwd[pad + i]);
  return out;
}

std::vector<std::complex<double>> rfft(const std::vector<double>& x) {
  if (x.empty()) throw ValidationError("rfft: empty input");
  const int n = static_cast<int>(x.size());
  std::vector<double> in(x);
  std::vector<cd> out(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("rfft: planner failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& spectrum, int n) {
  if (n < 1 || spectrum.size() != static_cast<std::size_t>(n / 2 + 1)) {
    throw ValidationError("irfft: spectrum size must be n/2 + 1");
  }
  std::vector<cd> in(spectrum);
  std::vector<double> out(static_cast<std::size_t>(n));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(in.data()), out.data(),
                                FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("irfft: planner failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

PsdEstimate welch_psd(const std::vector<double>& x, double fs, int segment_length,
                      double overlap_fraction, const std::string& window) {
  if (!(fs > 0.0)) throw ValidationError("welch_psd: sampling rate must be positive");
  if (segment_length < 2) throw ValidationError("welch_psd: segment length must be at least 2");
  if (static_cast<std::size_t>(segment_length) > x.size()) {
    std::ostringstream os;
    os << "welch_psd: segment length " << segment_length << " exceeds signal length " << x.size();
    throw ValidationError(os.str());
  }
  if (!(overlap_fraction >= 0.0) || overlap_fraction > 0.9) {
    throw ValidationError("welch_psd: overlap fraction must be in [0, 0.9]");
  }

  const auto nseg_len = static_cast<std::size_t>(segment_length);
  std::vector<double> w(nseg_len);
  if (window == "hann") {
    for (std::size_t i = 0; i < nseg_len; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / segment_length);
    }
  } else if (window == "hamming") {
    for (std::size_t i = 0; i < nseg_len; ++i) {
      w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) / segment_length);
    }
  } else if (window == "boxcar") {
    std::fill(w.begin(), w.end(), 1.0);
  } else {
    throw ValidationError("welch_psd: unknown window \"" + window + "\"");
  }
  double win_power = 0.0;
  for (const double v : w) win_power += v * v;

  const auto noverlap = static_cast<std::size_t>(std::floor(segment_length * overlap_fraction));
  const std::size_t hop = nseg_len - noverlap;
  const std::size_t n_segments = 1 + (x.size() - nseg_len) / hop;
  const std::size_t n_bins = nseg_len / 2 + 1;

  std::vector<double> in(nseg_len);
  std::vector<cd> spec(n_bins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(segment_length, in.data(),
                                reinterpret_cast<fftw_complex*>(spec.data()),
                                FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("welch_psd: planner failed");

  std::vector<double> acc(n_bins, 0.0);
  for (std::size_t s = 0; s < n_segments; ++s) {
    const std::size_t off = s * hop;
    double mean = 0.0;
    for (std::size_t i = 0; i < nseg_len; ++i) mean += x[off + i];
    mean /= static_cast<double>(segment_length);
    for (std::size_t i = 0; i < nseg_len; ++i) in[i] = (x[off + i] - mean) * w[i];
    fftw_execute(plan);
    for (std::size_t k = 0; k < n_bins; ++k) acc[k] += std::norm(spec[k]);
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  PsdEstimate est;
  est.segment_length = segment_length;
  est.overlap_fraction = overlap_fraction;
  est.window = window;
  est.sampling_rate = fs;
  est.n_segments = static_cast<int>(n_segments);
  est.frequency.resize(n_bins);
  est.power.resize(n_bins);
  const double scale = 1.0 / (static_cast<double>(n_segments) * fs * win_power);
  for (std::size_t k = 0; k < n_bins; ++k) {
    est.frequency[k] = static_cast<double>(k) * fs / segment_length;
    double p = acc[k] * scale;
    const bool is_dc = (k == 0);
    const bool is_nyquist = (segment_length % 2 == 0) && (k == n_bins - 1);
    if (!is_dc && !is_nyquist) p *= 2.0;  // fold the negative frequencies
    est.power[k] = p;
  }
  return est;
}

}  // namespace ssmvep
