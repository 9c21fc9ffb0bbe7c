#include "ssmvep/stimulus.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ssmvep/errors.hpp"
#include "ssmvep/text.hpp"

namespace ssmvep {

namespace {

constexpr std::int64_t kMaxFrames = std::int64_t{1} << 31;

// Fraction of the stimulation cycle at frame i, in [0, 1).
double cycle_fraction(double f, double refresh_rate, std::int64_t i) {
  double u = std::fmod(f * static_cast<double>(i) / refresh_rate, 1.0);
  if (u < 0.0) u += 1.0;
  return u;
}

void check_feasible(double f, double refresh_rate, int k_min_frames, const char* fn) {
  if (!(refresh_rate > 0.0) || !std::isfinite(refresh_rate)) {
    throw ValidationError(std::string(fn) + ": refresh rate must be positive");
  }
  if (k_min_frames < 1) {
    throw ValidationError(std::string(fn) + ": k_min_frames must be at least 1");
  }
  const double f_max = max_feasible_frequency(refresh_rate, k_min_frames);
  if (!(f > 0.0) || !std::isfinite(f) || f > f_max) {
    std::ostringstream os;
    os << fn << ": frequency " << f << " Hz is infeasible at " << refresh_rate
       << " Hz refresh; maximum admissible is " << f_max << " Hz";
    throw ValidationError(os.str());
  }
}

// Half-cosine sweep lo -> hi -> lo across one stimulation cycle; direction
// reverses exactly where the state sequence inverts.
double eased_parameter(double u, double lo, double hi) {
  return lo + (hi - lo) * (1.0 - std::cos(2.0 * std::numbers::pi * u)) / 2.0;
}

}  // namespace

double max_feasible_frequency(double refresh_rate, int k_min_frames) {
  return refresh_rate / static_cast<double>(k_min_frames);
}

std::vector<int> stimulus_sequence(double f_target, double refresh_rate, std::int64_t n_frames,
                                   int k_min_frames) {
  check_feasible(f_target, refresh_rate, k_min_frames, "stimulus_sequence");
  if (n_frames < 1) {
    throw ValidationError("stimulus_sequence: need at least one frame");
  }
  if (n_frames > kMaxFrames) {
    throw ValidationError("stimulus_sequence: frame count exceeds 2^31");
  }
  std::vector<int> seq(static_cast<std::size_t>(n_frames));
  for (std::int64_t i = 0; i < n_frames; ++i) {
    seq[static_cast<std::size_t>(i)] =
        cycle_fraction(f_target, refresh_rate, i) < 0.5 ? 1 : -1;
  }
  return seq;
}

double measured_inversion_frequency(const std::vector<int>& seq, double refresh_rate) {
  if (seq.size() < 2) {
    throw ValidationError("measured_inversion_frequency: need at least two frames");
  }
  if (!(refresh_rate > 0.0)) {
    throw ValidationError("measured_inversion_frequency: refresh rate must be positive");
  }
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] != 1 && seq[i] != -1) {
      std::ostringstream os;
      os << "measured_inversion_frequency: entry at index " << i << " is not +/-1";
      throw ValidationError(os.str());
    }
  }
  std::int64_t inversions = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i] != seq[i - 1]) ++inversions;
  }
  if (seq.back() != seq.front()) ++inversions;  // cyclic closure
  const double duration = static_cast<double>(seq.size()) / refresh_rate;
  return static_cast<double>(inversions) / (2.0 * duration);
}

std::vector<std::int64_t> run_lengths(const std::vector<int>& seq, bool keep_partial_tail) {
  std::vector<std::int64_t> runs;
  if (seq.empty()) return runs;
  std::int64_t len = 1;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i] == seq[i - 1]) {
      ++len;
    } else {
      runs.push_back(len);
      len = 1;
    }
  }
  if (keep_partial_tail) runs.push_back(len);
  return runs;
}

FrameSchedule dual_motion_schedule(const TargetPair& pair, double refresh_rate,
                                   double duration_seconds, double zoom_lo, double zoom_hi,
                                   int k_min_frames) {
  check_feasible(pair.a, refresh_rate, k_min_frames, "dual_motion_schedule");
  check_feasible(pair.b, refresh_rate, k_min_frames, "dual_motion_schedule");
  if (!(zoom_lo < zoom_hi)) {
    throw ValidationError("dual_motion_schedule: zoom range must satisfy lo < hi");
  }
  if (!(duration_seconds >= 0.0) || !std::isfinite(duration_seconds)) {
    throw ValidationError("dual_motion_schedule: duration must be finite and non-negative");
  }
  const std::int64_t n = std::llround(refresh_rate * duration_seconds);
  if (n < 1) {
    std::ostringstream os;
    os << "dual_motion_schedule: schedule is empty (" << duration_seconds << " s at "
       << refresh_rate << " Hz)";
    throw ValidationError(os.str());
  }

  FrameSchedule s;
  s.refresh_rate = refresh_rate;
  s.zoom_frequency = pair.a;
  s.rot_frequency = pair.b;
  s.duration_seconds = duration_seconds;
  s.zoom_lo = zoom_lo;
  s.zoom_hi = zoom_hi;

  const std::vector<int> zoom_states = stimulus_sequence(pair.a, refresh_rate, n, k_min_frames);
  const std::vector<int> rot_states = stimulus_sequence(pair.b, refresh_rate, n, k_min_frames);
  s.frames.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    FrameState& fr = s.frames[static_cast<std::size_t>(i)];
    fr.zoom_state = zoom_states[static_cast<std::size_t>(i)];
    fr.rot_state = rot_states[static_cast<std::size_t>(i)];
    fr.zoom_scale = eased_parameter(cycle_fraction(pair.a, refresh_rate, i), zoom_lo, zoom_hi);
    fr.rot_angle_deg =
        eased_parameter(cycle_fraction(pair.b, refresh_rate, i), kRotAngleLowDeg, kRotAngleHighDeg);
  }
  return s;
}

std::string schedule_to_csv(const FrameSchedule& s) {
  std::ostringstream os;
  os << "# refresh_rate=" << g9(s.refresh_rate) << " zoom_frequency=" << g9(s.zoom_frequency)
     << " rot_frequency=" << g9(s.rot_frequency) << " duration_seconds="
     << g9(s.duration_seconds) << "\n";
  os << "frame,zoom_state,rot_state,zoom_scale,rot_angle_deg\n";
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    const FrameState& fr = s.frames[i];
    os << i << "," << fr.zoom_state << "," << fr.rot_state << "," << g9(fr.zoom_scale) << ","
       << g9(fr.rot_angle_deg) << "\n";
  }
  return os.str();
}

}  // namespace ssmvep
