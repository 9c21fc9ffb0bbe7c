#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssmvep/freq_coding.hpp"

namespace ssmvep {

// Rotation sweeps between these two angles (degrees); zoom limits come from
// configuration.
constexpr double kRotAngleLowDeg = -45.0;
constexpr double kRotAngleHighDeg = 75.0;

struct FrameState {
  int zoom_state = 0;  // +1 expanding, -1 contracting
  int rot_state = 0;   // +1 rotating toward the high angle, -1 back
  double zoom_scale = 0.0;
  double rot_angle_deg = 0.0;
};

struct FrameSchedule {
  double refresh_rate = 0.0;
  double zoom_frequency = 0.0;
  double rot_frequency = 0.0;
  double duration_seconds = 0.0;
  double zoom_lo = 0.0, zoom_hi = 0.0;
  std::vector<FrameState> frames;
};

// Highest motion frequency a display can render with at least `k_min_frames`
// frames of headroom: refresh_rate / k_min_frames.
double max_feasible_frequency(double refresh_rate, int k_min_frames);

// ±1 motion state per frame. Frame i carries the sign of the stimulation
// cycle phase f*i/refresh: +1 while the cycle fraction is in [0, 0.5), -1 in
// [0.5, 1). This equals the sign of sin(2*pi*f*i/refresh) everywhere except
// exact half-cycle boundaries, which are assigned to the half-cycle they
// open; that keeps state(0) = +1 and run lengths within two adjacent
// integers.
std::vector<int> stimulus_sequence(double f_target, double refresh_rate, std::int64_t n_frames,
                                   int k_min_frames = 3);

// Sign inversions per second divided by two. The window is treated
// cyclically (the last frame is compared with the first), so an integer
// number of motion cycles measures exactly; otherwise the estimate is within
// 1/duration of the true frequency.
double measured_inversion_frequency(const std::vector<int>& seq, double refresh_rate);

// Consecutive run lengths of the state sequence. The trailing run is usually
// cut off by the window end, so it is dropped unless `keep_partial_tail`.
std::vector<std::int64_t> run_lengths(const std::vector<int>& seq, bool keep_partial_tail = false);

// Frame-accurate schedule for one target: zoom at pair.a, rotation at
// pair.b, both phase-locked to frame 0. Within each half-cycle the
// continuous parameter sweeps its range monotonically with half-cosine
// easing and reverses at each state inversion. Frame count is
// round(refresh_rate * duration).
FrameSchedule dual_motion_schedule(const TargetPair& pair, double refresh_rate,
                                   double duration_seconds, double zoom_lo = 0.8,
                                   double zoom_hi = 1.2, int k_min_frames = 3);

// Delimited text export: header comment, column names, one row per frame.
std::string schedule_to_csv(const FrameSchedule& s);

}  // namespace ssmvep
