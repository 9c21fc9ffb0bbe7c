#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ssmvep {

// Frequency-pair coding for dual-motion targets. Each target carries two
// concurrent motions at distinct frequencies: `a` drives the radial zoom,
// `b` drives the reciprocal rotation.
struct TargetPair {
  double a = 0.0;
  double b = 0.0;
};

struct PlanViolation {
  std::string kind;  // "bounds" | "duplicate" | "adjacency" | "structure"
  std::string message;
};

// pairs[i] drives target i (0-based internally; printed labels are 1-based).
struct FrequencyPlan {
  std::vector<double> base;     // ascending stimulation frequencies f_1..f_N
  std::vector<double> derived;  // companion frequencies g_1..g_N
  double min_half_gap = 0.0;    // M = min_i (f_{i+1} - f_i) / 2
  std::vector<TargetPair> pairs;
  double f_lo = 2.0;  // admissible band for every frequency in the plan
  double f_hi = 40.0;
};

// derived[i] = (base[i] + base[i+1]) / 2 for i < N-1; derived[N-1] = base[N-1] + M.
// Requires at least two ascending, positive frequencies.
std::vector<double> derive_adjacent_frequencies(const std::vector<double>& base);

double min_half_gap(const std::vector<double>& base);

// Builds the full plan: derived frequencies plus the cyclic pair assignment
//   a = [f_1, f_3, f_4, ..., f_N, f_2]
//   b = [g_{N-1}, g_1, g_2, ..., g_{N-2}, g_N]
// so that any two targets share at most one adjacent frequency. Requires
// N >= 5; smaller sets cannot avoid double adjacency under this scheme.
FrequencyPlan assign_target_pairs(const std::vector<double>& base, double f_lo = 2.0,
                                  double f_hi = 40.0);

// Checks bounds, the permutation structure of the pair lists, and the
// at-most-one-adjacency property between every two targets. Frequency
// equality uses a 1e-9 absolute tolerance. Returns all violations found.
std::vector<PlanViolation> validate_plan(const FrequencyPlan& plan);

// Lossless JSON round-trip of the plan document.
std::string plan_to_json(const FrequencyPlan& plan);
FrequencyPlan plan_from_json(const std::string& text);

}  // namespace ssmvep
