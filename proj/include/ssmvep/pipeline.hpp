#pragma once

#include <string>
#include <vector>

#include "ssmvep/cca.hpp"
#include "ssmvep/dataset.hpp"
#include "ssmvep/dsp.hpp"

namespace ssmvep {

// Per-trial processing settings: zero-phase band-pass, then correlation
// against the plan's reference bank.
struct ClassifierConfig {
  Classifier classifier = Classifier::bcca;
  int n_harmonics = 2;
  double ridge = kDefaultRidge;
  bool bandpass = true;
  double band_low_hz = 2.0;
  double band_high_hz = 40.0;
  int filter_order = 4;
  double ripple_db = 0.5;
};

// Zero-phase band-pass applied to every channel.
Eigen::MatrixXd preprocess(const Eigen::MatrixXd& samples, const FilterSpec& filter);

struct TrialPrediction {
  int trial_index = 0;
  int true_label = 0;
  int predicted = -1;                // -1 when the trial failed to process
  std::vector<TargetScores> scores;  // empty when the trial failed
  std::string error;                 // empty on success
};

// Classifies every trial of an in-memory dataset. Trials are band-pass
// filtered at full length; the analysis window is the first window_samples
// samples of the filtered signal (0 keeps full trials). All trials must
// share one sample count and sampling rate.
std::vector<TrialPrediction> classify_dataset(const Dataset& dataset,
                                              const ClassifierConfig& config,
                                              int window_samples = 0);

}  // namespace ssmvep
