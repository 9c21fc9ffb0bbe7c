#pragma once

#include <cstdint>
#include <vector>

#include "ssmvep/dataset.hpp"
#include "ssmvep/freq_coding.hpp"

namespace ssmvep {

// Knobs of the synthetic evoked-EEG generator. The per-trial evoked response
// is a dual-frequency harmonic series, coherent across channels up to the
// channel gains; the noise mixes pink and white sources per channel.
struct SynthConfig {
  // Evoked power over noise power. The default is calibrated so that the
  // stock five-target benchmark (8 trials per class, 3.5 s windows) lands in
  // the 0.70..0.90 accuracy range for the plain CCA classifier.
  double snr_db = -22.5;
  bool noise_only = false;     // true: evoked amplitude exactly zero
  double dominance_low = 0.2;  // lower bound for the weaker peak's weight, in (0, 1]
  int n_harmonics = 2;
  double harmonic_decay = 0.5;  // amplitude ratio between consecutive harmonics
  double duration = 3.5;        // seconds
  double pink_fraction = 0.5;   // 1 = pink noise only, 0 = white only
  std::vector<double> channel_gains = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
};

// Zero-mean unit-power noise whose power density falls off as 1/f
// (white noise shaped in the frequency domain). n = 1 yields a zero sample.
std::vector<double> pink_noise(std::size_t n, std::uint64_t seed);

// Generator internals exposed for measurement: the evoked part is already
// scaled so that its power over the noise power meets SynthConfig::snr_db.
struct TrialParts {
  Eigen::MatrixXd evoked;
  Eigen::MatrixXd noise;
  double alpha_a = 0.0;  // dominance weight on the first pair frequency
  double alpha_b = 0.0;
};

TrialParts synth_trial_parts(const TargetPair& pair, const SynthConfig& config,
                             double sampling_rate, std::uint64_t seed);

TrialRecord synth_trial(const TargetPair& pair, int class_index, const SynthConfig& config,
                        double sampling_rate, std::uint64_t seed);

// Balanced dataset: trials_per_class trials for every plan target, each
// generated from a sub-seed derived from (master_seed, class, trial index).
Dataset synth_dataset(const FrequencyPlan& plan, const SynthConfig& config, int trials_per_class,
                      double sampling_rate, std::uint64_t master_seed);

nlohmann::json synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& j);

}  // namespace ssmvep
