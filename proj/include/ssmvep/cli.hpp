#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssmvep/metrics.hpp"
#include "ssmvep/synth.hpp"

namespace ssmvep {

struct WelchSettings {
  double segment_seconds = 1.0;
  double overlap = 0.5;
};

// One static configuration document per run, layered defaults <- file <-
// command-line overrides. Shared settings (trial duration, harmonic count,
// channel list) live here once and are mirrored into the generator and
// classifier settings by resolve().
struct RunConfig {
  std::vector<double> base_frequencies = {5.0, 6.0, 7.0, 8.0, 9.0};
  double refresh_rate = 60.0;
  double sampling_rate = 500.0;
  std::vector<std::string> channels = {"Pz", "PO7", "PO3", "PO4", "PO8", "Oz"};
  double trial_duration = 3.5;  // seconds
  double rest_duration = 2.5;   // seconds, enters the with-rest ITR period
  int trials_per_class = 8;
  int n_harmonics = 2;
  TRule t_rule = TRule::with_rest;
  std::uint64_t master_seed = 1;
  ClassifierConfig classifier;
  SynthConfig synth;
  WelchSettings welch;
};

// Mirrors the shared fields into the nested configs and validates the
// result. Channel gains sized for a different channel count are an error
// unless they are all ones, which simply follow the channel list.
RunConfig resolve(RunConfig cfg);

// The full resolved document with stable key order; feeding the output back
// through run_config_from_json reproduces the config exactly.
nlohmann::json run_config_to_json(const RunConfig& cfg);

// Layers the document over the defaults. Unknown keys and wrong types are
// rejected with the offending key named.
RunConfig run_config_from_json(const nlohmann::json& j);

RunConfig load_run_config(const std::string& path);

const char* classifier_name(Classifier c);
Classifier classifier_from_name(const std::string& name);
const char* t_rule_name(TRule r);
TRule t_rule_from_name(const std::string& name);

// Per-trial outcome rows as stored in a predictions file, plus the header
// echo needed to evaluate them without touching the classifier again.
struct PredictionsFile {
  nlohmann::json config_echo;
  std::string dataset_dir;
  std::string classifier;
  double window_seconds = 0.0;
  int window_samples = 0;
  double sampling_rate = 0.0;
  std::vector<TrialPrediction> rows;  // scores stay empty on load
};

PredictionsFile load_predictions(const std::string& path);

struct ClassifyOutcome {
  int n_trials = 0;
  int n_failed = 0;  // trials that could not be read; named in the file
  std::string summary;
};

// Each command reads its inputs from files written by earlier stages,
// writes its artifact(s), and returns a short human-readable summary.
// Failures surface as ValidationError / IoError / NumericalError.

// Builds the frequency plan from config, refuses to write one that fails
// validation.
std::string cmd_plan(const RunConfig& cfg, const std::string& out_path);

// Frame-accurate dual-motion schedule for one plan target.
// duration_seconds <= 0 picks the configured trial duration.
std::string cmd_schedule(const RunConfig& cfg, const std::string& plan_path, int target_index,
                         double duration_seconds, const std::string& out_path);

// Synthesizes a labeled dataset for the plan into a directory.
std::string cmd_synth(const RunConfig& cfg, const std::string& plan_path,
                      const std::string& out_dir);

// Classifies every trial of a stored dataset; a trial file that fails to
// load is reported in its row and the remaining trials are still
// classified. window_seconds <= 0 keeps full trials. Writes the predictions
// table and a per-target score dump next to it (suffix .scores.csv).
ClassifyOutcome cmd_classify(const RunConfig& cfg, const std::string& dataset_dir,
                             double window_seconds, const std::string& out_path);

// Accuracy / ITR summary, per-class indices, and pooled confusion tables
// over one or more (predictions, dataset) pairs. Runs of the same
// classifier aggregate into mean and standard deviation columns.
std::string cmd_evaluate(const RunConfig& cfg, const std::vector<std::string>& prediction_paths,
                         const std::vector<std::string>& dataset_dirs,
                         const std::string& out_prefix);

// Re-classifies stored datasets at several window lengths and tabulates
// seed-averaged accuracy and ITR per window. An empty window list uses the
// default grid clipped to the trial length.
std::string cmd_sweep(const RunConfig& cfg, const std::vector<std::string>& dataset_dirs,
                      std::vector<double> windows, const std::string& out_path);

// Class-averaged Welch spectra of a stored dataset, one file per class.
std::string cmd_psd(const RunConfig& cfg, const std::string& dataset_dir,
                    const std::string& out_prefix);

}  // namespace ssmvep
