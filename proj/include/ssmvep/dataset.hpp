#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssmvep/freq_coding.hpp"

namespace ssmvep {

// One labeled multi-channel recording. `samples` is channels x samples.
// `seed` is set for generated trials and absent for imported recordings.
struct TrialRecord {
  int class_index = 0;
  double sampling_rate = 0.0;
  std::vector<std::string> channel_names;
  Eigen::MatrixXd samples;
  std::optional<std::uint64_t> seed;
};

// In-memory dataset. On disk this is a directory with manifest.json plus
// one delimited-text file per trial (rows = samples, columns = channels,
// nine significant digits). `generator` echoes the settings that produced
// the data and is kept verbatim in the manifest.
struct Dataset {
  double sampling_rate = 0.0;
  std::vector<std::string> channel_names;
  FrequencyPlan plan;
  nlohmann::json generator = nlohmann::json::object();
  std::vector<TrialRecord> trials;
};

// The six occipital/parietal electrodes for K = 6, generic labels otherwise.
std::vector<std::string> default_channel_names(std::size_t n);

struct TrialEntry {
  std::string file;  // path relative to the dataset directory
  int class_index = 0;
  std::optional<std::uint64_t> seed;
};

// Manifest contents without the sample matrices. Lets consumers load
// trials one at a time and survive individual corrupt files.
struct DatasetManifest {
  double sampling_rate = 0.0;
  std::vector<std::string> channel_names;
  FrequencyPlan plan;
  nlohmann::json generator = nlohmann::json::object();
  std::vector<TrialEntry> trials;
};

void save_dataset(const Dataset& dataset, const std::string& directory);

DatasetManifest load_manifest(const std::string& directory);

// Reads one trial file and checks it against the manifest (header matches
// the channel list, every cell parses to a finite number). Errors name the
// offending file.
TrialRecord load_trial(const std::string& directory, const DatasetManifest& manifest,
                       std::size_t trial_index);

// Strict load: any unreadable or corrupt trial file aborts the whole load.
Dataset load_dataset(const std::string& directory);

}  // namespace ssmvep
