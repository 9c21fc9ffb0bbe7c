#include "ssmvep/pipeline.hpp"

#include <sstream>

#include "ssmvep/errors.hpp"

namespace ssmvep {

Eigen::MatrixXd preprocess(const Eigen::MatrixXd& samples, const FilterSpec& filter) {
  Eigen::MatrixXd out(samples.rows(), samples.cols());
  std::vector<double> channel(static_cast<std::size_t>(samples.cols()));
  for (Eigen::Index c = 0; c < samples.rows(); ++c) {
    for (Eigen::Index i = 0; i < samples.cols(); ++i) {
      channel[static_cast<std::size_t>(i)] = samples(c, i);
    }
    const std::vector<double> filtered = filtfilt(filter, channel);
    for (Eigen::Index i = 0; i < samples.cols(); ++i) {
      out(c, i) = filtered[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

std::vector<TrialPrediction> classify_dataset(const Dataset& dataset,
                                              const ClassifierConfig& config,
                                              int window_samples) {
  if (dataset.trials.empty()) return {};
  const Eigen::Index full = dataset.trials.front().samples.cols();
  for (const TrialRecord& t : dataset.trials) {
    if (t.samples.cols() != full) {
      throw ValidationError("classify_dataset: trials have mixed lengths (" +
                            std::to_string(t.samples.cols()) + " vs " + std::to_string(full) +
                            " samples)");
    }
    if (t.sampling_rate != dataset.sampling_rate) {
      throw ValidationError("classify_dataset: trial sampling rate differs from the dataset");
    }
  }
  const int m = window_samples > 0 ? window_samples : static_cast<int>(full);
  if (m > full) {
    std::ostringstream os;
    os << "classify_dataset: window of " << m << " samples exceeds the trial length " << full;
    throw ValidationError(os.str());
  }

  const double fs = dataset.sampling_rate;
  FilterSpec filter;
  if (config.bandpass) {
    filter = design_cheby1_bandpass(config.band_low_hz, config.band_high_hz, config.filter_order,
                                    config.ripple_db, fs);
  }
  const ReferenceBank bank = build_reference_bank(dataset.plan, config.n_harmonics, fs, m);

  std::vector<TrialPrediction> out;
  out.reserve(dataset.trials.size());
  for (std::size_t i = 0; i < dataset.trials.size(); ++i) {
    const TrialRecord& trial = dataset.trials[i];
    TrialPrediction row;
    row.trial_index = static_cast<int>(i);
    row.true_label = trial.class_index;
    // The recording is cleaned at full length first; analysis windows are
    // cut from the filtered signal so that shortening the window does not
    // change the preprocessing.
    Eigen::MatrixXd cleaned =
        config.bandpass ? preprocess(trial.samples, filter) : trial.samples;
    const Decision d = classify_trial(cleaned.leftCols(m), bank, config.classifier, config.ridge);
    row.predicted = d.predicted;
    row.scores = d.scores;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace ssmvep
