#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssmvep/pipeline.hpp"

namespace ssmvep {

struct PerClassIndices {
  double specificity = 0.0;
  double sensitivity = 0.0;
  double precision = 0.0;
  double accuracy = 0.0;
};

// Confusion rows are true labels, columns are predictions. The ITR and
// timing fields are filled by the evaluation layer, not by
// confusion_and_indices.
struct EvalReport {
  Eigen::MatrixXi confusion;
  std::vector<PerClassIndices> per_class;
  double overall_accuracy = 0.0;
  double itr_bits_per_min = 0.0;
  double window_seconds = 0.0;
  double trial_period_seconds = 0.0;
  int n_classes = 0;
};

// One-vs-rest indices per class. Ratios with an empty denominator
// (e.g. precision of a never-predicted class) are 0 by convention.
EvalReport confusion_and_indices(const std::vector<int>& true_labels,
                                 const std::vector<int>& predicted_labels, int n_classes);

// Information transfer rate in bits per minute for accuracy sigma over
// n_classes targets and a selection period of t_seconds. Exactly zero at
// chance level sigma = 1/n_classes.
double itr(double sigma, int n_classes, double t_seconds);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation
// converged to 1e-12.
double regularized_incomplete_beta(double a, double b, double x);

struct AnovaResult {
  double f = 0.0;
  double p = 1.0;
  int df_between = 0;
  int df_within = 0;
};

// One-way fixed-effects analysis of variance across the groups.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

struct PairedTResult {
  double t = 0.0;
  double p = 1.0;  // one-sided: evidence that mean(x) > mean(y)
  int df = 0;
};

// Paired one-sided t-test of H1: mean(x - y) > 0.
PairedTResult paired_t_greater(const std::vector<double>& x, const std::vector<double>& y);

enum class TRule {
  with_rest,    // T = window + rest_seconds (the definition)
  window_only,  // T = window (matches the published bits/min numbers)
};

struct SweepPoint {
  double window_seconds = 0.0;
  double accuracy = 0.0;
  double itr_bits_per_min = 0.0;
};

// The published sweep grid: 0.5 s to 4.0 s in 0.5 s steps.
std::vector<double> default_sweep_windows();

// Truncates every trial to round(window * fs) samples, classifies, and
// reports accuracy and ITR per window. Windows longer than the trials are
// rejected with the offending value named.
std::vector<SweepPoint> time_window_sweep(const Dataset& dataset, const ClassifierConfig& config,
                                          const std::vector<double>& windows, TRule t_rule,
                                          double rest_seconds = 2.5);

}  // namespace ssmvep
