#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssmvep/dataset.hpp"
#include "ssmvep/freq_coding.hpp"

namespace ssmvep {

// Regularization weight applied as ridge * trace/dim on each auto-covariance.
// Short windows with 10-row references are ill-conditioned without it.
inline constexpr double kDefaultRidge = 1e-6;

// Harmonic sine-cosine basis: rows alternate cos(2 pi h f t), sin(2 pi h f t)
// for h = 1..n_harmonics, with t = 1/fs, 2/fs, ..., m/fs. 2*n_harmonics rows.
Eigen::MatrixXd reference_signals(double f, int n_harmonics, double fs, int m);

// Per-target reference set for the bifold classifier: one basis per pair
// frequency plus their concatenation extended with the sum-frequency pair.
struct BifoldReferences {
  Eigen::MatrixXd y1;  // basis at the zoom frequency, 2*N_h x m
  Eigen::MatrixXd y2;  // basis at the rotation frequency, 2*N_h x m
  Eigen::MatrixXd yc;  // [y1; y2; cos/sin of f1+f2], (4*N_h + 2) x m
};

BifoldReferences bifold_references(double f1, double f2, int n_harmonics, double fs, int m);

// Immutable per-plan reference set, shareable across threads and trials.
struct ReferenceBank {
  std::vector<BifoldReferences> targets;
  int n_harmonics = 0;
  double sampling_rate = 0.0;
  int window_samples = 0;
};

ReferenceBank build_reference_bank(const FrequencyPlan& plan, int n_harmonics, double fs, int m);

struct CcaResult {
  double rho = 0.0;     // largest canonical correlation, clamped to [0, 1]
  Eigen::VectorXd w_x;  // projection weights; w'X and w'Y have unit variance
  Eigen::VectorXd w_y;
};

// Largest canonical correlation between the row spaces of X (K x m) and
// Y (r x m). Rows are mean-centered; covariances use 1/(m-1); ridge scales
// with trace/dim. A rank-deficient auto-covariance at ridge = 0 raises a
// numerical error suggesting ridge > 0.
CcaResult cca_max_corr(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                       double ridge = kDefaultRidge);

// Per-target correlations. The plain-CCA classifier fills only rho_c and
// mirrors it into rho_a (rho1 and rho2 stay NaN); the bifold classifier
// fills all three and rho_a = (rho1 + rho2 + rho_c) / 3.
struct TargetScores {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double rho_c = 0.0;
  double rho_a = 0.0;
};

struct Decision {
  std::vector<TargetScores> scores;  // one entry per plan target
  int predicted = 0;                 // argmax of rho_a; ties go to the lowest index
};

enum class Classifier { cca, bcca };

// Shared core: scores `samples` against every target of a prebuilt bank.
Decision classify_trial(const Eigen::MatrixXd& samples, const ReferenceBank& bank,
                        Classifier classifier, double ridge = kDefaultRidge);

// Single combined reference per target: decision by rho_c alone.
Decision classify_cca(const TrialRecord& trial, const FrequencyPlan& plan, int n_harmonics,
                      double ridge = kDefaultRidge);

// Bifold decision by rho_a. Unsupervised; no training state.
Decision classify_bcca(const TrialRecord& trial, const FrequencyPlan& plan, int n_harmonics,
                       double ridge = kDefaultRidge);

}  // namespace ssmvep
