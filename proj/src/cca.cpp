#include "ssmvep/cca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ssmvep/errors.hpp"

namespace ssmvep {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_below_nyquist(double f, double fs, const char* what) {
  if (f >= fs / 2.0) {
    std::ostringstream os;
    os << what << " at " << f << " Hz reaches the Nyquist frequency " << fs / 2.0 << " Hz";
    throw ValidationError(os.str());
  }
}

// Rows centered in place; returns C = A_c * B_c' / (m - 1).
Eigen::MatrixXd covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const auto m = static_cast<double>(a.cols());
  const Eigen::MatrixXd ac = a.colwise() - a.rowwise().mean();
  const Eigen::MatrixXd bc = b.colwise() - b.rowwise().mean();
  return ac * bc.transpose() / (m - 1.0);
}

Eigen::LLT<Eigen::MatrixXd> whiten(Eigen::MatrixXd cov, double ridge, const char* side) {
  const auto dim = static_cast<double>(cov.rows());
  if (ridge > 0.0) {
    cov.diagonal().array() += ridge * cov.trace() / dim;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "cca_max_corr: " << side
       << " covariance is singular or indefinite; rerun with ridge > 0";
    throw NumericalError(os.str());
  }
  return llt;
}

}  // namespace

Eigen::MatrixXd reference_signals(double f, int n_harmonics, double fs, int m) {
  if (!(f > 0.0)) throw ValidationError("reference_signals: frequency must be positive");
  if (n_harmonics < 1) throw ValidationError("reference_signals: n_harmonics must be at least 1");
  if (!(fs > 0.0)) throw ValidationError("reference_signals: sampling rate must be positive");
  if (m < 2) throw ValidationError("reference_signals: need at least two samples");
  check_below_nyquist(f * n_harmonics, fs, "reference_signals: top harmonic");

  Eigen::MatrixXd y(2 * n_harmonics, m);
  for (int h = 1; h <= n_harmonics; ++h) {
    const double w = kTwoPi * f * h;
    for (int i = 0; i < m; ++i) {
      const double t = static_cast<double>(i + 1) / fs;
      y(2 * (h - 1), i) = std::cos(w * t);
      y(2 * (h - 1) + 1, i) = std::sin(w * t);
    }
  }
  return y;
}

BifoldReferences bifold_references(double f1, double f2, int n_harmonics, double fs, int m) {
  BifoldReferences refs;
  refs.y1 = reference_signals(f1, n_harmonics, fs, m);
  refs.y2 = reference_signals(f2, n_harmonics, fs, m);
  check_below_nyquist(f1 + f2, fs, "bifold_references: sum frequency");
  const Eigen::MatrixXd sum_rows = reference_signals(f1 + f2, 1, fs, m);

  const int nh2 = 2 * n_harmonics;
  refs.yc.resize(2 * nh2 + 2, m);
  refs.yc.topRows(nh2) = refs.y1;
  refs.yc.middleRows(nh2, nh2) = refs.y2;
  refs.yc.bottomRows(2) = sum_rows;
  return refs;
}

ReferenceBank build_reference_bank(const FrequencyPlan& plan, int n_harmonics, double fs, int m) {
  if (plan.pairs.empty()) throw ValidationError("build_reference_bank: plan has no targets");
  ReferenceBank bank;
  bank.n_harmonics = n_harmonics;
  bank.sampling_rate = fs;
  bank.window_samples = m;
  for (const TargetPair& pair : plan.pairs) {
    bank.targets.push_back(bifold_references(pair.a, pair.b, n_harmonics, fs, m));
  }
  return bank;
}

CcaResult cca_max_corr(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double ridge) {
  if (X.rows() < 1 || Y.rows() < 1) throw ValidationError("cca_max_corr: empty matrix");
  if (X.cols() != Y.cols()) {
    throw ValidationError("cca_max_corr: X and Y must have the same number of samples");
  }
  if (X.cols() <= std::max(X.rows(), Y.rows())) {
    std::ostringstream os;
    os << "cca_max_corr: window of " << X.cols() << " samples is too short for "
       << std::max(X.rows(), Y.rows()) << " rows";
    throw ValidationError(os.str());
  }
  if (!X.allFinite() || !Y.allFinite()) {
    throw ValidationError("cca_max_corr: inputs must be finite");
  }
  if (!(ridge >= 0.0)) throw ValidationError("cca_max_corr: ridge must be non-negative");

  const Eigen::MatrixXd cxy = covariance(X, Y);
  const Eigen::LLT<Eigen::MatrixXd> lx = whiten(covariance(X, X), ridge, "X");
  const Eigen::LLT<Eigen::MatrixXd> ly = whiten(covariance(Y, Y), ridge, "Y");

  // rho = largest singular value of Lx^-1 Cxy Ly^-T.
  const Eigen::MatrixXd half = lx.matrixL().solve(cxy);
  const Eigen::MatrixXd whitened = ly.matrixL().solve(half.transpose()).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(whitened, Eigen::ComputeThinU | Eigen::ComputeThinV);

  CcaResult out;
  out.rho = std::clamp(svd.singularValues()(0), 0.0, 1.0);
  out.w_x = lx.matrixU().solve(svd.matrixU().col(0));
  out.w_y = ly.matrixU().solve(svd.matrixV().col(0));
  return out;
}

Decision classify_trial(const Eigen::MatrixXd& samples, const ReferenceBank& bank,
                        Classifier classifier, double ridge) {
  if (bank.targets.empty()) throw ValidationError("classify_trial: empty reference bank");
  const Eigen::Index m = samples.cols();
  const Eigen::Index ref_rows = bank.targets.front().yc.rows();
  if (m <= ref_rows) {
    std::ostringstream os;
    os << "classify_trial: window of " << m << " samples is too short; the combined reference has "
       << ref_rows << " rows";
    throw ValidationError(os.str());
  }
  if (m != bank.window_samples) {
    std::ostringstream os;
    os << "classify_trial: trial has " << m << " samples but the reference bank was built for "
       << bank.window_samples;
    throw ValidationError(os.str());
  }

  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  Decision decision;
  decision.scores.reserve(bank.targets.size());
  for (const BifoldReferences& refs : bank.targets) {
    TargetScores s;
    s.rho_c = cca_max_corr(samples, refs.yc, ridge).rho;
    if (classifier == Classifier::bcca) {
      s.rho1 = cca_max_corr(samples, refs.y1, ridge).rho;
      s.rho2 = cca_max_corr(samples, refs.y2, ridge).rho;
      s.rho_a = (s.rho1 + s.rho2 + s.rho_c) / 3.0;
    } else {
      s.rho1 = kNan;
      s.rho2 = kNan;
      s.rho_a = s.rho_c;
    }
    decision.scores.push_back(s);
  }

  decision.predicted = 0;
  for (std::size_t i = 1; i < decision.scores.size(); ++i) {
    if (decision.scores[i].rho_a > decision.scores[decision.predicted].rho_a) {
      decision.predicted = static_cast<int>(i);
    }
  }
  return decision;
}

namespace {

Decision classify_record(const TrialRecord& trial, const FrequencyPlan& plan, int n_harmonics,
                         double ridge, Classifier classifier) {
  const ReferenceBank bank = build_reference_bank(plan, n_harmonics, trial.sampling_rate,
                                                  static_cast<int>(trial.samples.cols()));
  return classify_trial(trial.samples, bank, classifier, ridge);
}

}  // namespace

Decision classify_cca(const TrialRecord& trial, const FrequencyPlan& plan, int n_harmonics,
                      double ridge) {
  return classify_record(trial, plan, n_harmonics, ridge, Classifier::cca);
}

Decision classify_bcca(const TrialRecord& trial, const FrequencyPlan& plan, int n_harmonics,
                       double ridge) {
  return classify_record(trial, plan, n_harmonics, ridge, Classifier::bcca);
}

}  // namespace ssmvep
