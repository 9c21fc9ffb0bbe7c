#include "ssmvep/metrics.hpp"

#include <cmath>
#include <sstream>

#include "ssmvep/errors.hpp"

namespace ssmvep {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTol = 1e-12;
  constexpr double kTiny = 1e-300;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kTol) return h;
  }
  throw NumericalError("regularized_incomplete_beta: continued fraction did not converge");
}

double sample_mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (const double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

}  // namespace

EvalReport confusion_and_indices(const std::vector<int>& true_labels,
                                 const std::vector<int>& predicted_labels, int n_classes) {
  if (n_classes < 1) throw ValidationError("confusion_and_indices: need at least one class");
  if (true_labels.size() != predicted_labels.size()) {
    throw ValidationError("confusion_and_indices: label sequences differ in length");
  }
  if (true_labels.empty()) throw ValidationError("confusion_and_indices: no trials");

  EvalReport report;
  report.n_classes = n_classes;
  report.confusion = Eigen::MatrixXi::Zero(n_classes, n_classes);
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    const int t = true_labels[i];
    const int p = predicted_labels[i];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes) {
      std::ostringstream os;
      os << "confusion_and_indices: label (" << t << ", " << p << ") at trial " << i
         << " is outside [0, " << n_classes << ")";
      throw ValidationError(os.str());
    }
    report.confusion(t, p) += 1;
  }

  const auto total = static_cast<double>(true_labels.size());
  report.overall_accuracy = static_cast<double>(report.confusion.trace()) / total;

  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  for (int c = 0; c < n_classes; ++c) {
    const double tp = report.confusion(c, c);
    const double fn = report.confusion.row(c).sum() - tp;
    const double fp = report.confusion.col(c).sum() - tp;
    const double tn = total - tp - fn - fp;
    PerClassIndices pi;
    pi.sensitivity = ratio(tp, tp + fn);
    pi.specificity = ratio(tn, tn + fp);
    pi.precision = ratio(tp, tp + fp);
    pi.accuracy = (tp + tn) / total;
    report.per_class.push_back(pi);
  }
  return report;
}

double itr(double sigma, int n_classes, double t_seconds) {
  if (n_classes < 2) throw ValidationError("itr: need at least two classes");
  if (!(t_seconds > 0.0)) throw ValidationError("itr: selection period must be positive");
  if (!(sigma >= 0.0) || sigma > 1.0) throw ValidationError("itr: accuracy must lie in [0, 1]");

  const auto k = static_cast<double>(n_classes);
  // Grouping the log2(K) term into both branches makes the chance level
  // sigma = 1/K evaluate to exactly zero bits.
  double bits = 0.0;
  if (sigma > 0.0) bits += sigma * std::log2(k * sigma);
  if (sigma < 1.0) bits += (1.0 - sigma) * std::log2(k * (1.0 - sigma) / (k - 1.0));
  return 60.0 / t_seconds * bits;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ValidationError("regularized_incomplete_beta: shape parameters must be positive");
  }
  if (!(x >= 0.0) || x > 1.0) {
    throw ValidationError("regularized_incomplete_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) -
                                (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw ValidationError("anova_oneway: need at least two groups");
  std::size_t n_total = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < 2) {
      throw ValidationError("anova_oneway: group " + std::to_string(g) +
                            " has fewer than two values");
    }
    for (const double v : groups[g]) {
      if (!std::isfinite(v)) {
        throw ValidationError("anova_oneway: group " + std::to_string(g) +
                              " contains a non-finite value");
      }
    }
    n_total += groups[g].size();
  }

  double grand = 0.0;
  for (const auto& g : groups) {
    for (const double v : g) grand += v;
  }
  grand /= static_cast<double>(n_total);

  double ssb = 0.0;
  double ssw = 0.0;
  for (const auto& g : groups) {
    const double mean = sample_mean(g);
    ssb += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
    for (const double v : g) ssw += (v - mean) * (v - mean);
  }

  AnovaResult r;
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(n_total) - static_cast<int>(groups.size());
  if (ssw == 0.0) {
    throw NumericalError(
        "anova_oneway: zero within-group variance, the F statistic is undefined");
  }
  r.f = (ssb / r.df_between) / (ssw / r.df_within);
  const double d1 = r.df_between;
  const double d2 = r.df_within;
  r.p = regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * r.f));
  return r;
}

PairedTResult paired_t_greater(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("paired_t_greater: length mismatch");
  if (x.size() < 2) throw ValidationError("paired_t_greater: need at least two pairs");

  const auto n = static_cast<double>(x.size());
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  const double mean = sample_mean(d);
  double var = 0.0;
  for (const double v : d) var += (v - mean) * (v - mean);
  var /= (n - 1.0);
  if (var == 0.0) {
    throw NumericalError("paired_t_greater: zero variance in the paired differences");
  }

  PairedTResult r;
  r.df = static_cast<int>(x.size()) - 1;
  r.t = mean / std::sqrt(var / n);
  // Upper tail via t^2 ~ F(1, df); halve for the one-sided alternative.
  const double d2 = r.df;
  const double f_upper = regularized_incomplete_beta(d2 / 2.0, 0.5, d2 / (d2 + r.t * r.t));
  r.p = r.t > 0.0 ? f_upper / 2.0 : 1.0 - f_upper / 2.0;
  return r;
}

std::vector<double> default_sweep_windows() {
  return {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
}

std::vector<SweepPoint> time_window_sweep(const Dataset& dataset, const ClassifierConfig& config,
                                          const std::vector<double>& windows, TRule t_rule,
                                          double rest_seconds) {
  if (windows.empty()) throw ValidationError("time_window_sweep: no windows given");
  if (dataset.trials.empty()) throw ValidationError("time_window_sweep: dataset has no trials");
  if (!(rest_seconds >= 0.0)) {
    throw ValidationError("time_window_sweep: rest duration must be non-negative");
  }
  const double fs = dataset.sampling_rate;
  const Eigen::Index full = dataset.trials.front().samples.cols();
  for (const double w : windows) {
    if (!(w > 0.0)) throw ValidationError("time_window_sweep: windows must be positive");
    if (std::llround(w * fs) > full) {
      std::ostringstream os;
      os << "time_window_sweep: window " << w << " s needs " << std::llround(w * fs)
         << " samples but trials have " << full;
      throw ValidationError(os.str());
    }
  }

  const int n_classes = static_cast<int>(dataset.plan.pairs.size());
  std::vector<SweepPoint> out;
  for (const double w : windows) {
    const int m = static_cast<int>(std::llround(w * fs));
    const std::vector<TrialPrediction> preds = classify_dataset(dataset, config, m);
    std::vector<int> truth, guess;
    for (const TrialPrediction& p : preds) {
      truth.push_back(p.true_label);
      guess.push_back(p.predicted);
    }
    const EvalReport rep = confusion_and_indices(truth, guess, n_classes);
    SweepPoint point;
    point.window_seconds = w;
    point.accuracy = rep.overall_accuracy;
    const double t = t_rule == TRule::with_rest ? w + rest_seconds : w;
    point.itr_bits_per_min = itr(rep.overall_accuracy, n_classes, t);
    out.push_back(point);
  }
  return out;
}

}  // namespace ssmvep
