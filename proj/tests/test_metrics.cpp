#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "ssmvep/errors.hpp"
#include "ssmvep/metrics.hpp"
#include "ssmvep/rng.hpp"
#include "ssmvep/synth.hpp"

using namespace ssmvep;

namespace {

// Adaptive Simpson quadrature, an integration route independent of the
// continued fraction under test.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fb,
               double fm, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double split = left + right;
  if (depth <= 0 || std::abs(split - whole) < 15.0 * tol) {
    return split + (split - whole) / 15.0;
  }
  return simpson(f, a, m, fa, fm, flm, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, fb, frm, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  return simpson(f, a, b, f(a), f(b), f(m), tol, 40);
}

// I_x(a, b) by direct quadrature of the beta density.
double inc_beta_oracle(double a, double b, double x) {
  const double ln_norm = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  auto density = [&](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - ln_norm);
  };
  // Integrand endpoints can be singular (a < 1 or b < 1); nudge inward.
  const double lo = 1e-13;
  const double hi = std::min(x, 1.0 - 1e-13);
  return integrate(density, lo, hi, 1e-11);
}

double two_sample_pooled_t(const std::vector<double>& x, const std::vector<double>& y) {
  auto mean = [](const std::vector<double>& v) {
    double acc = 0;
    for (const double e : v) acc += e;
    return acc / static_cast<double>(v.size());
  };
  const double mx = mean(x);
  const double my = mean(y);
  double ss = 0;
  for (const double e : x) ss += (e - mx) * (e - mx);
  for (const double e : y) ss += (e - my) * (e - my);
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double sp2 = ss / (nx + ny - 2.0);
  return (mx - my) / std::sqrt(sp2 * (1.0 / nx + 1.0 / ny));
}

}  // namespace

TEST_CASE("confusion_and_indices: hand-counted two-class example") {
  const EvalReport r = confusion_and_indices({0, 0, 1, 1}, {0, 1, 1, 1}, 2);
  REQUIRE(r.per_class.size() == 2);
  CHECK(r.confusion(0, 0) == 1);
  CHECK(r.confusion(0, 1) == 1);
  CHECK(r.confusion(1, 0) == 0);
  CHECK(r.confusion(1, 1) == 2);
  CHECK(r.overall_accuracy == 0.75);

  CHECK(r.per_class[0].sensitivity == 0.5);
  CHECK(r.per_class[0].specificity == 1.0);
  CHECK(r.per_class[0].precision == 1.0);
  CHECK(r.per_class[0].accuracy == 0.75);

  CHECK(r.per_class[1].sensitivity == 1.0);
  CHECK(r.per_class[1].specificity == 0.5);
  CHECK(r.per_class[1].precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.per_class[1].accuracy == 0.75);
}

TEST_CASE("confusion_and_indices: perfect predictions give all ones") {
  const std::vector<int> labels = {0, 1, 2, 3, 4, 2, 1, 0, 4, 3};
  const EvalReport r = confusion_and_indices(labels, labels, 5);
  CHECK(r.overall_accuracy == 1.0);
  for (const PerClassIndices& pi : r.per_class) {
    CHECK(pi.sensitivity == 1.0);
    CHECK(pi.specificity == 1.0);
    CHECK(pi.precision == 1.0);
    CHECK(pi.accuracy == 1.0);
  }
}

TEST_CASE("confusion_and_indices: never-predicted class has precision 0") {
  const EvalReport r = confusion_and_indices({0, 1}, {0, 0}, 2);
  CHECK(r.per_class[1].precision == 0.0);
  CHECK(r.per_class[1].sensitivity == 0.0);
  CHECK(r.overall_accuracy == 0.5);
}

TEST_CASE("confusion_and_indices: balanced macro sensitivity equals accuracy") {
  Rng rng(7u);
  const int k = 5;
  const int per_class = 12;
  std::vector<int> truth, pred;
  for (int c = 0; c < k; ++c) {
    for (int i = 0; i < per_class; ++i) {
      truth.push_back(c);
      pred.push_back(static_cast<int>(rng.bits() % k));
    }
  }
  const EvalReport r = confusion_and_indices(truth, pred, k);
  double macro = 0;
  for (const PerClassIndices& pi : r.per_class) macro += pi.sensitivity;
  macro /= k;
  CHECK(macro == doctest::Approx(r.overall_accuracy).epsilon(1e-12));
}

TEST_CASE("confusion_and_indices: validation") {
  CHECK_THROWS_AS(confusion_and_indices({0, 1}, {0}, 2), ValidationError);
  CHECK_THROWS_AS(confusion_and_indices({}, {}, 2), ValidationError);
  CHECK_THROWS_AS(confusion_and_indices({0, 2}, {0, 1}, 2), ValidationError);
  CHECK_THROWS_AS(confusion_and_indices({0, 1}, {0, -1}, 2), ValidationError);
}

TEST_CASE("itr: anchors, chance level, monotonicity, validation") {
  // The documented operating point: 92.5% over five targets in 3.5 s.
  CHECK(itr(0.925, 5, 3.5) == doctest::Approx(30.644855155900547).epsilon(1e-12));
  // Perfect accuracy anchors.
  CHECK(itr(1.0, 5, 6.0) == doctest::Approx(10.0 * std::log2(5.0)).epsilon(1e-12));
  CHECK(itr(1.0, 5, 6.0) == doctest::Approx(23.2193).epsilon(1e-4));
  CHECK(itr(1.0, 5, 3.5) == doctest::Approx(60.0 / 3.5 * std::log2(5.0)).epsilon(1e-12));

  for (int k = 2; k <= 10; ++k) {
    CHECK(itr(1.0 / k, k, 3.5) == 0.0);
    CHECK(itr(1.0 / k, k, 1.0) == 0.0);
  }

  for (int k : {2, 5, 8}) {
    double prev = itr(1.0 / k + 1e-9, k, 2.0);
    for (double sigma = 1.0 / k + 0.01; sigma <= 1.0 + 1e-12; sigma += 0.01) {
      const double cur = itr(std::min(sigma, 1.0), k, 2.0);
      CHECK(cur > prev);
      prev = cur;
    }
  }

  CHECK_THROWS_AS(itr(1.1, 5, 3.5), ValidationError);
  CHECK_THROWS_AS(itr(-0.1, 5, 3.5), ValidationError);
  CHECK_THROWS_AS(itr(0.9, 1, 3.5), ValidationError);
  CHECK_THROWS_AS(itr(0.9, 5, 0.0), ValidationError);
}

TEST_CASE("regularized incomplete beta: closed forms and quadrature oracle") {
  // I_x(3, 1) = x^3.
  CHECK(regularized_incomplete_beta(3.0, 1.0, 0.5) == doctest::Approx(0.125).epsilon(1e-12));
  // I_x(1, 1) = x.
  CHECK(regularized_incomplete_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(2.0, 5.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 5.0, 1.0) == 1.0);

  const double params[][2] = {{0.5, 0.5}, {1.0, 3.0}, {2.5, 7.0}, {10.0, 10.0}, {25.0, 25.0},
                              {1.5, 0.5}, {12.5, 2.0}};
  for (const auto& ab : params) {
    for (const double x : {0.05, 0.3, 0.5, 0.7, 0.95}) {
      const double got = regularized_incomplete_beta(ab[0], ab[1], x);
      const double want = inc_beta_oracle(ab[0], ab[1], x);
      CHECK(std::abs(got - want) <= 1e-6);
    }
  }

  // Complement symmetry: I_x(a, b) + I_{1-x}(b, a) = 1.
  CHECK(regularized_incomplete_beta(4.0, 9.0, 0.3) +
            regularized_incomplete_beta(9.0, 4.0, 0.7) ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), ValidationError);
  CHECK_THROWS_AS(regularized_incomplete_beta(1.0, 1.0, 1.5), ValidationError);
}

TEST_CASE("anova_oneway: hand-computed example and degenerate cases") {
  const AnovaResult r = anova_oneway({{1, 2, 3}, {2, 3, 4}, {3, 4, 5}});
  CHECK(r.f == 3.0);
  CHECK(r.df_between == 2);
  CHECK(r.df_within == 6);
  CHECK(r.p == doctest::Approx(0.125).epsilon(1e-9));

  const AnovaResult flat = anova_oneway({{1.0, 2.0}, {1.0, 2.0}, {2.0, 1.0}});
  CHECK(flat.f == 0.0);
  CHECK(flat.p == 1.0);

  CHECK_THROWS_AS(anova_oneway({{1.0, 2.0}}), ValidationError);
  CHECK_THROWS_AS(anova_oneway({{1.0, 2.0}, {3.0}}), ValidationError);
  CHECK_THROWS_AS(anova_oneway({{2.0, 2.0}, {2.0, 2.0}}), NumericalError);
}

TEST_CASE("anova_oneway: two groups reduce to the squared pooled t") {
  const std::vector<double> x = {4.1, 5.2, 3.9, 4.8, 5.5, 4.4};
  const std::vector<double> y = {3.2, 4.0, 3.7, 3.1, 4.3};
  const AnovaResult r = anova_oneway({x, y});
  const double t = two_sample_pooled_t(x, y);
  CHECK(r.f == doctest::Approx(t * t).epsilon(1e-12));
}

TEST_CASE("anova_oneway: shift and scale invariance of F") {
  const std::vector<std::vector<double>> groups = {{1.2, 2.1, 2.9}, {2.4, 3.3, 3.8}, {1.9, 2.2, 2.8}};
  const AnovaResult base = anova_oneway(groups);

  std::vector<std::vector<double>> shifted = groups;
  for (auto& g : shifted) {
    for (double& v : g) v += 11.75;
  }
  CHECK(anova_oneway(shifted).f == doctest::Approx(base.f).epsilon(1e-9));

  std::vector<std::vector<double>> scaled = groups;
  for (auto& g : scaled) {
    for (double& v : g) v *= 4.25;
  }
  CHECK(anova_oneway(scaled).f == doctest::Approx(base.f).epsilon(1e-12));
}

TEST_CASE("paired_t_greater: oracle check and symmetry") {
  const std::vector<double> x = {0.84, 0.79, 0.91, 0.86, 0.88, 0.90, 0.83};
  const std::vector<double> y = {0.80, 0.77, 0.85, 0.86, 0.84, 0.87, 0.80};
  const PairedTResult r = paired_t_greater(x, y);
  CHECK(r.df == 6);
  CHECK(r.t > 0.0);
  CHECK(r.p < 0.05);

  // p from the F upper tail must match direct integration of the density.
  const double d2 = r.df;
  const double upper = inc_beta_oracle(d2 / 2.0, 0.5, d2 / (d2 + r.t * r.t));
  CHECK(std::abs(r.p - upper / 2.0) <= 1e-6);

  const PairedTResult rev = paired_t_greater(y, x);
  CHECK(r.p + rev.p == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(paired_t_greater({1.0}, {2.0}), ValidationError);
  CHECK_THROWS_AS(paired_t_greater({1.0, 2.0}, {2.0}), ValidationError);
  CHECK_THROWS_AS(paired_t_greater({1.0, 2.0}, {1.0, 2.0}), NumericalError);
}

TEST_CASE("time_window_sweep: mechanics") {
  const FrequencyPlan plan = assign_target_pairs({5, 6, 7, 8, 9});
  SynthConfig cfg;
  cfg.snr_db = -4.0;  // easy
  cfg.duration = 2.0;
  const Dataset ds = synth_dataset(plan, cfg, 2, 500.0, 77u);

  ClassifierConfig cc;
  cc.classifier = Classifier::bcca;

  SUBCASE("full-window point matches the plain evaluation") {
    const std::vector<SweepPoint> sweep =
        time_window_sweep(ds, cc, {1.0, 2.0}, TRule::window_only);
    REQUIRE(sweep.size() == 2);
    CHECK(sweep[0].window_seconds == 1.0);
    CHECK(sweep[1].window_seconds == 2.0);

    const std::vector<TrialPrediction> preds = classify_dataset(ds, cc);
    std::vector<int> truth, guess;
    for (const TrialPrediction& p : preds) {
      truth.push_back(p.true_label);
      guess.push_back(p.predicted);
    }
    const EvalReport rep = confusion_and_indices(truth, guess, 5);
    CHECK(sweep[1].accuracy == rep.overall_accuracy);
    CHECK(sweep[1].itr_bits_per_min == itr(rep.overall_accuracy, 5, 2.0));
  }

  SUBCASE("T rule changes only the ITR") {
    const std::vector<SweepPoint> wo = time_window_sweep(ds, cc, {1.0}, TRule::window_only);
    const std::vector<SweepPoint> wr = time_window_sweep(ds, cc, {1.0}, TRule::with_rest, 2.5);
    CHECK(wo[0].accuracy == wr[0].accuracy);
    CHECK(wo[0].itr_bits_per_min == itr(wo[0].accuracy, 5, 1.0));
    CHECK(wr[0].itr_bits_per_min == itr(wr[0].accuracy, 5, 3.5));
  }

  SUBCASE("oversized window is rejected by name") {
    CHECK_THROWS_WITH_AS(time_window_sweep(ds, cc, {1.0, 2.5}, TRule::window_only),
                         doctest::Contains("2.5"), ValidationError);
  }

  SUBCASE("default grid is the published one") {
    CHECK(default_sweep_windows() ==
          std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0});
  }
}
