#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ssmvep/cca.hpp"
#include "ssmvep/errors.hpp"
#include "ssmvep/freq_coding.hpp"
#include "ssmvep/rng.hpp"
#include "ssmvep/synth.hpp"

using namespace ssmvep;
using Eigen::MatrixXd;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal();
  }
  return m;
}

// Independent route to the largest canonical correlation: dense generalized
// eigensolve of Cxy Cyy^-1 Cyx v = rho^2 Cxx v on the same ridged covariances.
double cca_oracle(const MatrixXd& x, const MatrixXd& y, double ridge) {
  auto cov = [](const MatrixXd& a, const MatrixXd& b) {
    const MatrixXd ac = a.colwise() - a.rowwise().mean();
    const MatrixXd bc = b.colwise() - b.rowwise().mean();
    return MatrixXd(ac * bc.transpose() / static_cast<double>(a.cols() - 1));
  };
  MatrixXd cxx = cov(x, x);
  MatrixXd cyy = cov(y, y);
  const MatrixXd cxy = cov(x, y);
  cxx.diagonal().array() += ridge * cxx.trace() / static_cast<double>(cxx.rows());
  cyy.diagonal().array() += ridge * cyy.trace() / static_cast<double>(cyy.rows());
  const MatrixXd a = cxy * cyy.llt().solve(cxy.transpose());
  const Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(a, cxx);
  return std::sqrt(std::max(0.0, ges.eigenvalues().maxCoeff()));
}

bool same_matrix(const MatrixXd& a, const MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd ac = a.array() - a.mean();
  const Eigen::VectorXd bc = b.array() - b.mean();
  return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

}  // namespace

TEST_CASE("reference_signals: quarter-period lattice and shapes") {
  const MatrixXd y = reference_signals(25.0, 1, 100.0, 4);
  REQUIRE(y.rows() == 2);
  REQUIRE(y.cols() == 4);
  const double expect_cos[4] = {0.0, -1.0, 0.0, 1.0};
  const double expect_sin[4] = {1.0, 0.0, -1.0, 0.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(y(0, i) - expect_cos[i]) <= 1e-12);
    CHECK(std::abs(y(1, i) - expect_sin[i]) <= 1e-12);
  }

  const MatrixXd y95 = reference_signals(9.5, 2, 500.0, 1750);
  CHECK(y95.rows() == 4);
  CHECK(y95.cols() == 1750);
}

TEST_CASE("reference_signals: cos and sin rows are uncorrelated over whole periods") {
  // 10 Hz at 500 Hz over 500 samples spans ten full cycles.
  const MatrixXd y = reference_signals(10.0, 2, 500.0, 500);
  const double m = 500.0;
  for (int h = 0; h < 2; ++h) {
    const double c = pearson(y.row(2 * h).transpose(), y.row(2 * h + 1).transpose());
    CHECK(std::abs(c) < 2.0 / m);
  }
}

TEST_CASE("reference_signals: validation") {
  CHECK_THROWS_WITH_AS(reference_signals(9.5, 40, 500.0, 100), doctest::Contains("Nyquist"),
                       ValidationError);
  CHECK_THROWS_AS(reference_signals(0.0, 2, 500.0, 100), ValidationError);
  CHECK_THROWS_AS(reference_signals(10.0, 0, 500.0, 100), ValidationError);
  CHECK_THROWS_AS(reference_signals(10.0, 2, 500.0, 1), ValidationError);
}

TEST_CASE("bifold_references: concatenation structure") {
  const BifoldReferences refs = bifold_references(5.0, 8.5, 2, 500.0, 600);
  REQUIRE(refs.yc.rows() == 10);
  CHECK(same_matrix(refs.y1, reference_signals(5.0, 2, 500.0, 600)));
  CHECK(same_matrix(refs.y2, reference_signals(8.5, 2, 500.0, 600)));
  CHECK(same_matrix(refs.yc.topRows(4), refs.y1));
  CHECK(same_matrix(refs.yc.middleRows(4, 4), refs.y2));
  CHECK(same_matrix(refs.yc.bottomRows(2), reference_signals(13.5, 1, 500.0, 600)));

  const BifoldReferences equal = bifold_references(7.0, 7.0, 2, 500.0, 600);
  CHECK(same_matrix(equal.y1, equal.y2));

  // 130 + 130 = 260 Hz crosses Nyquist even though each frequency is fine.
  CHECK_THROWS_WITH_AS(bifold_references(130.0, 130.0, 1, 500.0, 600),
                       doctest::Contains("Nyquist"), ValidationError);
}

TEST_CASE("cca_max_corr: perfect correlation on identical signals") {
  Rng rng(5u);
  const MatrixXd x = random_matrix(1, 100, rng);
  const CcaResult r = cca_max_corr(x, x, 0.0);
  CHECK(r.rho == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cca_max_corr: sine projects onto its own basis") {
  const int m = 1750;
  MatrixXd x(1, m);
  for (int i = 0; i < m; ++i) x(0, i) = std::sin(kTau * 7.0 * (i + 1) / 500.0);
  const MatrixXd y = reference_signals(7.0, 1, 500.0, m);
  CHECK(cca_max_corr(x, y).rho > 0.999);
}

TEST_CASE("cca_max_corr: agrees with the generalized-eigenproblem oracle") {
  Rng rng(17u);
  for (int round = 0; round < 8; ++round) {
    const int k = 2 + static_cast<int>(rng.bits() % 5);
    const int r = 2 + static_cast<int>(rng.bits() % 5);
    const int m = 200 + static_cast<int>(rng.bits() % 200);
    MatrixXd x = random_matrix(k, m, rng);
    const MatrixXd y = random_matrix(r, m, rng);
    // Plant shared structure so rho is away from both 0 and 1.
    x.row(0) = 0.7 * x.row(0) + 0.9 * y.row(0);
    const double ridge = (round % 2 == 0) ? kDefaultRidge : 1e-3;
    const double rho = cca_max_corr(x, y, ridge).rho;
    const double ref = cca_oracle(x, y, ridge);
    CHECK(std::abs(rho - ref) <= 1e-8);
    CHECK(rho >= 0.0);
    CHECK(rho <= 1.0);
  }
}

TEST_CASE("cca_max_corr: projection weights give unit-variance components") {
  Rng rng(23u);
  const MatrixXd x = random_matrix(4, 500, rng);
  const MatrixXd y = random_matrix(3, 500, rng);
  const CcaResult r = cca_max_corr(x, y, 0.0);

  const Eigen::RowVectorXd px = r.w_x.transpose() * x;
  const Eigen::RowVectorXd py = r.w_y.transpose() * y;
  auto variance = [](const Eigen::RowVectorXd& v) {
    const Eigen::RowVectorXd c = v.array() - v.mean();
    return c.squaredNorm() / static_cast<double>(v.size() - 1);
  };
  CHECK(variance(px) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(variance(py) == doctest::Approx(1.0).epsilon(1e-8));
  // The achieved correlation of the projections is rho itself.
  CHECK(pearson(px.transpose(), py.transpose()) == doctest::Approx(r.rho).epsilon(1e-8));
}

TEST_CASE("cca_max_corr: invariances") {
  Rng rng(29u);
  const MatrixXd x = random_matrix(6, 800, rng);
  const MatrixXd y = reference_signals(8.0, 2, 500.0, 800);
  const double base0 = cca_max_corr(x, y, 0.0).rho;

  SUBCASE("invertible channel mixing, ridge 0") {
    const MatrixXd a = random_matrix(6, 6, rng);
    REQUIRE(std::abs(a.determinant()) > 1e-6);
    CHECK(std::abs(cca_max_corr(a * x, y, 0.0).rho - base0) <= 1e-8);
  }

  SUBCASE("positive scaling, default ridge") {
    const double base = cca_max_corr(x, y).rho;
    CHECK(std::abs(cca_max_corr(3.7 * x, y).rho - base) <= 1e-10);
    CHECK(std::abs(cca_max_corr(x, 0.2 * y).rho - base) <= 1e-10);
  }

  SUBCASE("argument symmetry") {
    CHECK(std::abs(cca_max_corr(y, x, 0.0).rho - base0) <= 1e-10);
    const double r1 = cca_max_corr(x, y).rho;
    const double r2 = cca_max_corr(y, x).rho;
    CHECK(std::abs(r1 - r2) <= 1e-10);
  }
}

TEST_CASE("cca_max_corr: null distribution stays low") {
  int below = 0;
  const int rounds = 100;
  for (int s = 0; s < rounds; ++s) {
    Rng rng(3000u + s);
    const MatrixXd x = random_matrix(6, 1750, rng);
    const MatrixXd y = random_matrix(4, 1750, rng);
    if (cca_max_corr(x, y).rho < 0.15) ++below;
  }
  CHECK(below >= 95);
}

TEST_CASE("cca_max_corr: validation and singularity") {
  Rng rng(31u);
  const MatrixXd x = random_matrix(3, 100, rng);
  const MatrixXd y = random_matrix(2, 99, rng);
  CHECK_THROWS_AS(cca_max_corr(x, y), ValidationError);

  const MatrixXd short_x = random_matrix(3, 3, rng);
  const MatrixXd short_y = random_matrix(2, 3, rng);
  CHECK_THROWS_AS(cca_max_corr(short_x, short_y), ValidationError);

  CHECK_THROWS_AS(cca_max_corr(x, random_matrix(2, 100, rng), -1.0), ValidationError);

  MatrixXd bad = random_matrix(3, 100, rng);
  bad(1, 50) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(cca_max_corr(bad, random_matrix(2, 100, rng)), ValidationError);

  // A constant channel has zero variance: singular at ridge 0, fine otherwise.
  MatrixXd flat = random_matrix(3, 100, rng);
  flat.row(0).setConstant(2.5);
  const MatrixXd other = random_matrix(2, 100, rng);
  CHECK_THROWS_WITH_AS(cca_max_corr(flat, other, 0.0), doctest::Contains("ridge"),
                       NumericalError);
  CHECK_NOTHROW(cca_max_corr(flat, other, kDefaultRidge));
}

TEST_CASE("classify: high-SNR trials land on the true class") {
  const FrequencyPlan plan = assign_target_pairs({5, 6, 7, 8, 9});
  SynthConfig cfg;
  cfg.snr_db = 40.0;
  cfg.dominance_low = 1.0;
  // plan.pairs[1] is (7, 5.5)
  const TrialRecord t = synth_trial(plan.pairs[1], 1, cfg, 500.0, 404u);

  const Decision bcca = classify_bcca(t, plan, 2);
  CHECK(bcca.predicted == 1);
  const Decision cca = classify_cca(t, plan, 2);
  CHECK(cca.predicted == 1);

  REQUIRE(bcca.scores.size() == 5);
  for (const TargetScores& s : bcca.scores) {
    CHECK(s.rho_a == (s.rho1 + s.rho2 + s.rho_c) / 3.0);
    CHECK(s.rho1 >= 0.0);
    CHECK(s.rho1 <= 1.0);
    CHECK(s.rho2 >= 0.0);
    CHECK(s.rho2 <= 1.0);
    CHECK(s.rho_c >= 0.0);
    CHECK(s.rho_c <= 1.0);
  }
  for (const TargetScores& s : cca.scores) {
    CHECK(std::isnan(s.rho1));
    CHECK(std::isnan(s.rho2));
    CHECK(s.rho_a == s.rho_c);
  }
}

TEST_CASE("classify: scores match the oracle on a synthetic trial") {
  const FrequencyPlan plan = assign_target_pairs({5, 6, 7, 8, 9});
  SynthConfig cfg;
  cfg.snr_db = -5.0;
  const TrialRecord t = synth_trial(plan.pairs[3], 3, cfg, 500.0, 75u);
  const Decision d = classify_bcca(t, plan, 2);
  const ReferenceBank bank = build_reference_bank(plan, 2, 500.0, 1750);
  for (std::size_t i = 0; i < bank.targets.size(); ++i) {
    CHECK(std::abs(d.scores[i].rho1 -
                   cca_oracle(t.samples, bank.targets[i].y1, kDefaultRidge)) <= 1e-8);
    CHECK(std::abs(d.scores[i].rho2 -
                   cca_oracle(t.samples, bank.targets[i].y2, kDefaultRidge)) <= 1e-8);
    CHECK(std::abs(d.scores[i].rho_c -
                   cca_oracle(t.samples, bank.targets[i].yc, kDefaultRidge)) <= 1e-8);
  }
}

TEST_CASE("classify: dominance skew keeps the prediction correct") {
  // All evoked energy on 9 Hz, the zoom frequency of target 3's pair (9, 7.5).
  const FrequencyPlan plan = assign_target_pairs({5, 6, 7, 8, 9});
  Rng rng(83u);
  const int m = 1750;
  MatrixXd x(6, m);
  for (int c = 0; c < 6; ++c) {
    for (int i = 0; i < m; ++i) {
      x(c, i) = std::sin(kTau * 9.0 * (i + 1) / 500.0 + 0.2 * c) + 0.05 * rng.normal();
    }
  }
  TrialRecord t;
  t.class_index = 3;
  t.sampling_rate = 500.0;
  t.channel_names = default_channel_names(6);
  t.samples = x;

  const Decision d = classify_bcca(t, plan, 2);
  CHECK(d.predicted == 3);
  CHECK(d.scores[3].rho1 > 0.9);
  CHECK(d.scores[3].rho2 < 0.5);
  CHECK(d.scores[3].rho1 - d.scores[3].rho2 > 0.4);
}

TEST_CASE("classify: prediction is invariant under channel mixing") {
  const FrequencyPlan plan = assign_target_pairs({5, 6, 7, 8, 9});
  SynthConfig cfg;
  cfg.snr_db = -5.0;
  const TrialRecord t = synth_trial(plan.pairs[4], 4, cfg, 500.0, 19u);

  Rng rng(57u);
  const MatrixXd a = random_matrix(6, 6, rng);
  REQUIRE(std::abs(a.determinant()) > 1e-6);
  TrialRecord mixed = t;
  mixed.samples = a * t.samples;

  const Decision d1 = classify_bcca(t, plan, 2, 0.0);
  const Decision d2 = classify_bcca(mixed, plan, 2, 0.0);
  CHECK(d1.predicted == d2.predicted);
  for (std::size_t i = 0; i < d1.scores.size(); ++i) {
    CHECK(std::abs(d1.scores[i].rho_a - d2.scores[i].rho_a) <= 1e-8);
  }
}

TEST_CASE("classify: duplicate targets tie-break to the lowest index") {
  FrequencyPlan plan = assign_target_pairs({5, 6, 7, 8, 9});
  plan.pairs = {{7.0, 5.5}, {7.0, 5.5}, {8.0, 6.5}};

  Rng rng(91u);
  const int m = 900;
  MatrixXd x(2, m);
  for (int i = 0; i < m; ++i) {
    x(0, i) = std::sin(kTau * 7.0 * (i + 1) / 500.0) + 0.2 * rng.normal();
    x(1, i) = std::cos(kTau * 7.0 * (i + 1) / 500.0) + 0.2 * rng.normal();
  }
  TrialRecord t;
  t.sampling_rate = 500.0;
  t.channel_names = default_channel_names(2);
  t.samples = x;

  for (const Classifier mode : {Classifier::cca, Classifier::bcca}) {
    const ReferenceBank bank = build_reference_bank(plan, 2, 500.0, m);
    const Decision d = classify_trial(x, bank, mode);
    CHECK(d.scores[0].rho_a == d.scores[1].rho_a);
    CHECK(d.scores[0].rho_a > d.scores[2].rho_a);
    CHECK(d.predicted == 0);
  }
}

TEST_CASE("classify: noise-only trials still yield a valid index") {
  const FrequencyPlan plan = assign_target_pairs({5, 6, 7, 8, 9});
  SynthConfig cfg;
  cfg.noise_only = true;
  const TrialRecord t = synth_trial(plan.pairs[0], 0, cfg, 500.0, 1u);
  const Decision d = classify_bcca(t, plan, 2);
  CHECK(d.predicted >= 0);
  CHECK(d.predicted < 5);
}

TEST_CASE("classify: short windows are rejected with a named error") {
  const FrequencyPlan plan = assign_target_pairs({5, 6, 7, 8, 9});
  TrialRecord t;
  t.sampling_rate = 500.0;
  t.channel_names = default_channel_names(6);
  t.samples = MatrixXd::Zero(6, 10);  // yc has 10 rows, so 10 samples is too short
  CHECK_THROWS_WITH_AS(classify_bcca(t, plan, 2), doctest::Contains("short"), ValidationError);

  const ReferenceBank bank = build_reference_bank(plan, 2, 500.0, 1750);
  CHECK_THROWS_AS(classify_trial(MatrixXd::Zero(6, 900), bank, Classifier::bcca),
                  ValidationError);
}
