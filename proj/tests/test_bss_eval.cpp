#include <gtest/gtest.h>

#include "phoneval/bss_eval.hpp"
#include "phoneval/error.hpp"
#include "phoneval/noise.hpp"
#include "support.hpp"

using namespace phoneval;
using namespace phoneval::testing;

namespace {

// Columns are the reference delayed by k samples, truncated to n.
Eigen::MatrixXd shift_matrix(const Waveform& ref, std::size_t taps) {
  const auto n = static_cast<Eigen::Index>(ref.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(taps));
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(taps); ++k) {
    for (Eigen::Index t = k; t < n; ++t) a(t, k) = ref[static_cast<std::size_t>(t - k)];
  }
  return a;
}

Eigen::VectorXd project(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  return a * a.colPivHouseholderQr().solve(y);
}

Eigen::VectorXd as_vector(const Waveform& w) {
  return Eigen::Map<const Eigen::VectorXd>(w.samples().data(), static_cast<Eigen::Index>(w.size()));
}

double max_abs_diff(const Waveform& w, const Eigen::VectorXd& v) {
  return (as_vector(w) - v).cwiseAbs().maxCoeff();
}

Decomposition from_parts(std::vector<double> s, std::vector<double> i, std::vector<double> a) {
  return Decomposition{Waveform(std::move(s), 16000), Waveform(std::move(i), 16000),
                       Waveform(std::move(a), 16000), 1};
}

}  // namespace

TEST(BssDecompose, MatchesDenseLeastSquares) {
  const std::size_t n = 600, taps = 16;
  const auto s = gaussian_waveform(n, 1);
  const auto nz = gaussian_waveform(n, 2);
  const auto y = gaussian_waveform(n, 3);
  const auto d = decompose(y, s, nz, taps);

  const auto as = shift_matrix(s, taps);
  Eigen::MatrixXd joint(n, 2 * taps);
  joint << as, shift_matrix(nz, taps);
  const Eigen::VectorXd ps = project(as, as_vector(y));
  const Eigen::VectorXd psn = project(joint, as_vector(y));
  const double scale = as_vector(y).cwiseAbs().maxCoeff();
  EXPECT_LT(max_abs_diff(d.s_target, ps), 1e-7 * scale);
  EXPECT_LT(max_abs_diff(d.e_interf, psn - ps), 1e-7 * scale);
  EXPECT_LT(max_abs_diff(d.e_artif, as_vector(y) - psn), 1e-7 * scale);
}

TEST(BssDecompose, ReconstructsEstimate) {
  const auto s = gaussian_waveform(3000, 4);
  const auto nz = white_noise(3000, 5);
  const auto y = gaussian_waveform(3000, 6);
  const auto d = decompose(y, s, nz, 64);
  for (std::size_t t = 0; t < y.size(); ++t) {
    ASSERT_NEAR(d.s_target[t] + d.e_interf[t] + d.e_artif[t], y[t], 1e-9);
  }
}

TEST(BssDecompose, FilteredMixtureHasNoArtifacts) {
  const auto s = gaussian_waveform(4000, 7);
  const auto nz = gaussian_waveform(4000, 8);
  std::vector<double> y(4000, 0.0);
  for (std::size_t t = 0; t < y.size(); ++t) {
    y[t] = 0.8 * s[t] + (t >= 3 ? -0.3 * s[t - 3] : 0.0) + (t >= 10 ? 0.5 * nz[t - 10] : 0.0);
  }
  const auto d = decompose(Waveform(y, 16000), s, nz, 32);
  const auto m = metrics_from_decomposition(d);
  EXPECT_GT(m.sar_db, 60.0);
  // target energy 0.73 E, interferer 0.25 E
  EXPECT_NEAR(m.sir_db, 10.0 * std::log10(0.73 / 0.25), 0.2);
}

TEST(BssDecompose, OrthogonalReferencesClosedForm) {
  // Disjoint supports make every shifted column orthogonal at lag 0 with one tap.
  std::vector<double> s(8, 0.0), n(8, 0.0), y(8, 0.0);
  s[0] = 1.0;
  s[1] = 1.0;
  n[4] = 1.0;
  n[5] = -1.0;
  y = {2.0, 2.0, 0.0, 0.5, 3.0, -3.0, 0.0, 0.0};
  const auto d = decompose(Waveform(y, 16000), Waveform(s, 16000), Waveform(n, 16000), 1);
  const std::vector<double> st = {2, 2, 0, 0, 0, 0, 0, 0};
  const std::vector<double> ei = {0, 0, 0, 0, 3, -3, 0, 0};
  for (std::size_t t = 0; t < 8; ++t) {
    EXPECT_NEAR(d.s_target[t], st[t], 1e-8);
    EXPECT_NEAR(d.e_interf[t], ei[t], 1e-8);
    EXPECT_NEAR(d.e_artif[t], y[t] - st[t] - ei[t], 1e-8);
  }
}

TEST(BssMetrics, ClosedFormExample) {
  const auto d = from_parts({2, 0, 0}, {0, 1, 0}, {0, 0, 1});
  const auto m = metrics_from_decomposition(d);
  EXPECT_NEAR(m.sdr_db, 3.0103, 1e-4);
  EXPECT_NEAR(m.sir_db, 6.0206, 1e-4);
  EXPECT_NEAR(m.sar_db, 6.9897, 1e-4);
}

TEST(BssMetrics, Caps) {
  EXPECT_EQ(capped_ratio_db(0.0, 1.0), -kMetricCapDb);
  EXPECT_EQ(capped_ratio_db(1.0, 0.0), kMetricCapDb);
  EXPECT_EQ(capped_ratio_db(1.0, 1e-40), kMetricCapDb);
  EXPECT_EQ(capped_ratio_db(1e-40, 1.0), -kMetricCapDb);
  EXPECT_NEAR(capped_ratio_db(10.0, 1.0), 10.0, 1e-12);
  const auto clean = metrics_from_decomposition(from_parts({1, 2}, {0, 0}, {0, 0}));
  EXPECT_EQ(clean.sdr_db, kMetricCapDb);
  EXPECT_EQ(clean.sir_db, kMetricCapDb);
  EXPECT_EQ(clean.sar_db, kMetricCapDb);
}

TEST(BssMetrics, SegmentsUseRestrictedEnergies) {
  const auto d = from_parts({2, 0, 1, 1}, {0, 1, 1, 0}, {0, 0, 0, 1});
  const auto seg = segment_metrics(d, 2, 4);
  EXPECT_NEAR(seg.sir_db, 10.0 * std::log10(2.0 / 1.0), 1e-12);
  EXPECT_NEAR(seg.sdr_db, 10.0 * std::log10(2.0 / 2.0), 1e-12);
  const auto whole = segment_metrics(d, 0, 4);
  const auto all = metrics_from_decomposition(d);
  EXPECT_EQ(whole.sdr_db, all.sdr_db);
  EXPECT_THROW(segment_metrics(d, 2, 2), InvalidArgument);
  EXPECT_THROW(segment_metrics(d, 0, 5), InvalidArgument);
}

TEST(BssMetrics, SegmentEnergiesAreAdditive) {
  const auto s = gaussian_waveform(2000, 9);
  const auto nz = gaussian_waveform(2000, 10);
  const auto y = gaussian_waveform(2000, 11);
  const auto d = decompose(y, s, nz, 32);
  // 10^(SIR/10) weighted by interferer energy sums across a split
  const auto energy = [&](const Waveform& w, std::size_t a, std::size_t b) { return w.energy(a, b); };
  const double target = energy(d.s_target, 0, 700) + energy(d.s_target, 700, 2000);
  const double interf = energy(d.e_interf, 0, 700) + energy(d.e_interf, 700, 2000);
  EXPECT_NEAR(metrics_from_decomposition(d).sir_db, 10.0 * std::log10(target / interf), 1e-9);
}

TEST(BssProjector, IdempotentOnComponents) {
  const auto s = gaussian_waveform(1500, 12);
  const auto nz = gaussian_waveform(1500, 13);
  const auto y = gaussian_waveform(1500, 14);
  const BssProjector proj(s, nz, 24);
  const auto d = proj.decompose(y);
  const auto again = proj.decompose(d.s_target);
  EXPECT_LT(relative_l2(again.s_target.samples(), d.s_target.samples()), 1e-7);
  EXPECT_LT(std::sqrt(again.e_artif.energy() / d.s_target.energy()), 1e-7);
  const auto artif = proj.decompose(d.e_artif);
  EXPECT_LT(std::sqrt(artif.s_target.energy() / d.e_artif.energy()), 1e-7);
}

TEST(BssProjector, ScaleInvariantMetrics) {
  const auto s = gaussian_waveform(2500, 15);
  const auto nz = gaussian_waveform(2500, 16);
  std::vector<double> y(2500);
  const auto extra = gaussian_vector(2500, 17, 0.2);
  for (std::size_t t = 0; t < y.size(); ++t) y[t] = s[t] + 0.4 * nz[t] + extra[t];
  const Waveform est(y, 16000);
  const auto a = metrics_from_decomposition(decompose(est, s, nz, 32));
  const auto b = metrics_from_decomposition(decompose(est.scaled(7.0), s, nz, 32));
  const auto c = metrics_from_decomposition(decompose(est, s.scaled(0.1), nz.scaled(3.0), 32));
  EXPECT_NEAR(a.sdr_db, b.sdr_db, 1e-6);
  EXPECT_NEAR(a.sir_db, b.sir_db, 1e-6);
  EXPECT_NEAR(a.sar_db, b.sar_db, 1e-6);
  EXPECT_NEAR(a.sdr_db, c.sdr_db, 1e-6);
  EXPECT_NEAR(a.sir_db, c.sir_db, 1e-6);
}

TEST(BssProjector, ValidatesInputs) {
  const auto s = gaussian_waveform(100, 1);
  EXPECT_THROW(BssProjector(s, gaussian_waveform(99, 2), 8), DimensionError);
  EXPECT_THROW(BssProjector(s, gaussian_waveform(100, 2), 0), InvalidArgument);
  EXPECT_THROW(BssProjector(s, gaussian_waveform(100, 2), 101), InvalidArgument);
  EXPECT_THROW(BssProjector(Waveform::zeros(100, 16000), s, 8), InvalidArgument);
  const BssProjector p(s, gaussian_waveform(100, 2), 8);
  EXPECT_THROW(p.decompose(gaussian_waveform(50, 3)), DimensionError);
}

TEST(InputProtocol, ScoresReferenceChannelMixture) {
  // The unprocessed mixture lies in the joint span, so artifacts vanish and SDR tracks SIR.
  const auto s = gaussian_waveform(4000, 20);
  const auto nz = gaussian_waveform(4000, 21, 0.5);
  std::vector<double> y(4000);
  for (std::size_t t = 0; t < y.size(); ++t) y[t] = s[t] + nz[t];
  const auto m = metrics_from_decomposition(decompose(Waveform(y, 16000), s, nz, 16));
  EXPECT_NEAR(m.sdr_db, m.sir_db, 0.1);
  EXPECT_NEAR(m.sir_db, 10.0 * std::log10(s.energy() / nz.energy()), 0.2);
  EXPECT_GT(m.sar_db, 60.0);
}
