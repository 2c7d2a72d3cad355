#include "phoneval/bss_eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "phoneval/dsp.hpp"
#include "phoneval/error.hpp"

namespace phoneval {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Gram block G[k][l] = sum_t a[t-k] b[t-l] over t in [0, n) for truncated shifts.
// Row 0 and column 0 are plain cross-correlations; the remaining entries follow from
// G[k+1][l+1] = G[k][l] - a[n-1-k] b[n-1-l].
void fill_gram_block(std::span<const double> a, std::span<const double> b, std::size_t taps,
                     MatrixXd& g, Index row0, Index col0) {
  const long n = static_cast<long>(a.size());
  const long l = static_cast<long>(taps);
  // c(d) = sum_t a[t] b[t-d]; G[0][j] = c(j), G[i][0] = c(-i).
  const auto c = correlate(a, b, -(l - 1), l - 1);
  const auto at = [&](long d) { return c[static_cast<std::size_t>(d + l - 1)]; };
  for (long j = 0; j < l; ++j) g(row0, col0 + j) = at(j);
  for (long i = 1; i < l; ++i) g(row0 + i, col0) = at(-i);
  for (long i = 1; i < l; ++i) {
    for (long j = 1; j < l; ++j) {
      g(row0 + i, col0 + j) = g(row0 + i - 1, col0 + j - 1) - a[n - i] * b[n - j];
    }
  }
}

}  // namespace

struct BssProjector::Impl {
  Waveform speech;
  Waveform noise;
  std::size_t taps = 0;
  Eigen::LLT<MatrixXd> target_factor;
  Eigen::LLT<MatrixXd> joint_factor;
};

BssProjector::BssProjector(const Waveform& speech_ref, const Waveform& noise_ref,
                           std::size_t filter_length)
    : impl_(std::make_unique<Impl>()) {
  if (speech_ref.size() != noise_ref.size()) {
    throw DimensionError("bss: references differ in length (" + std::to_string(speech_ref.size()) +
                         " vs " + std::to_string(noise_ref.size()) + ")");
  }
  if (filter_length == 0) throw InvalidArgument("bss: filter_length must be >= 1");
  if (filter_length > speech_ref.size()) {
    throw InvalidArgument("bss: filter_length " + std::to_string(filter_length) +
                          " exceeds signal length " + std::to_string(speech_ref.size()));
  }
  const double es = speech_ref.energy();
  const double en = noise_ref.energy();
  if (!(es > 0.0)) throw InvalidArgument("bss: target reference has zero energy");
  if (!(en > 0.0)) throw InvalidArgument("bss: interferer reference has zero energy");

  impl_->speech = speech_ref;
  impl_->noise = noise_ref;
  impl_->taps = filter_length;
  const auto l = static_cast<Index>(filter_length);

  MatrixXd gram(2 * l, 2 * l);
  const auto s = speech_ref.samples();
  const auto nz = noise_ref.samples();
  fill_gram_block(s, s, filter_length, gram, 0, 0);
  fill_gram_block(s, nz, filter_length, gram, 0, l);
  fill_gram_block(nz, nz, filter_length, gram, l, l);
  gram.block(l, 0, l, l) = gram.block(0, l, l, l).transpose();
  gram.diagonal().array() += 1e-10 * std::max(es, en);

  impl_->target_factor.compute(gram.topLeftCorner(l, l));
  impl_->joint_factor.compute(gram);
  if (impl_->target_factor.info() != Eigen::Success ||
      impl_->joint_factor.info() != Eigen::Success) {
    throw NumericalError("bss: reference Gram matrix is not positive definite "
                         "(references linearly dependent?)");
  }
}

BssProjector::~BssProjector() = default;
BssProjector::BssProjector(BssProjector&&) noexcept = default;
BssProjector& BssProjector::operator=(BssProjector&&) noexcept = default;

std::size_t BssProjector::length() const noexcept { return impl_->speech.size(); }
std::size_t BssProjector::filter_length() const noexcept { return impl_->taps; }

Decomposition BssProjector::decompose(const Waveform& estimate) const {
  const auto& im = *impl_;
  const std::size_t n = im.speech.size();
  if (estimate.size() != n) {
    throw DimensionError("bss: estimate has " + std::to_string(estimate.size()) +
                         " samples, references have " + std::to_string(n));
  }
  const auto l = static_cast<Index>(im.taps);
  const long last = static_cast<long>(im.taps) - 1;
  // D[k] = sum_t y[t] ref[t-k], k = 0..L-1
  const auto ds = correlate(estimate.samples(), im.speech.samples(), 0, last);
  const auto dn = correlate(estimate.samples(), im.noise.samples(), 0, last);
  VectorXd rhs(2 * l);
  for (Index k = 0; k < l; ++k) {
    rhs(k) = ds[static_cast<std::size_t>(k)];
    rhs(l + k) = dn[static_cast<std::size_t>(k)];
  }
  const VectorXd target_coef = im.target_factor.solve(rhs.head(l));
  const VectorXd joint_coef = im.joint_factor.solve(rhs);

  const auto as_span = [](const VectorXd& v, Index offset, Index count) {
    return std::span<const double>(v.data() + offset, static_cast<std::size_t>(count));
  };
  const auto target = fir_filter(as_span(target_coef, 0, l), im.speech.samples());
  const auto joint_s = fir_filter(as_span(joint_coef, 0, l), im.speech.samples());
  const auto joint_n = fir_filter(as_span(joint_coef, l, l), im.noise.samples());

  std::vector<double> interf(n), artif(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double joint = joint_s[t] + joint_n[t];
    interf[t] = joint - target[t];
    artif[t] = estimate[t] - joint;
  }
  const int sr = estimate.sample_rate();
  return Decomposition{Waveform(target, sr), Waveform(std::move(interf), sr),
                       Waveform(std::move(artif), sr), im.taps};
}

Decomposition decompose(const Waveform& estimate, const Waveform& speech_ref,
                        const Waveform& noise_ref, std::size_t filter_length) {
  return BssProjector(speech_ref, noise_ref, filter_length).decompose(estimate);
}

double capped_ratio_db(double numerator, double denominator) {
  if (!(numerator > 0.0)) return -kMetricCapDb;
  if (!(denominator > 0.0)) return kMetricCapDb;
  return std::clamp(10.0 * std::log10(numerator / denominator), -kMetricCapDb, kMetricCapDb);
}

MetricTriple segment_metrics(const Decomposition& d, std::size_t start, std::size_t end) {
  if (start >= end || end > d.length()) {
    throw InvalidArgument("segment [" + std::to_string(start) + ", " + std::to_string(end) +
                          ") outside decomposition of length " + std::to_string(d.length()));
  }
  double target = 0.0, interf = 0.0, artif = 0.0, distortion = 0.0, cleaned = 0.0;
  for (std::size_t t = start; t < end; ++t) {
    const double s = d.s_target[t];
    const double i = d.e_interf[t];
    const double a = d.e_artif[t];
    target += s * s;
    interf += i * i;
    artif += a * a;
    distortion += (i + a) * (i + a);
    cleaned += (s + i) * (s + i);
  }
  return MetricTriple{capped_ratio_db(target, distortion), capped_ratio_db(target, interf),
                      capped_ratio_db(cleaned, artif)};
}

MetricTriple metrics_from_decomposition(const Decomposition& d) {
  if (d.length() == 0) return MetricTriple{-kMetricCapDb, -kMetricCapDb, -kMetricCapDb};
  return segment_metrics(d, 0, d.length());
}

MetricTriple input_metrics(const Scene& scene, Ear ear, std::size_t filter_length) {
  const auto& ref = reference_channel(ear);
  return metrics_from_decomposition(decompose(scene.mixture.channel(ref),
                                              scene.speech_image.channel(ref),
                                              scene.noise_image.channel(ref), filter_length));
}

}  // namespace phoneval
