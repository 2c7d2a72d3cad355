#include "phoneval/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "phoneval/error.hpp"
#include "phoneval/log.hpp"

namespace phoneval {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Mvdr: return "mvdr";
    case Algorithm::Mwf: return "mwf";
    case Algorithm::GevdMwf: return "gevd_mwf";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "mvdr") return Algorithm::Mvdr;
  if (name == "mwf") return Algorithm::Mwf;
  if (name == "gevd_mwf" || name == "gevd-mwf") return Algorithm::GevdMwf;
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected mvdr, mwf, gevd_mwf)");
}

std::string_view to_string(Ear ear) { return ear == Ear::Left ? "L" : "R"; }

Ear parse_ear(std::string_view name) {
  if (name == "L" || name == "left") return Ear::Left;
  if (name == "R" || name == "right") return Ear::Right;
  throw ConfigError("unknown ear '" + std::string(name) + "' (expected L or R)");
}

Mask::Mask(Eigen::MatrixXd values) : values_(std::move(values)) {
  for (Eigen::Index t = 0; t < values_.rows(); ++t) {
    for (Eigen::Index f = 0; f < values_.cols(); ++f) {
      const double v = values_(t, f);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidArgument("mask entry (" + std::to_string(t) + ", " + std::to_string(f) +
                              ") = " + std::to_string(v) + " outside [0, 1]");
      }
    }
  }
}

Mask Mask::complement() const {
  return Mask((Eigen::MatrixXd::Ones(values_.rows(), values_.cols()) - values_).cwiseMax(0.0));
}

Mask Mask::ones(std::size_t frames, std::size_t bins) {
  return Mask(Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(frames),
                                    static_cast<Eigen::Index>(bins)));
}

Mask oracle_mask(const Spectrogram& speech_ref, const Spectrogram& noise_ref) {
  if (speech_ref.frames() != noise_ref.frames() || speech_ref.bins() != noise_ref.bins()) {
    throw DimensionError("oracle_mask: speech and noise spectrograms differ in shape");
  }
  constexpr double kEps = 1e-12;
  Eigen::MatrixXd m(speech_ref.frames(), speech_ref.bins());
  for (std::size_t t = 0; t < speech_ref.frames(); ++t) {
    for (std::size_t f = 0; f < speech_ref.bins(); ++f) {
      const double ps = std::norm(speech_ref(t, f));
      const double pn = std::norm(noise_ref(t, f));
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(f)) = ps / (ps + pn + kEps);
    }
  }
  return Mask(std::move(m));
}

CovarianceField masked_covariance(const MultichannelSpectrogram& x, const Mask& mask) {
  const std::size_t channels = x.num_channels();
  const std::size_t frames = x.frames();
  const std::size_t bins = x.bins();
  if (frames == 0) throw InvalidArgument("masked_covariance: no frames");
  if (mask.frames() != frames || mask.bins() != bins) {
    throw DimensionError("masked_covariance: mask is " + std::to_string(mask.frames()) + "x" +
                         std::to_string(mask.bins()) + ", spectrogram is " +
                         std::to_string(frames) + "x" + std::to_string(bins));
  }
  const auto m = static_cast<Eigen::Index>(channels);
  const auto nt = static_cast<Eigen::Index>(frames);
  CovarianceField field{std::vector<ComplexMatrix>(bins), channels, frames};
  ComplexMatrix weighted(m, nt);
  ComplexMatrix plain(m, nt);
  for (std::size_t f = 0; f < bins; ++f) {
    for (Eigen::Index t = 0; t < nt; ++t) {
      const double w = mask(static_cast<std::size_t>(t), f);
      for (Eigen::Index c = 0; c < m; ++c) {
        const Complex v = x(static_cast<std::size_t>(c), static_cast<std::size_t>(t), f);
        plain(c, t) = v;
        weighted(c, t) = w * v;
      }
    }
    ComplexMatrix r = weighted * plain.adjoint() / static_cast<double>(frames);
    field.bins[f] = 0.5 * (r + r.adjoint());
  }
  return field;
}

ComplexMatrix diagonally_loaded(const ComplexMatrix& r, const Loading& loading) {
  const auto m = r.rows();
  const double trace = r.trace().real();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(r, Eigen::EigenvaluesOnly);
  const double smallest = eig.eigenvalues().minCoeff();
  const double floor = loading.relative * std::max(trace, 0.0) / static_cast<double>(m);
  const double delta = std::max(0.0, floor - smallest) + loading.absolute;
  return r + delta * ComplexMatrix::Identity(m, m);
}

namespace {

// Index of the largest-magnitude entry; lowest index wins near-ties.
Eigen::Index dominant_entry(const ComplexVector& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak * (1.0 - 1e-12)) return i;
  }
  return 0;
}

ComplexVector unit_vector(Eigen::Index size, std::size_t index) {
  ComplexVector e = ComplexVector::Zero(size);
  e(static_cast<Eigen::Index>(index)) = 1.0;
  return e;
}

}  // namespace

SteeringField steering_from_covariance(const CovarianceField& speech_cov, std::size_t reference) {
  const auto m = static_cast<Eigen::Index>(speech_cov.channels);
  if (reference >= speech_cov.channels) throw InvalidArgument("steering: reference out of range");
  SteeringField out;
  out.reserve(speech_cov.num_bins());
  std::size_t fallbacks = 0;
  for (const auto& r : speech_cov.bins) {
    if (r.norm() == 0.0) {
      out.push_back(unit_vector(m, reference));
      ++fallbacks;
      continue;
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(r);
    const auto& values = eig.eigenvalues();
    const double top = values(m - 1);
    const double tol = 1e-10 * std::max(std::abs(top), std::abs(values(0)));
    Eigen::Index multiplicity = 1;
    while (multiplicity < m && values(m - 1 - multiplicity) >= top - tol) ++multiplicity;

    ComplexVector d;
    if (multiplicity == 1) {
      d = eig.eigenvectors().col(m - 1);
    } else {
      // Degenerate top eigenspace: project unit vectors in channel order, keep the first.
      const ComplexMatrix basis = eig.eigenvectors().rightCols(multiplicity);
      for (Eigen::Index i = 0; i < m; ++i) {
        ComplexVector p = basis * basis.adjoint().col(i);
        if (p.norm() > 1e-6) {
          d = p;
          break;
        }
      }
    }
    d.normalize();
    const Eigen::Index anchor =
        std::abs(d(static_cast<Eigen::Index>(reference))) > 1e-12 ? static_cast<Eigen::Index>(reference)
                                                                   : dominant_entry(d);
    d *= std::conj(d(anchor)) / std::abs(d(anchor));
    d(anchor) = std::abs(d(anchor));
    out.push_back(std::move(d));
  }
  if (fallbacks > 0) {
    logger()->warn("steering: {} zero speech-covariance bin(s), using reference unit vector",
                   fallbacks);
  }
  return out;
}

namespace {

void check_finite(const ComplexVector& w, std::string_view who, std::size_t bin) {
  if (!w.allFinite()) {
    throw NumericalError(std::string(who) + ": non-finite weights at frequency bin " +
                         std::to_string(bin));
  }
}

}  // namespace

BeamformerWeights mvdr_weights(const CovarianceField& noise_cov, const SteeringField& steering,
                               const Loading& loading) {
  if (steering.size() != noise_cov.num_bins()) {
    throw DimensionError("mvdr: steering has " + std::to_string(steering.size()) +
                         " bins, covariance has " + std::to_string(noise_cov.num_bins()));
  }
  BeamformerWeights out{Algorithm::Mvdr, {}, 0, steering};
  out.weights.reserve(steering.size());
  for (std::size_t f = 0; f < steering.size(); ++f) {
    const auto& d = steering[f];
    if (d.size() != static_cast<Eigen::Index>(noise_cov.channels)) {
      throw DimensionError("mvdr: steering vector size mismatch at bin " + std::to_string(f));
    }
    const ComplexMatrix rn = diagonally_loaded(noise_cov.bins[f], loading);
    const ComplexVector x = rn.ldlt().solve(d);
    const Complex denom = d.dot(x);  // d^H x
    ComplexVector w = x / denom;
    check_finite(w, "mvdr", f);
    out.weights.push_back(std::move(w));
  }
  return out;
}

namespace {

ComplexVector wiener_solve(const ComplexMatrix& mixture_cov, const ComplexVector& rhs,
                           const Loading& loading) {
  return diagonally_loaded(mixture_cov, loading).ldlt().solve(rhs);
}

}  // namespace

BeamformerWeights mwf_weights(const CovarianceField& mixture_cov, const CovarianceField& speech_cov,
                              std::size_t reference, const Loading& loading) {
  if (mixture_cov.num_bins() != speech_cov.num_bins() ||
      mixture_cov.channels != speech_cov.channels) {
    throw DimensionError("mwf: covariance fields differ in shape");
  }
  if (reference >= mixture_cov.channels) throw InvalidArgument("mwf: reference out of range");
  BeamformerWeights out{Algorithm::Mwf, {}, reference, std::nullopt};
  out.weights.reserve(mixture_cov.num_bins());
  const auto ref = static_cast<Eigen::Index>(reference);
  for (std::size_t f = 0; f < mixture_cov.num_bins(); ++f) {
    ComplexVector w = wiener_solve(mixture_cov.bins[f], speech_cov.bins[f].col(ref), loading);
    check_finite(w, "mwf", f);
    out.weights.push_back(std::move(w));
  }
  return out;
}

ComplexMatrix gevd_speech_covariance(const ComplexMatrix& mixture_cov,
                                     const ComplexMatrix& loaded_noise_cov, std::size_t rank) {
  const auto m = mixture_cov.rows();
  Eigen::GeneralizedSelfAdjointEigenSolver<ComplexMatrix> ges(mixture_cov, loaded_noise_cov);
  if (ges.info() != Eigen::Success) {
    throw NumericalError("generalized eigendecomposition did not converge");
  }
  // Eigen sorts ascending and normalises q^H R_N q = 1, so Q^-1 = Q^H R_N.
  const auto& values = ges.eigenvalues();
  const ComplexMatrix& q = ges.eigenvectors();
  Eigen::VectorXd gains = Eigen::VectorXd::Zero(m);
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(rank); ++k) {
    const Eigen::Index idx = m - 1 - k;
    gains(idx) = std::max(values(idx) - 1.0, 0.0);
  }
  const ComplexMatrix rq = loaded_noise_cov * q;
  ComplexMatrix rs = rq * gains.asDiagonal() * rq.adjoint();
  return 0.5 * (rs + rs.adjoint());
}

BeamformerWeights gevd_mwf_weights(const CovarianceField& mixture_cov,
                                   const CovarianceField& noise_cov, std::size_t rank,
                                   std::size_t reference, const Loading& loading) {
  if (mixture_cov.num_bins() != noise_cov.num_bins() ||
      mixture_cov.channels != noise_cov.channels) {
    throw DimensionError("gevd_mwf: covariance fields differ in shape");
  }
  if (rank < 1 || rank > mixture_cov.channels) {
    throw InvalidArgument("gevd_mwf: rank must be in [1, " + std::to_string(mixture_cov.channels) +
                          "], got " + std::to_string(rank));
  }
  if (reference >= mixture_cov.channels) throw InvalidArgument("gevd_mwf: reference out of range");
  BeamformerWeights out{Algorithm::GevdMwf, {}, reference, std::nullopt};
  out.weights.reserve(mixture_cov.num_bins());
  const auto ref = static_cast<Eigen::Index>(reference);
  for (std::size_t f = 0; f < mixture_cov.num_bins(); ++f) {
    const auto& rx = mixture_cov.bins[f];
    const ComplexMatrix rn = diagonally_loaded(noise_cov.bins[f], loading);
    ComplexMatrix rs;
    try {
      rs = gevd_speech_covariance(rx, rn, rank);
    } catch (const NumericalError&) {
      logger()->warn("gevd_mwf: eigensolver failed at bin {}, using plain MWF there", f);
      rs = rx - noise_cov.bins[f];
    }
    ComplexVector w = wiener_solve(rx, rs.col(ref), loading);
    check_finite(w, "gevd_mwf", f);
    out.weights.push_back(std::move(w));
  }
  return out;
}

Spectrogram apply_weights(const BeamformerWeights& weights, const MultichannelSpectrogram& x) {
  if (weights.num_bins() != x.bins()) {
    throw DimensionError("apply_weights: " + std::to_string(weights.num_bins()) +
                         " weight bins for a " + std::to_string(x.bins()) + "-bin spectrogram");
  }
  Spectrogram out(x.frames(), x.bins());
  for (std::size_t f = 0; f < x.bins(); ++f) {
    const auto& w = weights.weights[f];
    if (w.size() != static_cast<Eigen::Index>(x.num_channels())) {
      throw DimensionError("apply_weights: weight vector size mismatch at bin " +
                           std::to_string(f));
    }
    for (std::size_t t = 0; t < x.frames(); ++t) {
      Complex acc = 0.0;
      for (std::size_t m = 0; m < x.num_channels(); ++m) {
        acc += std::conj(w(static_cast<Eigen::Index>(m))) * x(m, t, f);
      }
      out(t, f) = acc;
    }
  }
  return out;
}

std::vector<std::string> binaural_stack_order(Ear ear) {
  if (ear == Ear::Left) return {"L1", "L2", "R1", "R2"};
  return {"R1", "R2", "L1", "L2"};
}

const std::string& reference_channel(Ear ear) {
  static const std::string left = "L1";
  static const std::string right = "R1";
  return ear == Ear::Left ? left : right;
}

Waveform enhance_ear(const Scene& scene, Ear ear, Algorithm algorithm,
                     const EnhanceOptions& options) {
  const auto order = binaural_stack_order(ear);
  for (const auto& label : order) {
    if (!scene.mixture.has_channel(label)) {
      throw DimensionError("enhance: scene has no channel " + label +
                           " (expected L1, L2, R1, R2)");
    }
  }
  const auto x = stft(scene.mixture.select(order), options.stft);
  const auto& ref = order.front();
  const auto mask = oracle_mask(stft(scene.speech_image.channel(ref), options.stft),
                                stft(scene.noise_image.channel(ref), options.stft));

  BeamformerWeights weights;
  switch (algorithm) {
    case Algorithm::Mvdr: {
      const auto rs = masked_covariance(x, mask);
      const auto rn = masked_covariance(x, mask.complement());
      weights = mvdr_weights(rn, steering_from_covariance(rs, 0), options.loading);
      break;
    }
    case Algorithm::Mwf: {
      const auto rs = masked_covariance(x, mask);
      const auto rx = masked_covariance(x, Mask::ones(x.frames(), x.bins()));
      weights = mwf_weights(rx, rs, 0, options.loading);
      break;
    }
    case Algorithm::GevdMwf: {
      const auto rn = masked_covariance(x, mask.complement());
      const auto rx = masked_covariance(x, Mask::ones(x.frames(), x.bins()));
      weights = gevd_mwf_weights(rx, rn, options.gevd_rank, 0, options.loading);
      break;
    }
  }
  return istft(apply_weights(weights, x), options.stft, scene.length(), scene.sample_rate());
}

BinauralEstimate enhance_binaural(const Scene& scene, Algorithm algorithm,
                                  const EnhanceOptions& options) {
  return {enhance_ear(scene, Ear::Left, algorithm, options),
          enhance_ear(scene, Ear::Right, algorithm, options)};
}

}  // namespace phoneval
