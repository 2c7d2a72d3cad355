#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "phoneval/scene.hpp"
#include "phoneval/stft.hpp"

namespace phoneval {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

enum class Algorithm { Mvdr, Mwf, GevdMwf };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

enum class Ear { Left, Right };

std::string_view to_string(Ear ear);  // "L" / "R"
Ear parse_ear(std::string_view name);

/// Real-valued speech-presence weights in [0, 1], indexed (frame t, bin f).
class Mask {
 public:
  Mask() = default;
  explicit Mask(Eigen::MatrixXd values);

  [[nodiscard]] std::size_t frames() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  [[nodiscard]] std::size_t bins() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  [[nodiscard]] double operator()(std::size_t t, std::size_t f) const noexcept {
    return values_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(f));
  }
  [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }
  /// 1 - mask.
  [[nodiscard]] Mask complement() const;
  static Mask ones(std::size_t frames, std::size_t bins);

 private:
  Eigen::MatrixXd values_;
};

/// Ideal ratio mask |S|^2 / (|S|^2 + |N|^2 + eps) from the true reference-channel images.
Mask oracle_mask(const Spectrogram& speech_ref, const Spectrogram& noise_ref);

/// One Hermitian M x M matrix per frequency bin.
struct CovarianceField {
  std::vector<ComplexMatrix> bins;
  std::size_t channels = 0;
  std::size_t frames = 0;

  [[nodiscard]] std::size_t num_bins() const noexcept { return bins.size(); }
};

/// R(f) = 1/T sum_t mask(t,f) x(t,f) x(t,f)^H over all T frames.
CovarianceField masked_covariance(const MultichannelSpectrogram& x, const Mask& mask);

/// Relative and absolute diagonal loading constants.
struct Loading {
  double relative = 1e-6;
  double absolute = 1e-12;
};

/// R + delta I, where delta lifts the smallest eigenvalue of R to at least
/// relative * trace(R) / M, plus `absolute`. Well-conditioned matrices only get `absolute`.
ComplexMatrix diagonally_loaded(const ComplexMatrix& r, const Loading& loading = {});

using SteeringField = std::vector<ComplexVector>;

/// Principal eigenvector per bin, unit norm, with the reference entry real and >= 0.
/// Zero matrices fall back to the unit vector at `reference`.
SteeringField steering_from_covariance(const CovarianceField& speech_cov,
                                       std::size_t reference = 0);

struct BeamformerWeights {
  Algorithm algorithm = Algorithm::Mvdr;
  std::vector<ComplexVector> weights;
  std::size_t reference = 0;
  std::optional<SteeringField> steering;

  [[nodiscard]] std::size_t num_bins() const noexcept { return weights.size(); }
};

/// W = R~_N^-1 d / (d^H R~_N^-1 d).
BeamformerWeights mvdr_weights(const CovarianceField& noise_cov, const SteeringField& steering,
                               const Loading& loading = {});

/// W = R~_X^-1 R_S e_ref.
BeamformerWeights mwf_weights(const CovarianceField& mixture_cov, const CovarianceField& speech_cov,
                              std::size_t reference, const Loading& loading = {});

/// Rank-constrained speech covariance from the generalized eigenvectors of (R_X, R~_N),
/// then W = R~_X^-1 R^_S e_ref. Bins whose eigensolver fails fall back to the plain MWF with
/// R_S = R_X - R_N.
BeamformerWeights gevd_mwf_weights(const CovarianceField& mixture_cov,
                                   const CovarianceField& noise_cov, std::size_t rank,
                                   std::size_t reference, const Loading& loading = {});

/// Low-rank speech covariance estimate used by gevd_mwf_weights, exposed for testing.
ComplexMatrix gevd_speech_covariance(const ComplexMatrix& mixture_cov,
                                     const ComplexMatrix& loaded_noise_cov, std::size_t rank);

/// S^(t,f) = W(f)^H x(t,f).
Spectrogram apply_weights(const BeamformerWeights& weights, const MultichannelSpectrogram& x);

struct EnhanceOptions {
  StftConfig stft;
  std::size_t gevd_rank = 1;
  Loading loading;
};

/// Channel order seen by one ear's filter: own front, own rear, contralateral front, rear.
std::vector<std::string> binaural_stack_order(Ear ear);

/// Reference (front) microphone label of an ear.
const std::string& reference_channel(Ear ear);

/// One ear's filter on the full binaural array, returned on the scene timeline.
Waveform enhance_ear(const Scene& scene, Ear ear, Algorithm algorithm,
                     const EnhanceOptions& options = {});

struct BinauralEstimate {
  Waveform left;
  Waveform right;
};

BinauralEstimate enhance_binaural(const Scene& scene, Algorithm algorithm,
                                  const EnhanceOptions& options = {});

}  // namespace phoneval
