#pragma once

// Time series to image transforms: Gramian angular summation field,
// recurrence plot and Markov transition field, plus bilinear resizing and
// three-channel fusion.
//
// All arithmetic is double precision. Every function is pure.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ifm/matrix.hpp"

namespace ifm::encoders {

/// One beat: n >= 2 finite samples and an optional class id.
class TimeSeries {
 public:
  /// Throws std::invalid_argument if n < 2 or a sample is not finite; the
  /// message names the offending index.
  explicit TimeSeries(std::vector<double> samples, std::optional<int> label = std::nullopt);

  std::span<const double> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  std::optional<int> label() const { return label_; }
  void set_label(std::optional<int> label) { label_ = label; }

  bool operator==(const TimeSeries&) const = default;

 private:
  std::vector<double> samples_;
  std::optional<int> label_;
};

/// Samples mapped affinely onto [0, 1].
struct RescaledSeries {
  std::vector<double> samples;
  double source_min = 0.0;
  double source_max = 0.0;
};

struct PolarEncoding {
  std::vector<double> angles;  ///< arccos of the rescaled samples, in [0, pi/2]
  std::vector<double> radii;   ///< (i + 1) / n, strictly increasing in (0, 1]
  std::size_t regularizer = 0; ///< N, fixed to n
};

enum class ImageKind { Gaf, Rp, Mtf };

std::string_view to_string(ImageKind kind);

struct GrayImage {
  Matrix pixels;
  double lo = 0.0;  ///< declared value range
  double hi = 1.0;
  ImageKind kind = ImageKind::Gaf;

  std::size_t height() const { return pixels.rows(); }
  std::size_t width() const { return pixels.cols(); }
};

enum class RpMode { Binary, Distance };
enum class MtfLayout { Field, Matrix };

inline constexpr double kDefaultEpsFraction = 0.1;
inline constexpr int kDefaultBins = 10;
inline constexpr std::size_t kDefaultFuseSize = 227;

/// Quantile discretization and first-order transition matrix of one series.
struct MtfModel {
  int bins = kDefaultBins;
  std::vector<double> bin_edges;        ///< bins - 1 ascending quantiles
  Matrix transitions;                   ///< bins x bins, rows sum to 1 or are all zero
  std::vector<int> assignments;         ///< bin of each sample of the fitted series
};

/// Fixed channel order: GAF, RP, MTF.
struct FusedImage {
  static constexpr std::array<ImageKind, 3> kChannelOrder{ImageKind::Gaf, ImageKind::Rp,
                                                          ImageKind::Mtf};
  std::array<GrayImage, 3> channels;

  std::size_t side() const { return channels[0].height(); }
};

/// Min-max rescale to [0, 1]. A constant series maps to 0.5 everywhere.
/// Throws std::invalid_argument naming the index of a non-finite sample.
RescaledSeries rescale_unit(std::span<const double> samples);
RescaledSeries rescale_unit(const TimeSeries& series);

/// phi_i = arccos(clamp(x_i, 0, 1)), r_i = (i + 1) / n. Requires n >= 2.
PolarEncoding polar_encode(const RescaledSeries& rescaled);

/// n x n image with pixel (i, k) = cos(phi_i + phi_k).
GrayImage gasf(const TimeSeries& series);

/// Binary mode thresholds |x_i - x_j| <= eps_fraction * (max - min); distance
/// mode returns |x_i - x_j| / (max - min). eps_fraction must lie in (0, 1].
GrayImage recurrence_plot(const TimeSeries& series, RpMode mode = RpMode::Binary,
                          double eps_fraction = kDefaultEpsFraction);

/// Bin edges are the empirical quantiles at k / bins (linear interpolation
/// between order statistics); a sample equal to an edge falls in the lower bin.
MtfModel mtf_fit(const TimeSeries& series, int bins = kDefaultBins);

/// Bin index of `value` under the given edges.
int assign_bin(std::span<const double> edges, double value);

/// Field layout: n x n image with pixel (i, j) = W[bin(x_i)][bin(x_j)].
/// Matrix layout: W itself.
GrayImage mtf_image(const TimeSeries& series, const MtfModel& model,
                    MtfLayout layout = MtfLayout::Field);

/// Corner-aligned bilinear resize to size x size. The source coordinate of
/// output index d is d * (src - 1) / (size - 1); a size of 1 samples index 0.
GrayImage resize_bilinear(const GrayImage& image, std::size_t size);

/// Resizes each image to size x size and stacks them as GAF, RP, MTF.
/// Throws std::invalid_argument if an image sits in the wrong slot.
FusedImage fuse(const GrayImage& gaf, const GrayImage& rp, const GrayImage& mtf,
                std::size_t size = kDefaultFuseSize);

struct EncoderConfig {
  int bins = kDefaultBins;
  double eps_fraction = kDefaultEpsFraction;
  RpMode rp_mode = RpMode::Binary;
  MtfLayout mtf_layout = MtfLayout::Field;
  std::size_t size = kDefaultFuseSize;

  bool operator==(const EncoderConfig&) const = default;
};

/// Full per-beat pipeline: the three encoders followed by fuse().
FusedImage encode_fused(const TimeSeries& series, const EncoderConfig& config);

}  // namespace ifm::encoders
