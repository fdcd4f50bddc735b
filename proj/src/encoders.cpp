#include "ifm/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ifm::encoders {

namespace {

void require_finite(std::span<const double> samples) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw std::invalid_argument("non-finite sample at index " + std::to_string(i));
    }
  }
}

std::pair<double, double> value_range(std::span<const double> samples) {
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  return {*lo, *hi};
}

// Linear interpolation between order statistics at fractional rank p * (n - 1).
double quantile_sorted(std::span<const double> sorted, double p) {
  const double rank = p * static_cast<double>(sorted.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(rank));
  if (lower + 1 >= sorted.size()) return sorted.back();
  const double frac = rank - static_cast<double>(lower);
  return sorted[lower] + frac * (sorted[lower + 1] - sorted[lower]);
}

}  // namespace

std::string_view to_string(ImageKind kind) {
  switch (kind) {
    case ImageKind::Gaf: return "gaf";
    case ImageKind::Rp: return "rp";
    case ImageKind::Mtf: return "mtf";
  }
  return "?";
}

TimeSeries::TimeSeries(std::vector<double> samples, std::optional<int> label)
    : samples_(std::move(samples)), label_(label) {
  if (samples_.size() < 2) {
    throw std::invalid_argument("time series needs at least 2 samples, got " +
                                std::to_string(samples_.size()));
  }
  require_finite(samples_);
}

RescaledSeries rescale_unit(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("cannot rescale an empty series");
  require_finite(samples);
  const auto [lo, hi] = value_range(samples);
  RescaledSeries out;
  out.source_min = lo;
  out.source_max = hi;
  out.samples.reserve(samples.size());
  const double span = hi - lo;
  for (double x : samples) {
    out.samples.push_back(span > 0.0 ? std::clamp((x - lo) / span, 0.0, 1.0) : 0.5);
  }
  return out;
}

RescaledSeries rescale_unit(const TimeSeries& series) { return rescale_unit(series.samples()); }

PolarEncoding polar_encode(const RescaledSeries& rescaled) {
  const std::size_t n = rescaled.samples.size();
  if (n < 2) {
    throw std::invalid_argument("polar encoding needs at least 2 samples, got " + std::to_string(n));
  }
  PolarEncoding out;
  out.regularizer = n;
  out.angles.reserve(n);
  out.radii.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.angles.push_back(std::acos(std::clamp(rescaled.samples[i], 0.0, 1.0)));
    out.radii.push_back(static_cast<double>(i + 1) / static_cast<double>(n));
  }
  return out;
}

GrayImage gasf(const TimeSeries& series) {
  // cos(phi_i + phi_k) expanded as c_i c_k - s_i s_k with c = cos(arccos(x)) = x,
  // which keeps the endpoints exact (cos(pi / 2) would leave 6e-17 behind).
  const auto rescaled = rescale_unit(series);
  const std::size_t n = rescaled.samples.size();
  std::vector<double> c(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = std::clamp(rescaled.samples[i], 0.0, 1.0);
    s[i] = std::sqrt(std::max(0.0, 1.0 - c[i] * c[i]));
  }
  GrayImage img{Matrix(n, n), -1.0, 1.0, ImageKind::Gaf};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i; k < n; ++k) {
      const double v = std::clamp(c[i] * c[k] - s[i] * s[k], -1.0, 1.0);
      img.pixels(i, k) = v;
      img.pixels(k, i) = v;
    }
  }
  return img;
}

GrayImage recurrence_plot(const TimeSeries& series, RpMode mode, double eps_fraction) {
  if (mode == RpMode::Binary && !(eps_fraction > 0.0 && eps_fraction <= 1.0)) {
    throw std::invalid_argument("eps_fraction must lie in (0, 1], got " + std::to_string(eps_fraction));
  }
  const auto x = series.samples();
  const std::size_t n = x.size();
  const auto [lo, hi] = value_range(x);
  const double range = hi - lo;
  GrayImage img{Matrix(n, n), 0.0, 1.0, ImageKind::Rp};
  if (mode == RpMode::Binary) {
    const double eps = eps_fraction * range;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        // Heaviside with theta(0) = 1.
        const double v = (eps - std::abs(x[i] - x[j]) >= 0.0) ? 1.0 : 0.0;
        img.pixels(i, j) = v;
        img.pixels(j, i) = v;
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double v = range > 0.0 ? std::min(std::abs(x[i] - x[j]) / range, 1.0) : 0.0;
        img.pixels(i, j) = v;
        img.pixels(j, i) = v;
      }
    }
  }
  return img;
}

int assign_bin(std::span<const double> edges, double value) {
  return static_cast<int>(std::lower_bound(edges.begin(), edges.end(), value) - edges.begin());
}

MtfModel mtf_fit(const TimeSeries& series, int bins) {
  if (bins < 2) throw std::invalid_argument("MTF needs at least 2 bins, got " + std::to_string(bins));
  const auto x = series.samples();
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());

  MtfModel model;
  model.bins = bins;
  model.bin_edges.reserve(static_cast<std::size_t>(bins - 1));
  for (int k = 1; k < bins; ++k) {
    model.bin_edges.push_back(quantile_sorted(sorted, static_cast<double>(k) / bins));
  }
  model.assignments.reserve(x.size());
  for (double v : x) model.assignments.push_back(assign_bin(model.bin_edges, v));

  const auto q = static_cast<std::size_t>(bins);
  Matrix counts(q, q);
  for (std::size_t t = 0; t + 1 < x.size(); ++t) {
    counts(static_cast<std::size_t>(model.assignments[t]),
           static_cast<std::size_t>(model.assignments[t + 1])) += 1.0;
  }
  model.transitions = Matrix(q, q);
  for (std::size_t l = 0; l < q; ++l) {
    double total = 0.0;
    for (double c : counts.row(l)) total += c;
    if (total == 0.0) continue;
    for (std::size_t k = 0; k < q; ++k) model.transitions(l, k) = counts(l, k) / total;
  }
  return model;
}

GrayImage mtf_image(const TimeSeries& series, const MtfModel& model, MtfLayout layout) {
  const auto q = static_cast<std::size_t>(model.bins);
  if (model.transitions.rows() != q || model.transitions.cols() != q) {
    throw std::logic_error("MTF model transition matrix does not match its bin count");
  }
  if (layout == MtfLayout::Matrix) return GrayImage{model.transitions, 0.0, 1.0, ImageKind::Mtf};

  const std::size_t n = series.size();
  if (model.assignments.size() != n) {
    throw std::logic_error("MTF model has " + std::to_string(model.assignments.size()) +
                           " bin assignments for a series of length " + std::to_string(n));
  }
  GrayImage img{Matrix(n, n), 0.0, 1.0, ImageKind::Mtf};
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = model.transitions.row(static_cast<std::size_t>(model.assignments[i]));
    for (std::size_t j = 0; j < n; ++j) {
      img.pixels(i, j) = row[static_cast<std::size_t>(model.assignments[j])];
    }
  }
  return img;
}

GrayImage resize_bilinear(const GrayImage& image, std::size_t size) {
  if (size < 1) throw std::invalid_argument("resize target must be at least 1");
  const std::size_t src_h = image.height();
  const std::size_t src_w = image.width();
  if (src_h < 1 || src_w < 1) throw std::invalid_argument("cannot resize an empty image");
  if (src_h == size && src_w == size) return image;

  struct Tap {
    std::size_t i0, i1;
    double frac;
  };
  auto taps = [size](std::size_t src) {
    std::vector<Tap> out(size);
    for (std::size_t d = 0; d < size; ++d) {
      if (src == 1 || size == 1) {
        out[d] = {0, 0, 0.0};
        continue;
      }
      const double coord = static_cast<double>(d) * static_cast<double>(src - 1) /
                           static_cast<double>(size - 1);
      auto i0 = static_cast<std::size_t>(std::floor(coord));
      if (i0 >= src - 1) i0 = src - 1;
      const std::size_t i1 = std::min(i0 + 1, src - 1);
      out[d] = {i0, i1, coord - static_cast<double>(i0)};
    }
    return out;
  };
  const auto rows = taps(src_h);
  const auto cols = taps(src_w);

  GrayImage out{Matrix(size, size), image.lo, image.hi, image.kind};
  const Matrix& p = image.pixels;
  for (std::size_t r = 0; r < size; ++r) {
    const auto [r0, r1, fr] = rows[r];
    for (std::size_t c = 0; c < size; ++c) {
      const auto [c0, c1, fc] = cols[c];
      const double top = p(r0, c0) + fc * (p(r0, c1) - p(r0, c0));
      const double bottom = p(r1, c0) + fc * (p(r1, c1) - p(r1, c0));
      double v = top + fr * (bottom - top);
      // Guard against rounding past the convex hull of the four taps.
      const double lo = std::min({p(r0, c0), p(r0, c1), p(r1, c0), p(r1, c1)});
      const double hi = std::max({p(r0, c0), p(r0, c1), p(r1, c0), p(r1, c1)});
      out.pixels(r, c) = std::clamp(v, lo, hi);
    }
  }
  return out;
}

FusedImage fuse(const GrayImage& gaf, const GrayImage& rp, const GrayImage& mtf, std::size_t size) {
  const std::array<const GrayImage*, 3> slots{&gaf, &rp, &mtf};
  FusedImage fused;
  for (std::size_t c = 0; c < slots.size(); ++c) {
    const ImageKind expected = FusedImage::kChannelOrder[c];
    if (slots[c]->kind != expected) {
      throw std::invalid_argument("fuse slot " + std::to_string(c) + " expects a " +
                                  std::string(to_string(expected)) + " image, got " +
                                  std::string(to_string(slots[c]->kind)));
    }
    fused.channels[c] = resize_bilinear(*slots[c], size);
  }
  return fused;
}

FusedImage encode_fused(const TimeSeries& series, const EncoderConfig& config) {
  const MtfModel model = mtf_fit(series, config.bins);
  return fuse(gasf(series), recurrence_plot(series, config.rp_mode, config.eps_fraction),
              mtf_image(series, model, config.mtf_layout), config.size);
}

}  // namespace ifm::encoders
