#include "satseg/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "satseg/losses.hpp"
#include "satseg/rng.hpp"

namespace satseg {

namespace {

// Ring index of pixel (r, c) in an s x s patch: Chebyshev distance from the
// (half-integer) center, floored to 1-px bins 0 .. s/2 - 1.
int ring_of(int r, int c, int s) {
  int dr = std::abs(2 * r - (s - 1));
  int dc = std::abs(2 * c - (s - 1));
  return std::max(dr, dc) / 2;
}

double spearman(const std::vector<double>& values) {
  // Bins are already in rank order 0..n-1; rank the values and correlate.
  const size_t n = values.size();
  if (n < 2) return 0.0;
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> rank(n);
  for (size_t i = 0; i < n; ++i) rank[order[i]] = double(i);
  double mean = double(n - 1) / 2.0;
  double num = 0, da = 0, db = 0;
  for (size_t i = 0; i < n; ++i) {
    double x = double(i) - mean;
    double y = rank[i] - mean;
    num += x * y;
    da += x * x;
    db += y * y;
  }
  return (da > 0 && db > 0) ? num / std::sqrt(da * db) : 0.0;
}

}  // namespace

std::string BoundaryProfile::to_csv() const {
  std::string out = "bin,pixel_count,mean_bce\n";
  char line[96];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%d,%lld,%.9f\n", r.bin,
                  (long long)r.pixel_count, r.mean_bce);
    out += line;
  }
  return out;
}

BoundaryProfile boundary_profile(
    UNet<float>& model,
    const std::vector<std::pair<const MultispectralRaster*,
                                const LabelMask*>>& dataset,
    ClassLabel cls, int patch_size, int n_patches, uint64_t seed) {
  if (model.config().output_crop != 0)
    fail(ErrorCode::ConfigError,
         "boundary profiling needs a model with the crop disabled");
  if (dataset.empty()) fail(ErrorCode::ConfigError, "empty dataset");
  if (patch_size % (1 << model.config().depth) != 0)
    fail(ErrorCode::ConfigError, "patch_size must be divisible by 2^depth");

  const int s = patch_size;
  const int C = model.config().in_channels;
  const int bins = s / 2;
  std::vector<double> loss_sum(size_t(bins), 0.0);
  std::vector<int64_t> count(size_t(bins), 0);

  Rng root(seed);
  const float lo = float(kBceClip), hi = 1.0f - float(kBceClip);

  for (int p = 0; p < n_patches; ++p) {
    Rng rng = root.substream("profile_patch", uint64_t(p));
    size_t which = rng.uniform_int(uint32_t(dataset.size()));
    const auto& [image, mask] = dataset[which];
    if (int(image->band_count()) != C)
      fail(ErrorCode::BandMismatch, "dataset channels do not match the model");
    if (image->width() < s || image->height() < s)
      fail(ErrorCode::ImageTooSmall, "scene smaller than the profiling patch");
    int x = int(rng.uniform_int(uint32_t(image->width() - s + 1)));
    int y = int(rng.uniform_int(uint32_t(image->height() - s + 1)));

    Tensor4<float> input(1, C, s, s);
    for (int c = 0; c < C; ++c) {
      auto band = image->band_data<float>(size_t(c));
      float* dst = input.plane(0, c);
      for (int r = 0; r < s; ++r)
        std::copy_n(band.data() + size_t(y + r) * image->width() + x, s,
                    dst + size_t(r) * s);
    }
    auto truth = mask->plane_for(cls);
    Tensor4<float> yhat = model.forward(input, false);

    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) {
        float pr = std::clamp(yhat.at(0, 0, r, c), lo, hi);
        float t = float(truth[size_t(y + r) * image->width() + (x + c)]);
        double bce = -(t * std::log(double(pr)) +
                       (1.0 - t) * std::log(1.0 - double(pr)));
        int bin = ring_of(r, c, s);
        loss_sum[size_t(bin)] += bce;
        ++count[size_t(bin)];
      }
  }

  BoundaryProfile profile;
  std::vector<double> means;
  for (int b = 0; b < bins; ++b) {
    BoundaryProfile::Row row;
    row.bin = b;
    row.pixel_count = count[size_t(b)];
    row.mean_bce = count[size_t(b)] ? loss_sum[size_t(b)] / count[size_t(b)]
                                    : 0.0;
    means.push_back(row.mean_bce);
    profile.rows.push_back(row);
  }
  profile.edge_trend = spearman(means);
  return profile;
}

}  // namespace satseg
