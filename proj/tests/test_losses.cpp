#include <cmath>
#include <vector>

#include <doctest.h>

#include "satseg/losses.hpp"
#include "satseg/rng.hpp"

using namespace satseg;

TEST_CASE("hard jaccard on hand-counted masks") {
  std::vector<uint8_t> a{1, 1, 0, 0}, b{0, 1, 1, 0};
  // intersection 1, union 3
  CHECK(jaccard(a, b) == doctest::Approx(1.0 / 3.0));

  std::vector<uint8_t> same{1, 0, 1, 1};
  CHECK(jaccard(same, same) == 1.0);

  std::vector<uint8_t> d1{1, 1, 0, 0}, d2{0, 0, 1, 1};
  CHECK(jaccard(d1, d2) == 0.0);

  std::vector<uint8_t> e1{0, 0}, e2{0, 0};
  CHECK(jaccard(e1, e2) == 1.0);  // correctly-empty convention
}

TEST_CASE("bce matches direct evaluation") {
  std::vector<double> one{1.0};

  std::vector<double> confident{1.0 - 1e-7};
  CHECK(bce_loss<double>(one, confident) ==
        doctest::Approx(0.0).epsilon(1e-6));

  std::vector<double> half{0.5};
  CHECK(bce_loss<double>(one, half) == doctest::Approx(std::log(2.0)));

  // Prediction 0 is clipped to 1e-7: loss = -ln(1e-7) = 16.1181...
  std::vector<double> zero{0.0};
  CHECK(bce_loss<double>(one, zero) ==
        doctest::Approx(-std::log(1e-7)).epsilon(1e-6));
  CHECK(bce_loss<double>(one, zero) == doctest::Approx(16.1181).epsilon(1e-4));
}

TEST_CASE("soft jaccard direct values") {
  std::vector<double> y{1.0}, yh{0.5};
  // 0.5 / (1 + 0.5 - 0.5) = 0.5 in both modes
  CHECK(soft_jaccard<double>(y, yh, SoftJaccardMode::aggregate) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(soft_jaccard<double>(y, yh, SoftJaccardMode::per_pixel_mean) ==
        doctest::Approx(0.5).epsilon(1e-9));

  std::vector<double> bin{1, 0, 1, 1, 0};
  CHECK(soft_jaccard<double>(bin, bin) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> z{0, 0, 0};
  CHECK(soft_jaccard<double>(z, z) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("aggregate soft jaccard equals hard jaccard on binary inputs") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 1 + rng.uniform_int(400);
    std::vector<uint8_t> ya(n), yb(n);
    std::vector<double> da(n), db(n);
    for (size_t i = 0; i < n; ++i) {
      ya[i] = uint8_t(rng.uniform_int(2));
      yb[i] = uint8_t(rng.uniform_int(2));
      da[i] = ya[i];
      db[i] = yb[i];
    }
    double hard = jaccard(ya, yb);
    double soft = soft_jaccard<double>(da, db, SoftJaccardMode::aggregate);
    CHECK(std::fabs(hard - soft) <= 1e-9);
  }
}

TEST_CASE("aggregate soft jaccard is monotone in predictions") {
  Rng rng(7);
  size_t n = 64;
  std::vector<double> y(n), yh(n);
  for (size_t i = 0; i < n; ++i) {
    y[i] = double(rng.uniform_int(2));
    yh[i] = rng.uniform();
  }
  double base = soft_jaccard<double>(y, yh);
  for (size_t i = 0; i < n; ++i) {
    auto bump = yh;
    bump[i] = std::min(1.0, yh[i] + 0.05);
    double moved = soft_jaccard<double>(y, bump);
    if (y[i] == 1.0)
      CHECK(moved >= base - 1e-15);
    else
      CHECK(moved <= base + 1e-15);
  }
}

TEST_CASE("joint loss composes bce and -log soft jaccard") {
  std::vector<double> y{1.0}, yh{0.5};
  CHECK(joint_loss<double>(y, yh) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-9));

  std::vector<double> conf{1.0 - 1e-7};
  CHECK(joint_loss<double>(y, conf) == doctest::Approx(0.0).epsilon(1e-5));

  // L >= 0 whenever J_m <= 1
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 1 + rng.uniform_int(100);
    std::vector<double> ty(n), th(n);
    for (size_t i = 0; i < n; ++i) {
      ty[i] = double(rng.uniform_int(2));
      th[i] = rng.uniform();
    }
    CHECK(joint_loss<double>(ty, th) >= -1e-12);
  }
}

TEST_CASE("joint loss gradient matches central differences") {
  Rng rng(31337);
  for (auto mode :
       {SoftJaccardMode::aggregate, SoftJaccardMode::per_pixel_mean}) {
    size_t n = 40;
    std::vector<double> y(n), yh(n), grad(n);
    for (size_t i = 0; i < n; ++i) {
      y[i] = double(rng.uniform_int(2));
      yh[i] = rng.uniform(0.05, 0.95);  // away from the clip boundaries
    }
    double loss = joint_loss_grad<double>(y, yh, grad, mode);
    CHECK(loss == doctest::Approx(joint_loss<double>(y, yh, mode)));

    const double h = 1e-6;
    for (size_t i = 0; i < n; i += 3) {
      auto p = yh;
      p[i] += h;
      double lp = joint_loss<double>(y, p, mode);
      p[i] -= 2 * h;
      double lm = joint_loss<double>(y, p, mode);
      double numeric = (lp - lm) / (2 * h);
      CHECK(grad[i] == doctest::Approx(numeric).epsilon(1e-5));
    }
  }
}

TEST_CASE("zero learning signal: y == yhat pinned at the clip boundary") {
  // BCE contributes nothing (clipped) and the jaccard term only the O(1/n)
  // slope of the smoothed ratio.
  const size_t n = 4096;
  std::vector<double> y(n, 1.0), yh(n, 1.0), grad(n);
  joint_loss_grad<double>(y, yh, grad);
  for (double g : grad) CHECK(std::fabs(g) <= 2.0 / double(n));
}

TEST_CASE("soft-to-hard limit: near-binary predictions recover hard jaccard") {
  Rng rng(555);
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 64 * 64;
    std::vector<uint8_t> mask(n);
    std::vector<double> y(n), yh(n);
    for (size_t i = 0; i < n; ++i) {
      mask[i] = uint8_t(rng.uniform_int(2));
      y[i] = mask[i];
      yh[i] = std::clamp(y[i], 1e-6, 1.0 - 1e-6);
    }
    double hard = jaccard(mask, mask);
    double soft = soft_jaccard<double>(y, yh);
    CHECK(std::fabs(soft - hard) <= 1e-4);
  }
}
