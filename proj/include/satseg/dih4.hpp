#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "satseg/error.hpp"

namespace satseg {

// Symmetries of the square, used for patch augmentation. Rotations are
// clockwise; flipH mirrors columns, flipV mirrors rows, antitranspose
// mirrors about the anti-diagonal.
enum class Dih4 : uint8_t {
  id,
  rot90,
  rot180,
  rot270,
  flipH,
  flipV,
  transpose,
  antitranspose,
};

constexpr int kDih4Order = 8;

std::string_view dih4_str(Dih4 g);
Dih4 dih4_from_str(std::string_view s);

// Source coordinates: output cell (r, c) of apply(a, g) reads input cell
// dih4_source(g, r, c, size).
std::pair<int, int> dih4_source(Dih4 g, int r, int c, int size);

// compose(g2, g1): the element equal to applying g1 first, then g2.
Dih4 dih4_compose(Dih4 g2, Dih4 g1);
Dih4 dih4_inverse(Dih4 g);

// Group action on a square row-major plane.
template <typename T>
void apply_dih4_into(std::span<const T> src, std::span<T> dst, int size,
                     Dih4 g) {
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      auto [sr, sc] = dih4_source(g, r, c, size);
      dst[size_t(r) * size + c] = src[size_t(sr) * size + sc];
    }
}

template <typename T>
std::vector<T> apply_dih4(std::span<const T> a, int width, int height,
                          Dih4 g) {
  if (width != height)
    fail(ErrorCode::NonSquareInput, "Dih4 acts on square patches only");
  std::vector<T> out(a.size());
  apply_dih4_into<T>(a, out, width, g);
  return out;
}

}  // namespace satseg
