#include "satseg/dih4.hpp"

#include <array>

namespace satseg {

namespace {

constexpr std::array<std::string_view, kDih4Order> kNames = {
    "id",    "rot90", "rot180",    "rot270",
    "flipH", "flipV", "transpose", "antitranspose"};

// Each element factors as: negate row/col indices, then optionally swap.
struct CoordMap {
  bool swap, neg_r, neg_c;
};

constexpr CoordMap map_of(Dih4 g) {
  switch (g) {
    case Dih4::id: return {false, false, false};
    case Dih4::rot90: return {true, false, true};
    case Dih4::rot180: return {false, true, true};
    case Dih4::rot270: return {true, true, false};
    case Dih4::flipH: return {false, false, true};
    case Dih4::flipV: return {false, true, false};
    case Dih4::transpose: return {true, false, false};
    case Dih4::antitranspose: return {true, true, true};
  }
  return {false, false, false};
}

constexpr Dih4 from_map(CoordMap m) {
  for (int i = 0; i < kDih4Order; ++i) {
    CoordMap c = map_of(Dih4(i));
    if (c.swap == m.swap && c.neg_r == m.neg_r && c.neg_c == m.neg_c)
      return Dih4(i);
  }
  return Dih4::id;
}

}  // namespace

std::string_view dih4_str(Dih4 g) { return kNames[size_t(g)]; }

Dih4 dih4_from_str(std::string_view s) {
  for (int i = 0; i < kDih4Order; ++i)
    if (kNames[size_t(i)] == s) return Dih4(i);
  fail(ErrorCode::ConfigError, "unknown Dih4 element: " + std::string(s));
}

std::pair<int, int> dih4_source(Dih4 g, int r, int c, int size) {
  CoordMap m = map_of(g);
  int t1 = m.neg_r ? size - 1 - r : r;
  int t2 = m.neg_c ? size - 1 - c : c;
  return m.swap ? std::pair{t2, t1} : std::pair{t1, t2};
}

Dih4 dih4_compose(Dih4 g2, Dih4 g1) {
  // The source map of "g1 then g2" is map(g1) applied after map(g2):
  // C[v] = B[map(g2) v] = A[map(g1) map(g2) v].
  CoordMap m1 = map_of(g1);
  CoordMap m2 = map_of(g2);
  // P1 N1 P2 N2 = (P1 P2)(P2^-1 N1 P2) N2; conjugating by a swap exchanges
  // the negation flags.
  bool n1r = m2.swap ? m1.neg_c : m1.neg_r;
  bool n1c = m2.swap ? m1.neg_r : m1.neg_c;
  CoordMap out{bool(m1.swap ^ m2.swap), bool(n1r ^ m2.neg_r),
               bool(n1c ^ m2.neg_c)};
  return from_map(out);
}

Dih4 dih4_inverse(Dih4 g) {
  for (int i = 0; i < kDih4Order; ++i)
    if (dih4_compose(g, Dih4(i)) == Dih4::id) return Dih4(i);
  return Dih4::id;  // unreachable, the group is closed
}

}  // namespace satseg
