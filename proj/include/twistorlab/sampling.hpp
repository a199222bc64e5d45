#pragma once

// Random exact-rational bivectors in four families: generic sparse, unit decomposable,
// unit non-decomposable and decomposable of non-unit norm. Orthogonal maps are
// products of rational Householder reflections, so every sample stays exact.

#include <array>
#include <vector>

#include "clifford.hpp"
#include "random.hpp"
#include "rational.hpp"

namespace twistorlab {

enum class BivectorFamily { Generic, UnitDecomposable, UnitIndecomposable, ScaledDecomposable };

inline Rational random_rational(CounterRng& rng, long max_num = 9, long max_den = 9) {
  Rational q(rng.uniform_int(-max_num, max_num), rng.uniform_int(1, max_den));
  q.canonicalize();
  return q;
}

using RationalVector = std::vector<Rational>;

inline RationalMultiVector vector_element(const RationalVector& v) {
  RationalMultiVector out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (sgn(v[i]) != 0) out.add_term(BladeIndex::from_indices({static_cast<int>(i) + 1}), v[i]);
  return out;
}

/// x - 2 (w.x / w.w) w
inline RationalVector reflect(const RationalVector& w, const RationalVector& x) {
  Rational ww = 0, wx = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    ww += w[i] * w[i];
    wx += w[i] * x[i];
  }
  RationalVector out(x);
  if (sgn(ww) == 0) return out;
  const Rational k = 2 * wx / ww;
  for (std::size_t i = 0; i < w.size(); ++i) out[i] -= k * w[i];
  return out;
}

/// Rational orthogonal map as a list of reflection vectors.
class RationalOrthogonal {
public:
  RationalOrthogonal(CounterRng& rng, int r, int reflections = 2) {
    for (int k = 0; k < reflections; ++k) {
      RationalVector w(static_cast<std::size_t>(r));
      for (auto& c : w) c = Rational(rng.uniform_int(-3, 3));
      mirrors_.push_back(std::move(w));
    }
  }

  RationalVector apply(RationalVector x) const {
    for (const auto& w : mirrors_) x = reflect(w, x);
    return x;
  }

  RationalVector column(int r, int i) const {
    RationalVector e(static_cast<std::size_t>(r), Rational(0));
    e[static_cast<std::size_t>(i)] = 1;
    return apply(std::move(e));
  }

private:
  std::vector<RationalVector> mirrors_;
};

inline RationalMultiVector random_bivector(CounterRng& rng, int r, BivectorFamily family) {
  if (r < 2) throw Error("bivectors need rank >= 2");
  const auto pick_pair = [&](int& i, int& j) {
    i = static_cast<int>(rng.uniform_int(0, r - 1));
    do j = static_cast<int>(rng.uniform_int(0, r - 1));
    while (j == i);
  };
  switch (family) {
  case BivectorFamily::Generic: {
    RationalMultiVector a(r);
    const int terms = static_cast<int>(rng.uniform_int(1, std::min(4, bivector_dimension(r))));
    for (int k = 0; k < terms; ++k) {
      int i, j;
      pick_pair(i, j);
      a = a + RationalMultiVector::bivector(r, std::min(i, j) + 1, std::max(i, j) + 1, random_rational(rng));
    }
    return a;
  }
  case BivectorFamily::UnitDecomposable:
  case BivectorFamily::ScaledDecomposable: {
    const RationalOrthogonal q(rng, r);
    int i, j;
    pick_pair(i, j);
    RationalMultiVector a = wedge(vector_element(q.column(r, i)), vector_element(q.column(r, j)));
    if (family == BivectorFamily::UnitDecomposable) return a;
    Rational s;
    do s = random_rational(rng);
    while (s * s == 1 || sgn(s) == 0);
    return s * a;
  }
  case BivectorFamily::UnitIndecomposable: {
    if (r < 4) throw Error("every bivector in rank < 4 is decomposable");
    static constexpr std::array<std::array<int, 3>, 4> triples{{{3, 4, 5}, {5, 12, 13}, {8, 15, 17}, {7, 24, 25}}};
    const auto& t = triples[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    const RationalOrthogonal q(rng, r);
    const auto plane = [&](int a, int b) { return wedge(vector_element(q.column(r, a)), vector_element(q.column(r, b))); };
    return Rational(t[0], t[2]) * plane(0, 1) + Rational(t[1], t[2]) * plane(2, 3);
  }
  }
  throw Error("unknown bivector family");
}

/// Cycles through the families; rank 3 skips the indecomposable one.
inline BivectorFamily family_for_sample(int r, int index) {
  static constexpr std::array<BivectorFamily, 4> order{BivectorFamily::Generic, BivectorFamily::UnitDecomposable,
                                                       BivectorFamily::UnitIndecomposable, BivectorFamily::ScaledDecomposable};
  BivectorFamily f = order[static_cast<std::size_t>(index % 4)];
  if (r < 4 && f == BivectorFamily::UnitIndecomposable) f = BivectorFamily::UnitDecomposable;
  return f;
}

struct LemmaTally {
  int samples = 0;
  int counterexamples = 0;
  int square_minus_one = 0;
  int unit = 0;
  int decomposable = 0;
};

/// A*A = -1  <=>  |A| = 1 and A ^ A = 0, exactly.
inline LemmaTally lemma_equivalence(CounterRng& rng, int r, int samples) {
  LemmaTally t;
  for (int k = 0; k < samples; ++k) {
    const RationalMultiVector a = random_bivector(rng, r, family_for_sample(r, k));
    const bool sq = squares_to_minus_one(a);
    const bool unit = is_unit(a);
    const bool dec = is_decomposable(a);
    t.samples++;
    t.square_minus_one += sq;
    t.unit += unit;
    t.decomposable += dec;
    if (sq != (unit && dec)) t.counterexamples++;
  }
  return t;
}

} // namespace twistorlab
