#pragma once

// Real Clifford algebra Cl(r) with the negative-definite convention e_i^2 = -1.
//
// Blades are stored as bitmasks (bit i-1 <-> generator e_i). A multivector is a
// sorted map blade -> coefficient with no stored zeros. The coefficient type is
// either the exact Rational or double; exact arithmetic is what the lemma-level
// checks rely on, doubles feed the numeric modules downstream.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "rational.hpp"

namespace twistorlab {

inline constexpr int kMaxRank = 32;

/// Strictly increasing list of generator indices in 1..r, stored as a bitmask.
/// The empty blade is the scalar 1.
class BladeIndex {
public:
  constexpr BladeIndex() = default;

  static constexpr BladeIndex from_mask(std::uint32_t mask) {
    BladeIndex b;
    b.mask_ = mask;
    return b;
  }

  /// Indices must be distinct, ascending and within 1..32.
  static BladeIndex from_indices(std::span<const int> indices) {
    std::uint32_t mask = 0;
    int previous = 0;
    for (int i : indices) {
      if (i <= previous || i > kMaxRank)
        throw GradeError("blade indices must be strictly increasing within 1..32");
      mask |= 1u << (i - 1);
      previous = i;
    }
    return from_mask(mask);
  }
  static BladeIndex from_indices(std::initializer_list<int> indices) {
    return from_indices(std::span<const int>(indices.begin(), indices.size()));
  }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr int grade() const { return std::popcount(mask_); }
  constexpr bool is_scalar() const { return mask_ == 0; }
  /// Largest generator index, 0 for the scalar blade.
  constexpr int max_index() const { return 32 - std::countl_zero(mask_); }

  std::vector<int> indices() const {
    std::vector<int> out;
    for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
    return out;
  }

  constexpr bool operator==(const BladeIndex&) const = default;

private:
  std::uint32_t mask_ = 0;
};

/// Canonical blade order: by grade, then lexicographically by index list.
struct BladeOrder {
  constexpr bool operator()(BladeIndex a, BladeIndex b) const {
    if (a.grade() != b.grade()) return a.grade() < b.grade();
    const std::uint32_t diff = a.mask() ^ b.mask();
    if (diff == 0) return false;
    return (a.mask() & (diff & (~diff + 1))) != 0; // lowest differing index belongs to a
  }
};

/// Sign of e_A * e_B for blades A, B: (-1)^(transpositions + shared generators).
constexpr int blade_product_sign(std::uint32_t a, std::uint32_t b) {
  int swaps = 0;
  for (std::uint32_t shifted = a >> 1; shifted != 0; shifted >>= 1) swaps += std::popcount(shifted & b);
  swaps += std::popcount(a & b); // each e_i e_i = -1
  return (swaps & 1) ? -1 : 1;
}

template <typename T>
concept CliffordScalar = std::same_as<T, Rational> || std::same_as<T, double>;

namespace detail {
inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(double x) { return x == 0.0; }
} // namespace detail

template <CliffordScalar T>
class MultiVector {
public:
  using Scalar = T;
  using Terms = std::map<BladeIndex, T, BladeOrder>;

  explicit MultiVector(int rank) : rank_(rank) { check_rank(rank); }

  MultiVector(int rank, Terms terms) : rank_(rank) {
    check_rank(rank);
    for (auto& [blade, c] : terms) add_term(blade, c);
  }

  static MultiVector scalar(int rank, const T& c) {
    MultiVector m(rank);
    m.add_term(BladeIndex{}, c);
    return m;
  }

  static MultiVector blade(int rank, BladeIndex b, const T& c = T(1)) {
    MultiVector m(rank);
    m.add_term(b, c);
    return m;
  }

  static MultiVector generator(int rank, int i) { return blade(rank, BladeIndex::from_indices({i})); }

  /// e_i e_j for i < j; i > j gives -e_j e_i.
  static MultiVector bivector(int rank, int i, int j, const T& c = T(1)) {
    if (i == j) throw GradeError("bivector needs two distinct indices");
    if (i < j) return blade(rank, BladeIndex::from_indices({i, j}), c);
    return blade(rank, BladeIndex::from_indices({j, i}), T(-c));
  }

  int rank() const { return rank_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  T coefficient(BladeIndex b) const {
    auto it = terms_.find(b);
    return it == terms_.end() ? T(0) : it->second;
  }

  /// Bivector coefficient a_ij for i < j.
  T coefficient(int i, int j) const { return coefficient(BladeIndex::from_indices({i, j})); }

  bool is_pure_grade(int k) const {
    return std::all_of(terms_.begin(), terms_.end(), [k](const auto& t) { return t.first.grade() == k; });
  }

  MultiVector grade_part(int k) const {
    MultiVector out(rank_);
    for (const auto& [b, c] : terms_)
      if (b.grade() == k) out.terms_.emplace(b, c);
    return out;
  }

  /// Adds c * e_B, dropping the term if it cancels.
  void add_term(BladeIndex b, const T& c) {
    if (b.max_index() > rank_) throw GradeError("blade index exceeds rank " + std::to_string(rank_));
    if (detail::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(b, c);
    if (!inserted) {
      it->second += c;
      if (detail::is_zero(it->second)) terms_.erase(it);
    }
  }

  bool operator==(const MultiVector& o) const { return rank_ == o.rank_ && terms_ == o.terms_; }

  MultiVector operator-() const {
    MultiVector out(rank_);
    for (const auto& [b, c] : terms_) out.terms_.emplace(b, T(-c));
    return out;
  }

  friend MultiVector operator+(const MultiVector& a, const MultiVector& b) {
    if (a.rank_ != b.rank_) throw RankMismatch(a.rank_, b.rank_);
    MultiVector out = a;
    for (const auto& [blade, c] : b.terms_) out.add_term(blade, c);
    return out;
  }

  friend MultiVector operator-(const MultiVector& a, const MultiVector& b) { return a + (-b); }

  friend MultiVector operator*(const T& s, const MultiVector& a) {
    MultiVector out(a.rank_);
    if (detail::is_zero(s)) return out;
    for (const auto& [b, c] : a.terms_) out.terms_.emplace(b, T(s * c));
    return out;
  }

private:
  static void check_rank(int rank) {
    if (rank < 1 || rank > kMaxRank) throw GradeError("rank must lie in 1..32, got " + std::to_string(rank));
  }

  int rank_;
  Terms terms_;
};

using RationalMultiVector = MultiVector<Rational>;
using RealMultiVector = MultiVector<double>;

namespace detail {
template <CliffordScalar T, typename Keep>
MultiVector<T> blade_bilinear(const MultiVector<T>& a, const MultiVector<T>& b, Keep keep) {
  if (a.rank() != b.rank()) throw RankMismatch(a.rank(), b.rank());
  std::unordered_map<std::uint32_t, T> acc;
  for (const auto& [ba, ca] : a.terms())
    for (const auto& [bb, cb] : b.terms()) {
      if (!keep(ba.mask(), bb.mask())) continue;
      T prod = ca * cb;
      if (blade_product_sign(ba.mask(), bb.mask()) < 0) prod = -prod;
      auto [it, inserted] = acc.try_emplace(ba.mask() ^ bb.mask(), prod);
      if (!inserted) it->second += prod;
    }
  MultiVector<T> out(a.rank());
  for (auto& [mask, c] : acc) out.add_term(BladeIndex::from_mask(mask), c);
  return out;
}
} // namespace detail

/// Clifford product, bilinear and associative, with e_i e_j = -e_j e_i and e_i^2 = -1.
template <CliffordScalar T>
MultiVector<T> geometric_product(const MultiVector<T>& a, const MultiVector<T>& b) {
  return detail::blade_bilinear(a, b, [](std::uint32_t, std::uint32_t) { return true; });
}

template <CliffordScalar T>
MultiVector<T> operator*(const MultiVector<T>& a, const MultiVector<T>& b) {
  return geometric_product(a, b);
}

/// Exterior product: the grade(p+q) part of the product of grade-p and grade-q blades.
template <CliffordScalar T>
MultiVector<T> wedge(const MultiVector<T>& a, const MultiVector<T>& b) {
  return detail::blade_bilinear(a, b, [](std::uint32_t x, std::uint32_t y) { return (x & y) == 0; });
}

/// Sum of squared blade coefficients.
template <CliffordScalar T>
T norm2(const MultiVector<T>& a) {
  T s(0);
  for (const auto& [b, c] : a.terms()) s += c * c;
  return s;
}

namespace detail {
template <CliffordScalar T>
void require_bivector(const MultiVector<T>& a) {
  if (!a.is_pure_grade(2)) throw GradeError("expected a pure grade-2 element");
}
} // namespace detail

/// A bivector is decomposable (v1 ^ v2) iff A ^ A = 0. The zero bivector counts as decomposable.
template <CliffordScalar T>
bool is_decomposable(const MultiVector<T>& a) {
  detail::require_bivector(a);
  return wedge(a, a).is_zero();
}

/// Unit-norm predicate, kept apart from is_decomposable so the zero bivector is
/// reported as degenerate rather than folded into the decomposability answer.
template <CliffordScalar T>
bool is_unit(const MultiVector<T>& a, double tolerance = 0.0) {
  const T n = norm2(a);
  if constexpr (std::same_as<T, Rational>) {
    if (tolerance == 0.0) return n == 1;
    return std::abs(n.get_d() - 1.0) <= tolerance;
  } else {
    return std::abs(n - 1.0) <= tolerance;
  }
}

/// A * A == -1. tolerance == 0 demands exact equality; otherwise every coefficient of
/// A*A + 1 must be within tolerance.
template <CliffordScalar T>
bool squares_to_minus_one(const MultiVector<T>& a, double tolerance = 0.0) {
  detail::require_bivector(a);
  if (tolerance < 0) throw Error("tolerance must be nonnegative");
  const MultiVector<T> defect = geometric_product(a, a) + MultiVector<T>::scalar(a.rank(), T(1));
  if (tolerance == 0.0) return defect.is_zero();
  for (const auto& [b, c] : defect.terms()) {
    double v;
    if constexpr (std::same_as<T, Rational>) v = c.get_d();
    else v = c;
    if (std::abs(v) > tolerance) return false;
  }
  return true;
}

inline RealMultiVector to_real(const RationalMultiVector& a) {
  RealMultiVector out(a.rank());
  for (const auto& [b, c] : a.terms()) out.add_term(b, c.get_d());
  return out;
}

// ---------------------------------------------------------------------------
// Bivectors as skew matrices and coefficient vectors.
//
// e_i ^ e_j (i < j) acts on r-space as e_i -> e_j, e_j -> -e_i, so skew(A)(j,i) = a_ij.
// With this convention the grade-2 part of A*B for bivectors, (AB - BA)/2, maps to the
// matrix commutator [skew(A), skew(B)].
// ---------------------------------------------------------------------------

inline int bivector_dimension(int r) { return r * (r - 1) / 2; }

/// Position of the pair (i, j), 1 <= i < j <= r, in lexicographic order.
inline int pair_index(int i, int j, int r) { return (i - 1) * (2 * r - i) / 2 + (j - i - 1); }

template <CliffordScalar T>
Eigen::MatrixXd bivector_to_skew(const MultiVector<T>& a) {
  detail::require_bivector(a);
  const int r = a.rank();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(r, r);
  for (const auto& [b, c] : a.terms()) {
    const auto idx = b.indices();
    double v;
    if constexpr (std::same_as<T, Rational>) v = c.get_d();
    else v = c;
    m(idx[1] - 1, idx[0] - 1) = v;
    m(idx[0] - 1, idx[1] - 1) = -v;
  }
  return m;
}

/// Inverse of bivector_to_skew; entries with |a_ij| <= drop are not stored.
inline RealMultiVector skew_to_bivector(const Eigen::Ref<const Eigen::MatrixXd>& m, double drop = 0.0) {
  const int r = static_cast<int>(m.rows());
  RealMultiVector out(r);
  for (int i = 1; i <= r; ++i)
    for (int j = i + 1; j <= r; ++j) {
      const double v = 0.5 * (m(j - 1, i - 1) - m(i - 1, j - 1));
      if (std::abs(v) > drop) out.add_term(BladeIndex::from_indices({i, j}), v);
    }
  return out;
}

/// a_ij in lexicographic (i, j) order.
template <CliffordScalar T>
Eigen::VectorXd bivector_coefficients(const MultiVector<T>& a) {
  detail::require_bivector(a);
  const int r = a.rank();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(bivector_dimension(r));
  for (const auto& [b, c] : a.terms()) {
    const auto idx = b.indices();
    if constexpr (std::same_as<T, Rational>) v[pair_index(idx[0], idx[1], r)] = c.get_d();
    else v[pair_index(idx[0], idx[1], r)] = c;
  }
  return v;
}

inline RealMultiVector bivector_from_coefficients(int r, const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != bivector_dimension(r)) throw GradeError("coefficient vector has wrong length");
  RealMultiVector out(r);
  for (int i = 1; i <= r; ++i)
    for (int j = i + 1; j <= r; ++j) out.add_term(BladeIndex::from_indices({i, j}), v[pair_index(i, j, r)]);
  return out;
}

/// Skew matrix of the exterior product u ^ v.
inline Eigen::MatrixXd wedge_skew(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& v) {
  return v * u.transpose() - u * v.transpose();
}

// ---------------------------------------------------------------------------
// Canonical form A = sum a_i f_{2i-1} ^ f_{2i} via the real Schur form of skew(A).
// ---------------------------------------------------------------------------

struct PlaneCoefficient {
  double coefficient;
  int first;  ///< 2i-1, 1-based
  int second; ///< 2i
};

struct CanonicalBivectorForm {
  /// floor(r/2) entries, nonnegative, sorted by decreasing magnitude.
  std::vector<PlaneCoefficient> terms;
  /// Orthonormal columns f_1..f_r of the adapted frame.
  Eigen::MatrixXd frame;
  /// max |frame * canonical * frame^T - skew(A)|.
  double residual = 0.0;

  std::size_t nonzero_count(double tolerance) const {
    return static_cast<std::size_t>(
        std::count_if(terms.begin(), terms.end(), [tolerance](const PlaneCoefficient& p) { return std::abs(p.coefficient) > tolerance; }));
  }
};

inline CanonicalBivectorForm canonical_bivector_form(const RealMultiVector& a) {
  detail::require_bivector(a);
  const int r = a.rank();
  const Eigen::MatrixXd m = bivector_to_skew(a);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());

  Eigen::RealSchur<Eigen::MatrixXd> schur(m);
  if (schur.info() != Eigen::Success) throw NumericalError("real Schur decomposition did not converge", INFINITY);
  const Eigen::MatrixXd& t = schur.matrixT();
  const Eigen::MatrixXd& q = schur.matrixU();

  struct Block {
    double a;
    Eigen::Index col0, col1;
  };
  std::vector<Block> planes;
  std::vector<Eigen::Index> kernel;
  const double block_tol = 1e-14 * scale;
  for (Eigen::Index k = 0; k < r;) {
    if (k + 1 < r && std::abs(t(k + 1, k)) > block_tol) {
      const double v = 0.5 * (t(k + 1, k) - t(k, k + 1));
      if (v >= 0) planes.push_back({v, k, k + 1});
      else planes.push_back({-v, k + 1, k});
      k += 2;
    } else {
      kernel.push_back(k);
      ++k;
    }
  }
  std::stable_sort(planes.begin(), planes.end(), [](const Block& x, const Block& y) { return x.a > y.a; });

  CanonicalBivectorForm out;
  out.frame.resize(r, r);
  Eigen::MatrixXd canonical = Eigen::MatrixXd::Zero(r, r);
  int col = 0;
  for (const Block& b : planes) {
    out.frame.col(col) = q.col(b.col0);
    out.frame.col(col + 1) = q.col(b.col1);
    canonical(col + 1, col) = b.a;
    canonical(col, col + 1) = -b.a;
    out.terms.push_back({b.a, col + 1, col + 2});
    col += 2;
  }
  for (Eigen::Index k : kernel) out.frame.col(col++) = q.col(k);
  for (int i = static_cast<int>(out.terms.size()); i < r / 2; ++i) out.terms.push_back({0.0, 2 * i + 1, 2 * i + 2});

  out.residual = (out.frame * canonical * out.frame.transpose() - m).cwiseAbs().maxCoeff();
  const double orthogonality = (out.frame.transpose() * out.frame - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff();
  if (out.residual > 1e-9 * scale || orthogonality > 1e-9)
    throw NumericalError("canonical bivector form failed to reconstruct input", std::max(out.residual, orthogonality));
  return out;
}

// ---------------------------------------------------------------------------
// Text form: "1/2*e1e2 - 3*e3e4", terms in canonical blade order. Unit coefficients
// print without "1*", the zero multivector prints as "0".
// ---------------------------------------------------------------------------

namespace detail {
inline std::string format_scalar(const Rational& q) { return q.get_str(); }

inline std::string format_scalar(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline bool is_one(const Rational& q) { return q == 1; }
inline bool is_one(double x) { return x == 1.0; }
inline bool is_negative(const Rational& q) { return sgn(q) < 0; }
inline bool is_negative(double x) { return std::signbit(x); }
} // namespace detail

template <CliffordScalar T>
std::string to_string(const MultiVector<T>& a) {
  if (a.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [blade, c] : a.terms()) {
    const bool negative = detail::is_negative(c);
    const T magnitude = negative ? T(-c) : c;
    if (first) out += negative ? "-" : "";
    else out += negative ? " - " : " + ";
    first = false;
    std::string body;
    for (int i : blade.indices()) body += "e" + std::to_string(i);
    if (blade.is_scalar()) out += detail::format_scalar(magnitude);
    else if (detail::is_one(magnitude)) out += body;
    else out += detail::format_scalar(magnitude) + "*" + body;
  }
  return out;
}

namespace detail {
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

template <CliffordScalar T>
T parse_scalar(std::string_view token) {
  if constexpr (std::same_as<T, Rational>) {
    return parse_rational(token);
  } else {
    if (auto slash = token.find('/'); slash != std::string_view::npos) {
      const Rational q = parse_rational(token);
      return q.get_d();
    }
    double v = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
      throw ParseError("bad coefficient '" + std::string(token) + "'");
    return v;
  }
}
} // namespace detail

/// Parses the text form. Blades may list generators in any order; repeated or unsorted
/// generators are multiplied out with the algebra's sign rules.
template <CliffordScalar T>
MultiVector<T> parse_multivector(std::string_view text, int rank) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t' && c != '\n') s += c;
  if (s.empty()) throw ParseError("empty multivector text");

  MultiVector<T> out(rank);
  std::size_t i = 0;
  bool first = true;
  while (i < s.size()) {
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') {
      negative = s[i] == '-';
      ++i;
    } else if (!first) {
      throw ParseError("expected '+' or '-' at position " + std::to_string(i));
    }
    first = false;

    T coefficient(1);
    bool have_coefficient = false;
    if (i < s.size() && (detail::is_digit(s[i]) || s[i] == '.')) {
      const std::size_t start = i;
      while (i < s.size() && (detail::is_digit(s[i]) || s[i] == '.' || s[i] == '/')) ++i;
      if (i + 1 < s.size() && (s[i] == 'e' || s[i] == 'E') &&
          (detail::is_digit(s[i + 1]) || ((s[i + 1] == '-' || s[i + 1] == '+') && i + 2 < s.size() && detail::is_digit(s[i + 2])))) {
        // a digit run followed by e<digit> is only an exponent when no '*' separates a blade
        std::size_t j = i + 1;
        if (s[j] == '-' || s[j] == '+') ++j;
        while (j < s.size() && detail::is_digit(s[j])) ++j;
        if (j == s.size() || s[j] == '*' || s[j] == '+' || s[j] == '-') i = j;
      }
      coefficient = detail::parse_scalar<T>(std::string_view(s).substr(start, i - start));
      have_coefficient = true;
      if (i < s.size() && s[i] == '*') ++i;
      else if (i < s.size() && s[i] == 'e') throw ParseError("missing '*' between coefficient and blade");
    }

    MultiVector<T> term = MultiVector<T>::scalar(rank, coefficient);
    bool have_blade = false;
    while (i < s.size() && s[i] == 'e') {
      ++i;
      const std::size_t start = i;
      while (i < s.size() && detail::is_digit(s[i])) ++i;
      if (start == i) throw ParseError("generator index expected after 'e'");
      const int index = std::stoi(s.substr(start, i - start));
      if (index < 1 || index > rank) throw ParseError("generator e" + std::to_string(index) + " outside rank " + std::to_string(rank));
      term = geometric_product(term, MultiVector<T>::generator(rank, index));
      have_blade = true;
    }
    if (!have_coefficient && !have_blade) throw ParseError("empty term at position " + std::to_string(i));
    out = negative ? out - term : out + term;
  }
  return out;
}

} // namespace twistorlab
