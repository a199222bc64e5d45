#pragma once

// Matrix realizations of the even Clifford algebra Cl_r^0 and the family
// J_ij = phi(e_i e_j).
//
// Construction: Cl_r^0 is isomorphic to Cl_{r-1} through f_s = e_s e_r (s < r), since
// f_s^2 = -1 and f_s f_t = -f_t f_s. Given real skew matrices gamma_1..gamma_{r-1}
// that anticommute and square to -Id, set
//
//   J_sr = gamma_s,    J_st = gamma_s gamma_t   (s < t < r),
//
// using e_s e_t = e_s e_r e_t e_r = f_s f_t. The gammas come from
//   k = 1        : the 2x2 rotation generator
//   k = 2, 3     : left multiplication by i, j, k on the quaternions
//   k = 4..7     : left multiplication by imaginary octonion units
//   k = 8        : doubling of the k = 7 set
//   k = 9..15    : gamma^(k-8) (x) omega  together with  Id (x) Gamma^(8)_a,
// where omega is the product of the eight Gamma^(8) (symmetric, squares to +Id and
// anticommutes with every Gamma^(8)_a). All matrices have entries in {0, +-1}.

#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "clifford.hpp"
#include "error.hpp"

namespace twistorlab {

inline constexpr int kMinRepRank = 3;
inline constexpr int kMaxRepRank = 16;

namespace detail {

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

inline Eigen::MatrixXd rotation_generator() {
  Eigen::MatrixXd e(2, 2);
  e << 0, -1, 1, 0;
  return e;
}

inline Eigen::MatrixXd pauli_z() {
  Eigen::MatrixXd z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

/// Left multiplication by a unit of a normed division algebra of dimension 4 or 8,
/// given the oriented multiplication triples (i, j, k) meaning e_i e_j = e_k.
inline std::vector<Eigen::MatrixXd> left_multiplications(int dim, const std::vector<std::array<int, 3>>& triples) {
  // table[i][j] = signed index of e_i e_j, encoded as +-(index + 1)
  std::vector<std::vector<int>> table(dim, std::vector<int>(dim, 0));
  for (int i = 0; i < dim; ++i) {
    table[0][i] = i + 1;
    table[i][0] = i + 1;
    if (i > 0) table[i][i] = -1;
  }
  for (const auto& t : triples) {
    const int a = t[0], b = t[1], c = t[2];
    table[a][b] = c + 1;
    table[b][c] = a + 1;
    table[c][a] = b + 1;
    table[b][a] = -(c + 1);
    table[c][b] = -(a + 1);
    table[a][c] = -(b + 1);
  }
  std::vector<Eigen::MatrixXd> out;
  for (int a = 1; a < dim; ++a) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(dim, dim);
    for (int b = 0; b < dim; ++b) {
      const int code = table[a][b];
      l(std::abs(code) - 1, b) = code > 0 ? 1.0 : -1.0;
    }
    out.push_back(std::move(l));
  }
  return out;
}

inline std::vector<Eigen::MatrixXd> quaternion_units() { return left_multiplications(4, {{1, 2, 3}}); }

inline std::vector<Eigen::MatrixXd> octonion_units() {
  return left_multiplications(8, {{1, 2, 3}, {1, 4, 5}, {1, 7, 6}, {2, 4, 6}, {2, 5, 7}, {3, 4, 7}, {3, 6, 5}});
}

inline std::vector<Eigen::MatrixXd> eight_generators() {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& g : octonion_units()) out.push_back(kron(g, pauli_z()));
  out.push_back(kron(Eigen::MatrixXd::Identity(8, 8), rotation_generator()));
  return out;
}

} // namespace detail

/// k real skew matrices that pairwise anticommute and square to -Id, of the minimal
/// dimension of a real Cl_{0,k}-module.
inline std::vector<Eigen::MatrixXd> clifford_generators(int k) {
  if (k < 1 || k > 15) throw Error("generator count must lie in 1..15, got " + std::to_string(k));
  if (k == 1) return {detail::rotation_generator()};
  if (k <= 3) {
    auto q = detail::quaternion_units();
    q.resize(k);
    return q;
  }
  if (k <= 7) {
    auto o = detail::octonion_units();
    o.resize(k);
    return o;
  }
  const auto big = detail::eight_generators();
  if (k == 8) return big;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(16, 16);
  for (const auto& g : big) omega = omega * g;
  const auto small = clifford_generators(k - 8);
  const auto d = small.front().rows();
  std::vector<Eigen::MatrixXd> out;
  for (const auto& g : small) out.push_back(detail::kron(g, omega));
  for (const auto& g : big) out.push_back(detail::kron(Eigen::MatrixXd::Identity(d, d), g));
  return out;
}

/// N0(r): dimension of the irreducible Cl_r^0-module produced by the construction.
inline int irreducible_dimension(int r) {
  if (r < 2 || r > kMaxRepRank) throw Error("N0(r) tabulated for r in 2..16, got " + std::to_string(r));
  const int k = r - 1;
  auto base = [](int j) {
    if (j == 0) return 1;
    if (j == 1) return 2;
    if (j <= 3) return 4;
    if (j <= 7) return 8;
    return 16;
  };
  return k <= 8 ? base(k) : 16 * base(k - 8);
}

/// r -> N0(r) for r = 2..16.
inline std::map<int, int> dimension_table() {
  std::map<int, int> t;
  for (int r = 2; r <= kMaxRepRank; ++r) t[r] = irreducible_dimension(r);
  return t;
}

/// Immutable matrix realization of Cl_r^0 on R^n, n = N0(r) * m.
class CliffordRep {
public:
  int rank() const { return rank_; }
  int multiplicity() const { return multiplicity_; }
  int dimension() const { return dimension_; }

  /// J_ij for 1 <= i < j <= r.
  const Eigen::MatrixXd& basis(int i, int j) const {
    if (!(1 <= i && i < j && j <= rank_)) throw Error("J index pair out of range");
    return family_[pair_index(i, j, rank_)];
  }

  /// J_ij for any i != j, with J_ji = -J_ij.
  Eigen::MatrixXd J(int i, int j) const { return i < j ? basis(i, j) : Eigen::MatrixXd(-basis(j, i)); }

  const std::vector<Eigen::MatrixXd>& family() const { return family_; }

  friend CliffordRep build_rep(int r, int m);
  friend CliffordRep rep_from_family(int r, int m, std::vector<Eigen::MatrixXd> family);

private:
  int rank_ = 0;
  int multiplicity_ = 0;
  int dimension_ = 0;
  std::vector<Eigen::MatrixXd> family_; // lexicographic (i, j)
};

/// Deterministic for fixed (r, m). Multiplicity is a block-diagonal direct sum.
inline CliffordRep build_rep(int r, int m) {
  if (r < kMinRepRank || r > kMaxRepRank)
    throw Error("build_rep: rank must lie in " + std::to_string(kMinRepRank) + ".." + std::to_string(kMaxRepRank) + ", got " + std::to_string(r));
  if (m < 1) throw Error("build_rep: multiplicity must be >= 1");
  const auto gamma = clifford_generators(r - 1);
  const auto d = gamma.front().rows();
  const Eigen::MatrixXd block_id = Eigen::MatrixXd::Identity(m, m);

  CliffordRep rep;
  rep.rank_ = r;
  rep.multiplicity_ = m;
  rep.dimension_ = static_cast<int>(d) * m;
  rep.family_.resize(bivector_dimension(r));
  for (int s = 1; s < r; ++s) {
    for (int t = s + 1; t < r; ++t) rep.family_[pair_index(s, t, r)] = detail::kron(block_id, gamma[s - 1] * gamma[t - 1]);
    rep.family_[pair_index(s, r, r)] = detail::kron(block_id, gamma[s - 1]);
  }
  return rep;
}

/// Wraps an externally supplied family (e.g. read from a file). No validation here.
inline CliffordRep rep_from_family(int r, int m, std::vector<Eigen::MatrixXd> family) {
  if (static_cast<int>(family.size()) != bivector_dimension(r)) throw Error("family size does not match rank");
  CliffordRep rep;
  rep.rank_ = r;
  rep.multiplicity_ = m;
  rep.dimension_ = static_cast<int>(family.front().rows());
  rep.family_ = std::move(family);
  return rep;
}

/// A = sum a_ij e_i e_j  ->  sum a_ij J_ij.
template <CliffordScalar T>
Eigen::MatrixXd phi(const CliffordRep& rep, const MultiVector<T>& a) {
  if (a.rank() != rep.rank()) throw RankMismatch(a.rank(), rep.rank());
  if (!a.is_pure_grade(2)) throw GradeError("phi expects a pure grade-2 element");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rep.dimension(), rep.dimension());
  for (const auto& [blade, c] : a.terms()) {
    const auto idx = blade.indices();
    double v;
    if constexpr (std::same_as<T, Rational>) v = c.get_d();
    else v = c;
    out.noalias() += v * rep.basis(idx[0], idx[1]);
  }
  return out;
}

/// phi applied to a lexicographic coefficient vector.
inline Eigen::MatrixXd phi_coefficients(const CliffordRep& rep, const Eigen::Ref<const Eigen::VectorXd>& a) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rep.dimension(), rep.dimension());
  for (std::size_t k = 0; k < rep.family().size(); ++k)
    if (a[static_cast<Eigen::Index>(k)] != 0.0) out.noalias() += a[static_cast<Eigen::Index>(k)] * rep.family()[k];
  return out;
}

/// Trace inner product <A, B> = tr(A^T B).
inline double trace_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a.cwiseProduct(b).sum(); }

/// Coefficients a_ij = <M, J_ij> / <J_ij, J_ij>, lexicographic, without the residual check.
inline Eigen::VectorXd project_onto_family(const CliffordRep& rep, const Eigen::MatrixXd& m) {
  Eigen::VectorXd a(rep.family().size());
  for (std::size_t k = 0; k < rep.family().size(); ++k) {
    const auto& j = rep.family()[k];
    a[static_cast<Eigen::Index>(k)] = trace_inner(m, j) / trace_inner(j, j);
  }
  return a;
}

/// Pulls M in span{J_ij} back to a bivector. Throws NumericalError when
/// max |M - phi(result)| exceeds tolerance * max(1, max|M|).
inline RealMultiVector phi_inverse(const CliffordRep& rep, const Eigen::MatrixXd& m, double tolerance = 1e-9) {
  if (m.rows() != rep.dimension() || m.cols() != rep.dimension()) throw Error("phi_inverse: matrix has wrong size");
  const Eigen::VectorXd a = project_onto_family(rep, m);
  const double residual = (m - phi_coefficients(rep, a)).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (residual > tolerance * scale) throw NumericalError("phi_inverse: matrix is not in span{J_ij}", residual);
  return bivector_from_coefficients(rep.rank(), a);
}

/// Paired rotation on r-space and on the representation space.
struct SpinRotation {
  Eigen::MatrixXd frame;  ///< R_E = exp(2t skew(A)), r x r
  Eigen::MatrixXd spin;   ///< R_T = exp(t phi(A)), n x n
  double orthogonality_defect = 0.0; ///< max of |R^T R - Id| over both
};

/// R_T J_ij R_T^{-1} = phi((R_E e_i) ^ (R_E e_j)).
template <CliffordScalar T>
SpinRotation spin_rotate(const CliffordRep& rep, const MultiVector<T>& a, double t) {
  const Eigen::MatrixXd generator = bivector_to_skew(a);
  SpinRotation out;
  out.frame = (2.0 * t * generator).exp();
  out.spin = (t * phi(rep, a)).exp();
  const auto defect = [](const Eigen::MatrixXd& r) {
    return (r.transpose() * r - Eigen::MatrixXd::Identity(r.rows(), r.cols())).cwiseAbs().maxCoeff();
  };
  out.orthogonality_defect = std::max(defect(out.frame), defect(out.spin));
  return out;
}

/// Bivector with skew matrix R skew(A) R^T.
template <CliffordScalar T>
RealMultiVector rotate_bivector(const Eigen::MatrixXd& rotation, const MultiVector<T>& a) {
  return skew_to_bivector(rotation * bivector_to_skew(a) * rotation.transpose());
}

/// max over i < j of |R_T J_ij R_T^T - phi(R_E e_i ^ R_E e_j)|.
inline double equivariance_residual(const CliffordRep& rep, const SpinRotation& rot) {
  const int r = rep.rank();
  double worst = 0.0;
  for (int i = 1; i <= r; ++i)
    for (int j = i + 1; j <= r; ++j) {
      const Eigen::MatrixXd lhs = rot.spin * rep.basis(i, j) * rot.spin.transpose();
      const Eigen::MatrixXd rotated = rot.frame * wedge_skew(Eigen::VectorXd::Unit(r, i - 1), Eigen::VectorXd::Unit(r, j - 1)) * rot.frame.transpose();
      const Eigen::MatrixXd rhs = phi(rep, skew_to_bivector(rotated));
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  return worst;
}

/// Worst-case defects of the CliffordRep invariants.
struct RepValidation {
  double skew = 0;           ///< |J + J^T|
  double orthogonal = 0;     ///< |J^T J - Id|
  double square = 0;         ///< |J^2 + Id|
  double composition = 0;    ///< |J_ij J_ik - J_jk|, i, j, k distinct
  double commutation = 0;    ///< |[J_ij, J_kl]|, {i,j} and {k,l} disjoint
  double anticommutation = 0;///< |{J_ij, J_ik}|, j != k
  double gram_min_eigenvalue = 0; ///< of the trace-inner-product Gram matrix of {J_ij}
  bool injective = false;    ///< phi is injective on bivectors

  double worst_defect() const {
    return std::max({skew, orthogonal, square, composition, commutation, anticommutation});
  }
};

namespace detail {
using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline double sparse_max_abs(const SparseMat& m) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SparseMat::InnerIterator it(m, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}
} // namespace detail

/// Checks every CliffordRep invariant. Products run on sparse copies, which keeps the
/// O(r^4) commutation sweep cheap for the 128x128 rank-16 family.
inline RepValidation validate_rep(const CliffordRep& rep) {
  using detail::SparseMat;
  const int r = rep.rank();
  const int n = rep.dimension();
  std::vector<SparseMat> sparse;
  for (const auto& j : rep.family()) sparse.push_back(j.sparseView());
  auto sj = [&](int i, int j) -> SparseMat {
    return i < j ? sparse[pair_index(i, j, r)] : SparseMat(-sparse[pair_index(j, i, r)]);
  };
  SparseMat id(n, n);
  id.setIdentity();

  RepValidation v;
  for (const auto& s : sparse) {
    const SparseMat st = s.transpose();
    v.skew = std::max(v.skew, detail::sparse_max_abs(s + st));
    v.orthogonal = std::max(v.orthogonal, detail::sparse_max_abs(SparseMat(st * s) - id));
    v.square = std::max(v.square, detail::sparse_max_abs(SparseMat(s * s) + id));
  }
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= r; ++j)
      for (int k = 1; k <= r; ++k) {
        if (i == j || j == k || i == k) continue;
        const SparseMat a = sj(i, j), b = sj(i, k);
        v.composition = std::max(v.composition, detail::sparse_max_abs(SparseMat(a * b) - sj(j, k)));
        if (j < k) v.anticommutation = std::max(v.anticommutation, detail::sparse_max_abs(SparseMat(a * b) + SparseMat(b * a)));
      }
  for (int i = 1; i <= r; ++i)
    for (int j = i + 1; j <= r; ++j)
      for (int k = 1; k <= r; ++k)
        for (int l = k + 1; l <= r; ++l) {
          if (k == i || k == j || l == i || l == j) continue;
          const SparseMat& a = sparse[pair_index(i, j, r)];
          const SparseMat& b = sparse[pair_index(k, l, r)];
          v.commutation = std::max(v.commutation, detail::sparse_max_abs(SparseMat(a * b) - SparseMat(b * a)));
        }

  const auto count = static_cast<Eigen::Index>(sparse.size());
  Eigen::MatrixXd gram(count, count);
  for (Eigen::Index a = 0; a < count; ++a)
    for (Eigen::Index b = a; b < count; ++b) gram(a, b) = gram(b, a) = sparse[a].cwiseProduct(sparse[b]).sum();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  v.gram_min_eigenvalue = es.eigenvalues().minCoeff();
  v.injective = v.gram_min_eigenvalue > 1e-9 * n;
  return v;
}

// ---------------------------------------------------------------------------
// Portable text export:
//
//   twistorlab-rep 1
//   rank <r> multiplicity <m> dimension <n>
//   J <i> <j>
//   <n rows of n entries, row-major>
//   ...
//
// Integer-valued entries print as integers, others as 17-significant-digit decimals.
// ---------------------------------------------------------------------------

inline void write_rep(std::ostream& os, const CliffordRep& rep) {
  os << "twistorlab-rep 1\n";
  os << "rank " << rep.rank() << " multiplicity " << rep.multiplicity() << " dimension " << rep.dimension() << "\n";
  const int r = rep.rank();
  for (int i = 1; i <= r; ++i)
    for (int j = i + 1; j <= r; ++j) {
      os << "J " << i << " " << j << "\n";
      const auto& m = rep.basis(i, j);
      for (Eigen::Index a = 0; a < m.rows(); ++a) {
        for (Eigen::Index b = 0; b < m.cols(); ++b) {
          if (b) os << ' ';
          const double x = m(a, b);
          if (x == std::round(x) && std::abs(x) < 1e15) os << static_cast<long long>(x);
          else os << std::setprecision(17) << x;
        }
        os << '\n';
      }
    }
}

inline CliffordRep read_rep(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "twistorlab-rep" || version != 1) throw ParseError("not a twistorlab-rep v1 stream");
  std::string k1, k2, k3;
  int r = 0, m = 0, n = 0;
  if (!(is >> k1 >> r >> k2 >> m >> k3 >> n) || k1 != "rank" || k2 != "multiplicity" || k3 != "dimension")
    throw ParseError("bad representation header");
  if (r < 2 || r > kMaxRank || n < 1) throw ParseError("bad representation dimensions");
  std::vector<Eigen::MatrixXd> family(bivector_dimension(r));
  for (int p = 0; p < bivector_dimension(r); ++p) {
    std::string tag;
    int i = 0, j = 0;
    if (!(is >> tag >> i >> j) || tag != "J" || !(1 <= i && i < j && j <= r)) throw ParseError("bad J header");
    Eigen::MatrixXd mat(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (!(is >> mat(a, b))) throw ParseError("truncated matrix entries");
    family[pair_index(i, j, r)] = std::move(mat);
  }
  return rep_from_family(r, m, std::move(family));
}

} // namespace twistorlab
