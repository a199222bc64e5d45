#pragma once

// The twistor fibre: oriented 2-planes in r-space, modeled as unit decomposable
// bivectors z = f1 ^ f2. Tangent vectors at z are sum_s alpha_s f1^f_s + beta_s f2^f_s
// (s = 3..r) in an adapted frame; the complex structure is Clifford multiplication by z.

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "clifford.hpp"
#include "error.hpp"
#include "repmat.hpp"

namespace twistorlab {

inline constexpr double kFibreTolerance = 1e-10;

/// Gram-Schmidt completion pivot: canonical basis candidates whose residual after
/// projection is below this are skipped.
inline constexpr double kFramePivot = 1e-6;

inline int fibre_dimension(int r) { return 2 * (r - 2); }

/// Frame-independent inner product on bivectors: sum of a_ij b_ij = tr(A^T B) / 2.
inline double bivector_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return 0.5 * a.cwiseProduct(b).sum(); }

namespace detail {

inline Eigen::MatrixXd adapted_frame_from_skew(const Eigen::MatrixXd& z) {
  const auto r = z.rows();
  const Eigen::MatrixXd plane = -z * z; // projector onto the plane for unit decomposable z
  Eigen::MatrixXd frame(r, r);
  Eigen::Index first = -1;
  for (Eigen::Index k = 0; k < r; ++k) {
    const Eigen::VectorXd p = plane.col(k);
    if (p.norm() > kFramePivot) {
      frame.col(0) = p.normalized();
      first = k;
      break;
    }
  }
  if (first < 0) throw NumericalError("adapted_frame: bivector has no plane", 0.0);
  frame.col(1) = (z * frame.col(0)).normalized();
  Eigen::Index filled = 2;
  for (Eigen::Index k = 0; k < r && filled < r; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(r, k);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < filled; ++c) v -= frame.col(c).dot(v) * frame.col(c);
    if (v.norm() < kFramePivot) continue;
    frame.col(filled++) = v.normalized();
  }
  if (filled != r) throw NumericalError("adapted_frame: completion failed", static_cast<double>(r - filled));
  if (r > 2 && frame.determinant() < 0) frame.col(r - 1) = -frame.col(r - 1);
  return frame;
}

} // namespace detail

/// Unit decomposable bivector together with its deterministic adapted frame.
class FibrePoint {
public:
  /// Validates |z|^2 = 1 and z ^ z = 0 within tolerance.
  static FibrePoint from_bivector(const RealMultiVector& z, double tolerance = kFibreTolerance) {
    if (!z.is_pure_grade(2)) throw GradeError("fibre point must be a bivector");
    if (z.rank() < 2) throw Error("fibre point needs rank >= 2");
    const double n2 = norm2(z);
    if (std::abs(n2 - 1.0) > tolerance) throw NumericalError("fibre point is not unit", std::abs(n2 - 1.0));
    double wedge_defect = 0.0;
    const RealMultiVector zz = wedge(z, z);
    for (const auto& [b, c] : zz.terms()) wedge_defect = std::max(wedge_defect, std::abs(c));
    if (wedge_defect > tolerance) throw NumericalError("fibre point is not decomposable", wedge_defect);
    FibrePoint p;
    p.z_ = z;
    p.skew_ = bivector_to_skew(z);
    p.frame_ = detail::adapted_frame_from_skew(p.skew_);
    return p;
  }

  /// z = v1 ^ v2 for orthonormal v1, v2 (checked).
  static FibrePoint from_vectors(const Eigen::VectorXd& v1, const Eigen::VectorXd& v2, double tolerance = kFibreTolerance) {
    const double defect = std::max({std::abs(v1.norm() - 1.0), std::abs(v2.norm() - 1.0), std::abs(v1.dot(v2))});
    if (defect > tolerance) throw NumericalError("fibre point vectors are not orthonormal", defect);
    return from_bivector(skew_to_bivector(wedge_skew(v1, v2)), tolerance);
  }

  static FibrePoint axis(int r, int i, int j) { return from_bivector(RealMultiVector::bivector(r, i, j, 1.0)); }

  int rank() const { return z_.rank(); }
  const RealMultiVector& bivector() const { return z_; }
  const Eigen::MatrixXd& skew() const { return skew_; }
  /// Orthonormal, oriented, with z = f1 ^ f2.
  const Eigen::MatrixXd& frame() const { return frame_; }
  Eigen::VectorXd coefficients() const { return bivector_coefficients(z_); }

private:
  FibrePoint() : z_(2) {}

  RealMultiVector z_;
  Eigen::MatrixXd skew_;
  Eigen::MatrixXd frame_;
};

/// Oriented orthonormal frame f with z = f1 ^ f2; completion by Gram-Schmidt over the
/// canonical basis in index order.
inline Eigen::MatrixXd adapted_frame(const FibrePoint& z) { return z.frame(); }

/// max |phi(z)^2 + Id|; membership of phi(z) in the space of complex structures.
inline double phi_square_defect(const CliffordRep& rep, const FibrePoint& z) {
  const Eigen::MatrixXd j = phi(rep, z.bivector());
  return (j * j + Eigen::MatrixXd::Identity(rep.dimension(), rep.dimension())).cwiseAbs().maxCoeff();
}

/// sum_s alpha_s f1^f_s + beta_s f2^f_s in the adapted frame of base.
class FibreTangent {
public:
  FibreTangent(FibrePoint base, Eigen::VectorXd alpha, Eigen::VectorXd beta)
      : base_(std::move(base)), alpha_(std::move(alpha)), beta_(std::move(beta)) {
    const int d = base_.rank() - 2;
    if (alpha_.size() != d || beta_.size() != d) throw Error("fibre tangent needs r-2 alpha and beta coefficients");
  }

  /// Coordinates stacked as (alpha_3..alpha_r, beta_3..beta_r).
  static FibreTangent from_coordinates(FibrePoint base, const Eigen::VectorXd& c) {
    const int d = base.rank() - 2;
    if (c.size() != 2 * d) throw Error("fibre tangent coordinate vector has wrong length");
    return FibreTangent(std::move(base), c.head(d), c.tail(d));
  }

  /// Decomposes a bivector; throws if it leaves the tangent space by more than tolerance.
  static FibreTangent from_skew(FibrePoint base, const Eigen::MatrixXd& v, double tolerance = 1e-9) {
    const int r = base.rank();
    const Eigen::MatrixXd& f = base.frame();
    Eigen::VectorXd alpha(r - 2), beta(r - 2);
    for (int s = 2; s < r; ++s) {
      alpha[s - 2] = f.col(s).dot(v * f.col(0));
      beta[s - 2] = f.col(s).dot(v * f.col(1));
    }
    FibreTangent t(std::move(base), alpha, beta);
    const double residual = (t.skew() - v).cwiseAbs().maxCoeff();
    if (residual > tolerance * std::max(1.0, v.cwiseAbs().maxCoeff()))
      throw NumericalError("bivector is not tangent to the fibre", residual);
    return t;
  }

  static FibreTangent from_bivector(FibrePoint base, const RealMultiVector& v, double tolerance = 1e-9) {
    return from_skew(std::move(base), bivector_to_skew(v), tolerance);
  }

  static FibreTangent zero(FibrePoint base) {
    const int d = base.rank() - 2;
    return FibreTangent(std::move(base), Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d));
  }

  const FibrePoint& base() const { return base_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::VectorXd& beta() const { return beta_; }

  Eigen::VectorXd coordinates() const {
    Eigen::VectorXd c(alpha_.size() * 2);
    c << alpha_, beta_;
    return c;
  }

  Eigen::MatrixXd skew() const {
    const Eigen::MatrixXd& f = base_.frame();
    const auto d = alpha_.size();
    const Eigen::VectorXd a = f.rightCols(d) * alpha_;
    const Eigen::VectorXd b = f.rightCols(d) * beta_;
    return wedge_skew(f.col(0), a) + wedge_skew(f.col(1), b);
  }

  RealMultiVector bivector() const { return skew_to_bivector(skew()); }

private:
  FibrePoint base_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd beta_;
};

/// Vertical metric: scale * (sum alpha^2 + beta^2), i.e. scale times the coefficient
/// norm on bivectors. The default scale 1/kappa gives |e_i ^ e_j|^2 = 1/kappa.
struct FibreMetric {
  double kappa = 1.0;
  double scale = 1.0;

  static FibreMetric for_kappa(double kappa) {
    if (!(kappa > 0)) throw HypothesisError("fibre metric needs kappa > 0");
    return FibreMetric{kappa, 1.0 / kappa};
  }

  double inner(const FibreTangent& u, const FibreTangent& v) const {
    return scale * (u.alpha().dot(v.alpha()) + u.beta().dot(v.beta()));
  }

  /// Einstein constant of this metric on the oriented 2-plane Grassmannian of r-space.
  /// The coefficient metric (scale 1) is the symmetric-space metric with Ric = (r - 2) g.
  double einstein_constant(int r) const { return (r - 2) / scale; }
};

/// z . v, i.e. (alpha, beta) -> (-beta, alpha).
inline FibreTangent fibre_acs(const FibrePoint& z, const FibreTangent& v, double tolerance = 1e-9) {
  const double mismatch = (z.skew() - v.base().skew()).cwiseAbs().maxCoeff();
  if (mismatch > tolerance) throw NumericalError("fibre_acs: tangent vector is based at a different point", mismatch);
  return FibreTangent(z, -v.beta(), v.alpha());
}

/// Rotation generator G (skew, r x r) moving the plane of z with initial velocity v:
/// G f2 = sum alpha_s f_s, G f1 = -sum beta_s f_s.
inline Eigen::MatrixXd retract_generator(const FibreTangent& v) {
  const Eigen::MatrixXd& f = v.base().frame();
  const auto d = v.alpha().size();
  const Eigen::VectorXd a = f.rightCols(d) * v.alpha();
  const Eigen::VectorXd b = f.rightCols(d) * v.beta();
  return (a * f.col(1).transpose() - f.col(1) * a.transpose()) - (b * f.col(0).transpose() - f.col(0) * b.transpose());
}

/// Geodesic retraction: rotate the plane of z by exp(t G). retract(z, v, 0) = z and
/// d/dt at 0 equals v.
inline FibrePoint retract(const FibrePoint& z, const FibreTangent& v, double t) {
  if (t == 0.0) return z;
  const Eigen::MatrixXd rot = (t * retract_generator(v)).exp();
  const Eigen::VectorXd f1 = rot * z.frame().col(0);
  const Eigen::VectorXd f2 = rot * z.frame().col(1);
  return FibrePoint::from_bivector(skew_to_bivector(wedge_skew(f1, f2)), 1e-9);
}

/// Tangent vector v pushed forward by a rotation fixing the plane of z.
inline FibreTangent rotate_tangent(const Eigen::MatrixXd& rotation, const FibreTangent& v) {
  return FibreTangent::from_skew(v.base(), rotation * v.skew() * rotation.transpose());
}

// ---------------------------------------------------------------------------
// Graph chart around a centre c with adapted frame f:
//   y = (alpha, beta) -> plane spanned by u1 = f1 - sum beta_s f_s, u2 = f2 + sum alpha_s f_s.
// Its differential at y = 0 is the identity on (alpha, beta) coordinates.
// ---------------------------------------------------------------------------

class GraphChart {
public:
  explicit GraphChart(FibrePoint centre, double metric_scale = 1.0) : centre_(std::move(centre)), scale_(metric_scale) {}

  const FibrePoint& centre() const { return centre_; }
  int rank() const { return centre_.rank(); }
  int dimension() const { return fibre_dimension(rank()); }

  Eigen::MatrixXd point_skew(const Eigen::VectorXd& y) const {
    const auto [u1, u2] = spanning(y);
    const Eigen::MatrixXd w = wedge_skew(u1, u2);
    return w / std::sqrt(bivector_inner(w, w));
  }

  FibrePoint point(const Eigen::VectorXd& y) const { return FibrePoint::from_bivector(skew_to_bivector(point_skew(y)), 1e-9); }

  /// d z / d y_a at y, as skew matrices.
  std::vector<Eigen::MatrixXd> tangent_basis(const Eigen::VectorXd& y) const {
    const auto [u1, u2] = spanning(y);
    const Eigen::MatrixXd w = wedge_skew(u1, u2);
    const double norm = std::sqrt(bivector_inner(w, w));
    const Eigen::MatrixXd& f = centre_.frame();
    const int d = rank() - 2;
    std::vector<Eigen::MatrixXd> out;
    out.reserve(2 * d);
    for (int k = 0; k < 2 * d; ++k) {
      const Eigen::VectorXd fs = f.col(2 + (k % d));
      const Eigen::MatrixXd dw = k < d ? wedge_skew(u1, fs) : wedge_skew(-fs, u2);
      out.push_back(dw / norm - w * (bivector_inner(w, dw) / (norm * norm * norm)));
    }
    return out;
  }

  /// Chart coordinates of a tangent bivector at chart point y (least squares).
  Eigen::VectorXd tangent_coordinates(const Eigen::VectorXd& y, const Eigen::MatrixXd& v) const {
    const auto basis = tangent_basis(y);
    return solve_in_basis(basis, v);
  }

  /// Coordinates of z; throws if z is not in the chart domain (opposite orientation or
  /// plane meeting the complement of span(f1, f2)).
  Eigen::VectorXd coordinates_of(const FibrePoint& z) const {
    const Eigen::MatrixXd& f = centre_.frame();
    const Eigen::MatrixXd plane = z.frame().leftCols(2);
    const Eigen::Matrix2d m = f.leftCols(2).transpose() * plane;
    if (m.determinant() <= 1e-8) throw NumericalError("point outside the graph chart", m.determinant());
    const Eigen::MatrixXd u = plane * m.inverse(); // <u1,f1>=1, <u1,f2>=0, <u2,f1>=0, <u2,f2>=1
    const int d = rank() - 2;
    Eigen::VectorXd y(2 * d);
    for (int s = 0; s < d; ++s) {
      y[s] = f.col(2 + s).dot(u.col(1));
      y[d + s] = -f.col(2 + s).dot(u.col(0));
    }
    return y;
  }

  /// Fibre complex structure v -> z . v in chart coordinates at y.
  Eigen::MatrixXd acs_matrix(const Eigen::VectorXd& y) const {
    const Eigen::MatrixXd z = point_skew(y);
    const auto basis = tangent_basis(y);
    Eigen::MatrixXd out(dimension(), dimension());
    for (int a = 0; a < dimension(); ++a) out.col(a) = solve_in_basis(basis, z * basis[a] - basis[a] * z);
    return out;
  }

  /// Metric scale * <d_a z, d_b z>.
  Eigen::MatrixXd metric(const Eigen::VectorXd& y) const {
    const auto basis = tangent_basis(y);
    Eigen::MatrixXd g(dimension(), dimension());
    for (int a = 0; a < dimension(); ++a)
      for (int b = a; b < dimension(); ++b) g(a, b) = g(b, a) = scale_ * bivector_inner(basis[a], basis[b]);
    return g;
  }

private:
  std::pair<Eigen::VectorXd, Eigen::VectorXd> spanning(const Eigen::VectorXd& y) const {
    const int d = rank() - 2;
    if (y.size() != 2 * d) throw Error("chart coordinate vector has wrong length");
    const Eigen::MatrixXd& f = centre_.frame();
    Eigen::VectorXd u1 = f.col(0) - f.rightCols(d) * y.tail(d);
    Eigen::VectorXd u2 = f.col(1) + f.rightCols(d) * y.head(d);
    return {u1, u2};
  }

  static Eigen::VectorXd solve_in_basis(const std::vector<Eigen::MatrixXd>& basis, const Eigen::MatrixXd& v) {
    const auto d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd gram(d, d);
    Eigen::VectorXd rhs(d);
    for (Eigen::Index a = 0; a < d; ++a) {
      rhs[a] = bivector_inner(basis[a], v);
      for (Eigen::Index b = a; b < d; ++b) gram(a, b) = gram(b, a) = bivector_inner(basis[a], basis[b]);
    }
    return gram.ldlt().solve(rhs);
  }

  FibrePoint centre_;
  double scale_;
};

// ---------------------------------------------------------------------------
// Finite-difference geometry on the fibre.
// ---------------------------------------------------------------------------

enum class DifferenceScheme { Forward, Central };

struct FiniteDifference {
  double step = 1e-4;
  DifferenceScheme scheme = DifferenceScheme::Central;
  /// Combine steps h and h/2 to cancel the leading error term.
  bool richardson = false;

  void validate() const {
    if (!(step > 0)) throw Error("finite-difference step must be positive");
  }
};

/// Directional derivative of a matrix-valued function of chart coordinates.
template <typename F>
Eigen::MatrixXd directional_derivative(const F& f, const Eigen::VectorXd& y, const Eigen::VectorXd& w, const FiniteDifference& fd) {
  fd.validate();
  auto once = [&](double h) -> Eigen::MatrixXd {
    if (fd.scheme == DifferenceScheme::Central) return (f(Eigen::VectorXd(y + h * w)) - f(Eigen::VectorXd(y - h * w))) / (2 * h);
    return (f(Eigen::VectorXd(y + h * w)) - f(y)) / h;
  };
  const Eigen::MatrixXd coarse = once(fd.step);
  if (!fd.richardson) return coarse;
  const Eigen::MatrixXd fine = once(fd.step / 2);
  if (fd.scheme == DifferenceScheme::Central) return (4.0 * fine - coarse) / 3.0;
  return 2.0 * fine - coarse;
}

/// Nijenhuis tensor of a matrix field J(y) on constant coordinate fields x, y:
///   N = (d_{Jx} J) y - (d_{Jy} J) x + J (d_y J) x - J (d_x J) y.
template <typename F>
Eigen::VectorXd nijenhuis_fd(const F& acs, const Eigen::VectorXd& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const FiniteDifference& fd) {
  const Eigen::MatrixXd j = acs(p);
  const Eigen::VectorXd jx = j * x, jy = j * y;
  const Eigen::MatrixXd d_jx = directional_derivative(acs, p, jx, fd);
  const Eigen::MatrixXd d_jy = directional_derivative(acs, p, jy, fd);
  const Eigen::MatrixXd d_x = directional_derivative(acs, p, x, fd);
  const Eigen::MatrixXd d_y = directional_derivative(acs, p, y, fd);
  return d_jx * y - d_jy * x + j * (d_y * x) - j * (d_x * y);
}

/// Chart centred away from z so that z sits at nonzero chart coordinates and the
/// finite differences see a non-constant complex structure.
inline GraphChart offset_chart(const FibrePoint& z, double offset = 0.3) {
  const int d = z.rank() - 2;
  Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(2 * d, 1.0, 2.0);
  c.normalize();
  return GraphChart(retract(z, FibreTangent::from_coordinates(z, c), offset));
}

/// Norm of the Nijenhuis tensor of the fibre complex structure at z on (u, v), by
/// finite-difference brackets of coordinate fields in a graph chart.
inline double fibre_nijenhuis(const FibrePoint& z, const FibreTangent& u, const FibreTangent& v, const FiniteDifference& fd) {
  fd.validate();
  const GraphChart chart = offset_chart(z);
  const Eigen::VectorXd y0 = chart.coordinates_of(z);
  const Eigen::VectorXd cu = chart.tangent_coordinates(y0, u.skew());
  const Eigen::VectorXd cv = chart.tangent_coordinates(y0, v.skew());
  auto acs = [&chart](const Eigen::VectorXd& y) { return chart.acs_matrix(y); };
  return nijenhuis_fd(acs, y0, cu, cv, fd).norm();
}

inline double fibre_nijenhuis(const FibrePoint& z, const FibreTangent& u, const FibreTangent& v, double h) {
  return fibre_nijenhuis(z, u, v, FiniteDifference{h, DifferenceScheme::Central, false});
}

/// d(omega)(a, b, c) for omega(x, y) = g(J x, y) and constant coordinate fields at z.
inline double fibre_kahler_form_defect(const FibrePoint& z, const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                                       const FiniteDifference& fd) {
  const GraphChart chart = offset_chart(z);
  const Eigen::VectorXd y0 = chart.coordinates_of(z);
  auto omega = [&chart](const Eigen::VectorXd& y) -> Eigen::MatrixXd {
    return chart.acs_matrix(y).transpose() * chart.metric(y);
  };
  const double t1 = b.dot(directional_derivative(omega, y0, a, fd) * c);
  const double t2 = c.dot(directional_derivative(omega, y0, b, fd) * a);
  const double t3 = a.dot(directional_derivative(omega, y0, c, fd) * b);
  return std::abs(t1 + t2 + t3);
}

/// Ricci tensor of the fibre metric at z by finite differences in the graph chart
/// centred at z (metric exact, Christoffels and their derivatives by central differences).
struct FibreRicci {
  Eigen::MatrixXd metric;
  Eigen::MatrixXd ricci;
  double einstein_constant = 0.0; ///< mean eigenvalue of metric^-1 ricci
  double einstein_defect = 0.0;   ///< max |ricci - einstein_constant * metric|
};

inline FibreRicci fibre_ricci_fd(const FibrePoint& z, const FibreMetric& metric, double h = 1e-3) {
  if (!(h > 0)) throw Error("finite-difference step must be positive");
  const GraphChart chart(z, metric.scale);
  const int d = chart.dimension();
  using Christoffel = std::vector<Eigen::MatrixXd>; // gamma[k](i, j) = Gamma^k_ij
  auto christoffel = [&](const Eigen::VectorXd& y) {
    std::vector<Eigen::MatrixXd> dg(d);
    for (int l = 0; l < d; ++l) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(d, l);
      dg[l] = (chart.metric(y + h * e) - chart.metric(y - h * e)) / (2 * h);
    }
    const Eigen::MatrixXd ginv = chart.metric(y).inverse();
    Christoffel gamma(d, Eigen::MatrixXd::Zero(d, d));
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double s = 0;
          for (int l = 0; l < d; ++l) s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
          gamma[k](i, j) = 0.5 * s;
        }
    return gamma;
  };
  const Eigen::VectorXd y0 = Eigen::VectorXd::Zero(d);
  const Christoffel g0 = christoffel(y0);
  std::vector<Christoffel> dgamma(d); // dgamma[c][a](d, b) = d_c Gamma^a_db
  for (int c = 0; c < d; ++c) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(d, c);
    const Christoffel plus = christoffel(y0 + h * e), minus = christoffel(y0 - h * e);
    dgamma[c].resize(d);
    for (int a = 0; a < d; ++a) dgamma[c][a] = (plus[a] - minus[a]) / (2 * h);
  }
  FibreRicci out;
  out.metric = chart.metric(y0);
  out.ricci = Eigen::MatrixXd::Zero(d, d);
  // Ric_bd = R^a_bad,  R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
  for (int b = 0; b < d; ++b)
    for (int dd = 0; dd < d; ++dd) {
      double s = 0;
      for (int a = 0; a < d; ++a) {
        s += dgamma[a][a](dd, b) - dgamma[dd][a](a, b);
        for (int e = 0; e < d; ++e) s += g0[a](a, e) * g0[e](dd, b) - g0[a](dd, e) * g0[e](a, b);
      }
      out.ricci(b, dd) = s;
    }
  const Eigen::MatrixXd shape = out.metric.inverse() * out.ricci;
  out.einstein_constant = shape.trace() / d;
  out.einstein_defect = (out.ricci - out.einstein_constant * out.metric).cwiseAbs().maxCoeff();
  return out;
}

// ---------------------------------------------------------------------------
// Text form: a_ij in lexicographic (i, j) order, 17 significant digits.
// ---------------------------------------------------------------------------

inline std::string to_string(const FibrePoint& z) {
  std::ostringstream os;
  os << std::setprecision(17);
  const Eigen::VectorXd c = z.coefficients();
  for (Eigen::Index k = 0; k < c.size(); ++k) os << (k ? " " : "") << c[k];
  return os.str();
}

inline FibrePoint parse_fibre_point(const std::string& text, int r) {
  std::istringstream is(text);
  Eigen::VectorXd c(bivector_dimension(r));
  for (Eigen::Index k = 0; k < c.size(); ++k)
    if (!(is >> c[k])) throw ParseError("fibre point needs " + std::to_string(c.size()) + " coefficients");
  std::string extra;
  if (is >> extra) throw ParseError("trailing data after fibre point coefficients");
  return FibrePoint::from_bivector(bivector_from_coefficients(r, c), 1e-9);
}

} // namespace twistorlab
