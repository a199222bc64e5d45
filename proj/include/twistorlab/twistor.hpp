#pragma once

// Twistor space Z -> M of a non-flat parallel even Clifford structure, modeled
// pointwise at p = (base point, S).
//
// Coordinates near p are (x, y): x in R^n normal coordinates on the base, y = (alpha, beta)
// the fibre exponential coordinates at S (adapted frame). The model keeps first-order
// jets only, in radial gauge:
//   metric        h_t = diag(I_n, t c I)   at p,  c = vertical scale (1/kappa),
//                 d_{x_k} h(x_i, y_b) = t c L_b(k, i),
//   horizontal    H(X) = (X, -a X),  d_{x_k} a(b, i) = L_b(k, i) = 1/2 D^b(e_k, e_i),
// where D(X, Y) are the fibre coordinates of phi^-1([R_{X,Y}, S]).
// Everything first order (Christoffel symbols, derivatives of J, brackets, Nijenhuis) is
// exact in this model; nothing second order is represented.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curvature.hpp"
#include "error.hpp"
#include "fibre.hpp"
#include "random.hpp"
#include "repmat.hpp"

namespace twistorlab {

/// J1: horizontal phi(S), vertical z.  J2: horizontal phi(S), vertical -z.
enum class AcsKind { Integrable, EellsSalamon };

struct TwistorVector {
  Eigen::VectorXd horizontal; ///< n
  Eigen::VectorXd vertical;   ///< 2(r-2), adapted coordinates at S

  Eigen::VectorXd stacked() const {
    Eigen::VectorXd w(horizontal.size() + vertical.size());
    w << horizontal, vertical;
    return w;
  }
};

class TwistorFrame {
public:
  /// vertical_scale defaults to 1/kappa (kappa > 0) or 1 (kappa <= 0).
  TwistorFrame(CurvatureModel model, FibrePoint s, double t = 1.0, std::optional<double> vertical_scale = std::nullopt)
      : model_(std::move(model)), s_(std::move(s)), t_(t) {
    if (s_.rank() != model_.rank()) throw RankMismatch(s_.rank(), model_.rank());
    if (!(t_ > 0)) throw Error("metric parameter t must be positive");
    c_ = vertical_scale ? *vertical_scale : (model_.kappa() > 0 ? 1.0 / model_.kappa() : 1.0);
    if (!(c_ > 0)) throw Error("vertical scale must be positive");
    family_ = adapted_family(model_.rep(), s_);
    const int d = fibre_dimension(model_.rank());
    const int half = d / 2;
    const double k = model_.kappa();
    l_.reserve(static_cast<std::size_t>(d));
    for (int s = 0; s < half; ++s) l_.push_back(0.5 * k * family_.j2s[static_cast<std::size_t>(s)]);
    for (int s = 0; s < half; ++s) l_.push_back(-0.5 * k * family_.j1s[static_cast<std::size_t>(s)]);
  }

  const CurvatureModel& model() const { return model_; }
  const FibrePoint& point() const { return s_; }
  const AdaptedFamily& family() const { return family_; }
  const Eigen::MatrixXd& phi_s() const { return family_.j12; }
  double t() const { return t_; }
  double vertical_scale() const { return c_; }
  int base_dimension() const { return model_.dimension(); }
  int fibre_dim() const { return fibre_dimension(model_.rank()); }
  int dimension() const { return base_dimension() + fibre_dim(); }

  TwistorFrame with_t(double t) const { return TwistorFrame(model_, s_, t, c_); }

  Eigen::VectorXd stack(const Eigen::VectorXd& x, const FibreTangent& u) const {
    check_vertical(u);
    return TwistorVector{x, u.coordinates()}.stacked();
  }
  Eigen::VectorXd lift(const Eigen::VectorXd& x) const {
    if (x.size() != base_dimension()) throw Error("horizontal vector has wrong length");
    return TwistorVector{x, Eigen::VectorXd::Zero(fibre_dim())}.stacked();
  }
  Eigen::VectorXd vertical(const FibreTangent& u) const { return stack(Eigen::VectorXd::Zero(base_dimension()), u); }
  Eigen::VectorXd horizontal_part(const Eigen::VectorXd& w) const { return w.head(base_dimension()); }
  Eigen::VectorXd vertical_coordinates(const Eigen::VectorXd& w) const { return w.tail(fibre_dim()); }
  FibreTangent vertical_part(const Eigen::VectorXd& w) const { return FibreTangent::from_coordinates(s_, vertical_coordinates(w)); }

  /// d_{x_k} a for k = 0..n-1 contracted with ex: row b is ex^T L_b.
  Eigen::MatrixXd a_derivative(const Eigen::VectorXd& ex) const {
    Eigen::MatrixXd out(fibre_dim(), base_dimension());
    for (int b = 0; b < fibre_dim(); ++b) out.row(b) = ex.transpose() * l_[static_cast<std::size_t>(b)];
    return out;
  }

  /// fibre coordinates of phi^-1([R_{X,Y}, S]), read off the adapted family.
  Eigen::VectorXd curvature_action(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd out(fibre_dim());
    for (int b = 0; b < fibre_dim(); ++b) out[b] = 2.0 * x.dot(l_[static_cast<std::size_t>(b)] * y);
    return out;
  }

  Eigen::MatrixXd metric() const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(dimension(), dimension());
    h.bottomRightCorner(fibre_dim(), fibre_dim()) *= t_ * c_;
    return h;
  }

  double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    const int n = base_dimension();
    return u.head(n).dot(v.head(n)) + t_ * c_ * u.tail(fibre_dim()).dot(v.tail(fibre_dim()));
  }

  /// sum_c e^c d_c h
  Eigen::MatrixXd metric_derivative(const Eigen::VectorXd& e) const {
    const int n = base_dimension(), d = fibre_dim();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dimension(), dimension());
    const Eigen::MatrixXd a = t_ * c_ * a_derivative(e.head(n));
    out.bottomLeftCorner(d, n) = a;
    out.topRightCorner(n, d) = a.transpose();
    return out;
  }

  /// Gamma(E, F) = sum Gamma^m_pq E^p F^q, from the metric 1-jet.
  Eigen::VectorXd christoffel(const Eigen::VectorXd& e, const Eigen::VectorXd& f) const {
    check_size(e);
    check_size(f);
    const int n = base_dimension(), d = fibre_dim();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dimension());
    // w_m = E^T (d_m h) F; only base coordinates carry derivatives
    for (int b = 0; b < d; ++b) {
      const auto& l = l_[static_cast<std::size_t>(b)];
      w.head(n) += t_ * c_ * (f[n + b] * (l * e.head(n)) + e[n + b] * (l * f.head(n)));
    }
    Eigen::VectorXd v = metric_derivative(e) * f + metric_derivative(f) * e - w;
    v.tail(d) /= t_ * c_;
    return 0.5 * v;
  }

  Eigen::MatrixXd acs_matrix(AcsKind kind = AcsKind::Integrable) const {
    const int n = base_dimension(), d = fibre_dim(), half = d / 2;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dimension(), dimension());
    j.topLeftCorner(n, n) = phi_s();
    const double sign = kind == AcsKind::Integrable ? 1.0 : -1.0;
    j.block(n, n + half, half, half) = -sign * Eigen::MatrixXd::Identity(half, half);
    j.block(n + half, n, half, half) = sign * Eigen::MatrixXd::Identity(half, half);
    return j;
  }

  /// sum_c e^c d_c J
  Eigen::MatrixXd acs_derivative(const Eigen::VectorXd& e, AcsKind kind = AcsKind::Integrable) const {
    check_size(e);
    const int n = base_dimension(), d = fibre_dim(), half = d / 2;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dimension(), dimension());
    // d_y: phi(d z) on the horizontal block
    for (int s = 0; s < half; ++s) {
      out.topLeftCorner(n, n) += e[n + s] * family_.j1s[static_cast<std::size_t>(s)];
      out.topLeftCorner(n, n) += e[n + half + s] * family_.j2s[static_cast<std::size_t>(s)];
    }
    // d_x: lower-left block -(da) phi(S) +- Jv (da)
    const Eigen::MatrixXd da = a_derivative(e.head(n));
    const Eigen::MatrixXd jv = acs_matrix(kind).bottomRightCorner(d, d);
    out.bottomLeftCorner(d, n) = -da * phi_s() + jv * da;
    return out;
  }

  Eigen::VectorXd acs(const Eigen::VectorXd& w, AcsKind kind = AcsKind::Integrable) const {
    check_size(w);
    return acs_matrix(kind) * w;
  }

private:
  void check_size(const Eigen::VectorXd& w) const {
    if (w.size() != dimension()) throw Error("twistor vector has wrong length");
  }
  void check_vertical(const FibreTangent& u) const {
    const double mismatch = (u.base().skew() - s_.skew()).cwiseAbs().maxCoeff();
    if (mismatch > 1e-9) throw NumericalError("vertical vector is based at a different fibre point", mismatch);
  }

  CurvatureModel model_;
  FibrePoint s_;
  double t_;
  double c_ = 1.0;
  AdaptedFamily family_;
  std::vector<Eigen::MatrixXd> l_;
};

// ---------------------------------------------------------------------------
// Vector field 1-jets at p.
// ---------------------------------------------------------------------------

enum class FieldClass { BasicHorizontal, AdaptedVertical, Derived };

struct FieldJet {
  Eigen::VectorXd value;
  Eigen::MatrixXd jacobian; ///< column c = d_c F
  FieldClass kind = FieldClass::Derived;
};

/// Horizontal lift of a constant base field in normal coordinates.
inline FieldJet basic_field(const TwistorFrame& frame, const Eigen::VectorXd& x) {
  const int n = frame.base_dimension(), d = frame.fibre_dim();
  FieldJet f{frame.lift(x), Eigen::MatrixXd::Zero(frame.dimension(), frame.dimension()), FieldClass::BasicHorizontal};
  // d_{x_k} of -a X: entry (b, k) = -(L_b X)_k
  Eigen::MatrixXd block(d, n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd ek = Eigen::VectorXd::Unit(n, k);
    block.col(k) = -frame.a_derivative(ek) * x;
  }
  f.jacobian.bottomLeftCorner(d, n) = block;
  return f;
}

/// Vertical field with constant coordinates in the adapted chart.
inline FieldJet vertical_field(const TwistorFrame& frame, const FibreTangent& u) {
  return FieldJet{frame.vertical(u), Eigen::MatrixXd::Zero(frame.dimension(), frame.dimension()), FieldClass::AdaptedVertical};
}

inline void check_jet(const TwistorFrame& frame, const FieldJet& f) {
  const int dim = frame.dimension();
  if (f.value.size() != dim || f.jacobian.rows() != dim || f.jacobian.cols() != dim)
    throw Error("field jet does not match the twistor frame dimension");
  if (!f.value.allFinite() || !f.jacobian.allFinite()) throw NumericalError("field jet has non-finite entries", NAN);
}

/// J F as a field.
inline FieldJet apply_acs(const TwistorFrame& frame, const FieldJet& f, AcsKind kind = AcsKind::Integrable) {
  check_jet(frame, f);
  const Eigen::MatrixXd j = frame.acs_matrix(kind);
  FieldJet out{j * f.value, j * f.jacobian, FieldClass::Derived};
  for (int c = 0; c < frame.dimension(); ++c)
    out.jacobian.col(c) += frame.acs_derivative(Eigen::VectorXd::Unit(frame.dimension(), c), kind) * f.value;
  return out;
}

inline Eigen::VectorXd lie_bracket(const TwistorFrame& frame, const FieldJet& e, const FieldJet& f) {
  check_jet(frame, e);
  check_jet(frame, f);
  return f.jacobian * e.value - e.jacobian * f.value;
}

/// Levi-Civita connection of h_t at p: nabla_E F = dF(E) + Gamma(E, F).
/// The connection is tensorial in E, so only the value of E is used.
inline Eigen::VectorXd connection_t(const TwistorFrame& frame, const Eigen::VectorXd& e, const FieldJet& f) {
  check_jet(frame, f);
  if (e.size() != frame.dimension()) throw Error("twistor vector has wrong length");
  return f.jacobian * e + frame.christoffel(e, f.value);
}

inline Eigen::VectorXd connection_t(const TwistorFrame& frame, const FieldJet& e, const FieldJet& f) {
  check_jet(frame, e);
  return connection_t(frame, e.value, f);
}

/// (nabla_E J) F
inline Eigen::VectorXd acs_covariant_derivative(const TwistorFrame& frame, const Eigen::VectorXd& e, const Eigen::VectorXd& f,
                                                AcsKind kind = AcsKind::Integrable) {
  const Eigen::MatrixXd j = frame.acs_matrix(kind);
  return frame.acs_derivative(e, kind) * f + frame.christoffel(e, j * f) - j * frame.christoffel(e, f);
}

/// N_J(E, F) from the 1-jet of J on constant coordinate fields.
inline Eigen::VectorXd nijenhuis(const TwistorFrame& frame, const Eigen::VectorXd& e, const Eigen::VectorXd& f,
                                 AcsKind kind = AcsKind::Integrable) {
  const Eigen::MatrixXd j = frame.acs_matrix(kind);
  return frame.acs_derivative(j * e, kind) * f - frame.acs_derivative(j * f, kind) * e + j * (frame.acs_derivative(f, kind) * e) -
         j * (frame.acs_derivative(e, kind) * f);
}

/// Vertical J on a fibre tangent and its Eells-Salamon variant.
inline FibreTangent acs(const TwistorFrame& frame, const FibreTangent& u) { return fibre_acs(frame.point(), u); }
inline Eigen::VectorXd acs(const TwistorFrame& frame, const Eigen::VectorXd& x) {
  if (x.size() != frame.base_dimension()) throw Error("horizontal vector has wrong length");
  return frame.phi_s() * x;
}
inline FibreTangent acs_variation(const TwistorFrame& frame, const FibreTangent& u) {
  const FibreTangent ju = fibre_acs(frame.point(), u);
  return FibreTangent(frame.point(), -ju.alpha(), -ju.beta());
}

/// O'Neill tensor on horizontal vectors: A_X Y = 1/2 V[X, Y] = phi^-1(-1/2 [R_{X,Y}, S]).
inline FibreTangent oneill_A(const TwistorFrame& frame, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd m = -0.5 * curv_bracket(frame.model(), x, y, frame.family());
  return FibreTangent::from_bivector(frame.point(), phi_inverse(frame.model().rep(), m));
}

/// O'Neill tensor A_X U (horizontal), defined by h(A_X U, Y) = -h(U, A_X Y).
inline Eigen::VectorXd oneill_A(const TwistorFrame& frame, const Eigen::VectorXd& x, const FibreTangent& u) {
  const int n = frame.base_dimension();
  Eigen::VectorXd out(n);
  const double tc = frame.t() * frame.vertical_scale();
  for (int i = 0; i < n; ++i) {
    const FibreTangent a = oneill_A(frame, x, Eigen::VectorXd(Eigen::VectorXd::Unit(n, i)));
    out[i] = -tc * (u.alpha().dot(a.alpha()) + u.beta().dot(a.beta()));
  }
  return out;
}

inline FieldJet operator+(const FieldJet& a, const FieldJet& b) {
  return FieldJet{a.value + b.value, a.jacobian + b.jacobian, FieldClass::Derived};
}

/// |nabla_E F - nabla_F E - [E, F]|
inline double torsion_residual(const TwistorFrame& frame, const FieldJet& e, const FieldJet& f) {
  return (connection_t(frame, e, f) - connection_t(frame, f, e) - lie_bracket(frame, e, f)).norm();
}

/// |E h(F, G) - h(nabla_E F, G) - h(F, nabla_E G)|
inline double metric_compatibility_residual(const TwistorFrame& frame, const Eigen::VectorXd& e, const FieldJet& f, const FieldJet& g) {
  check_jet(frame, f);
  check_jet(frame, g);
  const double derivative = f.value.dot(frame.metric_derivative(e) * g.value) + frame.inner(f.jacobian * e, g.value) +
                            frame.inner(f.value, g.jacobian * e);
  return std::abs(derivative - frame.inner(connection_t(frame, e, f), g.value) - frame.inner(f.value, connection_t(frame, e, g)));
}

/// |h(J u, J v) - h(u, v)|
inline double acs_isometry_residual(const TwistorFrame& frame, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                    AcsKind kind = AcsKind::Integrable) {
  return std::abs(frame.inner(frame.acs(u, kind), frame.acs(v, kind)) - frame.inner(u, v));
}

/// Random field from the supported classes: basic horizontal plus adapted-constant vertical.
template <typename Rng>
FieldJet random_model_field(const TwistorFrame& frame, Rng& rng) {
  const FibreTangent u = FibreTangent::from_coordinates(frame.point(), rng.normal_vector(frame.fibre_dim()));
  return basic_field(frame, rng.normal_vector(frame.base_dimension())) + vertical_field(frame, u);
}

struct ConnectionValidity {
  double torsion = 0;
  double metric = 0;
  double oneill = 0; ///< |V(nabla_X Y) - A_X Y|, meaningful at t = 1
};

/// Torsion, metric compatibility and the O'Neill cross-check on random model fields.
template <typename Rng>
ConnectionValidity connection_validity(const TwistorFrame& frame, int samples, Rng& rng) {
  ConnectionValidity out;
  for (int i = 0; i < samples; ++i) {
    const FieldJet e = random_model_field(frame, rng), f = random_model_field(frame, rng), g = random_model_field(frame, rng);
    out.torsion = std::max(out.torsion, torsion_residual(frame, e, f));
    out.metric = std::max(out.metric, metric_compatibility_residual(frame, e.value, f, g));
    const Eigen::VectorXd x = rng.normal_vector(frame.base_dimension()), y = rng.normal_vector(frame.base_dimension());
    const Eigen::VectorXd v = frame.vertical_coordinates(connection_t(frame, basic_field(frame, x), basic_field(frame, y)));
    out.oneill = std::max(out.oneill, (v - oneill_A(frame, x, y).coordinates()).norm());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nijenhuis tensor of J1 by pair type.
// ---------------------------------------------------------------------------

/// Vertical pair: fibre complex structure, finite differences in a graph chart.
inline double nijenhuis_vertical_pair(const TwistorFrame& frame, const FibreTangent& u, const FibreTangent& v, double h = 1e-4) {
  return fibre_nijenhuis(frame.point(), u, v, h);
}

struct MixedNijenhuis {
  Eigen::VectorXd j_bracket_jx_u;  ///< pi_*(J[JX, U])
  Eigen::VectorXd bracket_jx_ju;   ///< pi_*([JX, JU])
  Eigen::VectorXd expected;        ///< -phi(S) phi(U) X
  double residual = 0;             ///< |first - second|
  double formula_residual = 0;     ///< max distance of either side from expected
  double total = 0;                ///< |N(X, U)| from the jet
};

inline MixedNijenhuis nijenhuis_mixed(const TwistorFrame& frame, const Eigen::VectorXd& x, const FibreTangent& u) {
  const FieldJet xf = basic_field(frame, x);
  const FieldJet uf = vertical_field(frame, u);
  const FieldJet jx = apply_acs(frame, xf);
  const FieldJet ju = apply_acs(frame, uf);
  const Eigen::MatrixXd j = frame.acs_matrix();
  MixedNijenhuis out;
  out.j_bracket_jx_u = frame.horizontal_part(j * lie_bracket(frame, jx, uf));
  out.bracket_jx_ju = frame.horizontal_part(lie_bracket(frame, jx, ju));
  out.expected = -frame.phi_s() * (phi(frame.model().rep(), u.bivector()) * x);
  out.residual = (out.j_bracket_jx_u - out.bracket_jx_ju).norm();
  out.formula_residual = std::max((out.j_bracket_jx_u - out.expected).norm(), (out.bracket_jx_ju - out.expected).norm());
  out.total = nijenhuis(frame, xf.value, uf.value).norm();
  return out;
}

struct HorizontalNijenhuis {
  double vertical_residual = 0;   ///< operator norm of the four-term curvature expression
  double horizontal_residual = 0; ///< max |(nabla_X J) Y|, |(nabla_Y J) X|
  double total = 0;               ///< |N(X, Y)| from the jet
  bool horizontal_vanishes = false;
};

inline HorizontalNijenhuis nijenhuis_horizontal(const TwistorFrame& frame, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                                double tolerance = 1e-9) {
  HorizontalNijenhuis out;
  out.vertical_residual = frame.model().is_flat() ? 0.0 : operator_norm(four_term(frame.model(), x, y, frame.family()));
  const Eigen::VectorXd lx = frame.lift(x), ly = frame.lift(y);
  out.horizontal_residual =
      std::max(acs_covariant_derivative(frame, lx, ly).norm(), acs_covariant_derivative(frame, ly, lx).norm());
  out.horizontal_vanishes = out.horizontal_residual <= tolerance * std::max(1.0, x.norm() * y.norm());
  out.total = nijenhuis(frame, lx, ly).norm();
  return out;
}

// ---------------------------------------------------------------------------
// Identity suites.
// ---------------------------------------------------------------------------

struct IdentityResult {
  std::string id;
  std::string description;
  int samples = 0;
  double max_residual = 0;
  double tolerance = 0;
  bool pass() const { return max_residual <= tolerance; }
};

/// Random point S of the fibre: e1 ^ e2 rotated by a random rotation.
inline FibrePoint random_fibre_point(CounterRng& rng, int r) {
  const Eigen::MatrixXd q = rng.rotation(r);
  return FibrePoint::from_vectors(q.col(0), q.col(1));
}

inline FibreTangent random_fibre_tangent(CounterRng& rng, const FibrePoint& s) {
  return FibreTangent::from_coordinates(s, rng.normal_vector(fibre_dimension(s.rank())));
}

inline void require_hypothesis(const CurvatureModel& model) {
  if (auto why = model.kaehler_hypothesis_failure()) throw HypothesisError(*why);
}

/// Kaehler identities (a)-(e) of (Z, h_1, J1) at random points and vectors.
inline std::vector<IdentityResult> kaehler_identity_suite(const CurvatureModel& model, int samples, CounterRng& rng,
                                                          double tolerance = 1e-9) {
  require_hypothesis(model);
  if (samples < 1) throw Error("kaehler suite needs at least one sample");
  const int r = model.rank(), n = model.dimension();
  std::vector<IdentityResult> out{
      {"a.koszul", "2 h(nabla_U X, Y) = -h([X, Y], U)", samples, 0, tolerance},
      {"a.formula", "pi_*(nabla_U X) = -1/2 lambda J_s2 X for U = lambda J_s1", samples, 0, tolerance},
      {"b.j_nabla", "pi_*(J nabla_U X) = 1/2 U X", samples, 0, tolerance},
      {"b.nabla_j", "pi_*(nabla_U (J X)) = 1/2 U X", samples, 0, tolerance},
      {"b.horizontal", "H((nabla_U J) X) = 0", samples, 0, tolerance},
      {"c.oneill", "A_X(J Y) = J(A_X Y)", samples, 0, tolerance},
      {"c.bracket", "J12 [R_{X,Y}, J12] = [R_{X,J12 Y}, J12]", samples, 0, tolerance},
      {"d.oneill", "A_X(J U) = J(A_X U)", samples, 0, tolerance},
      {"d.connection", "H(nabla_X U) = A_X U", samples, 0, tolerance},
      {"e.horizontal", "(nabla_X J) Y = 0", samples, 0, tolerance},
      {"e.full", "(nabla_E J) F = 0 for mixed E, F", samples, 0, tolerance},
  };
  auto record = [&](std::size_t k, double v) { out[k].max_residual = std::max(out[k].max_residual, v); };

  for (int i = 0; i < samples; ++i) {
    const FibrePoint s = random_fibre_point(rng, r);
    const TwistorFrame frame(model, s, 1.0);
    const Eigen::VectorXd x = rng.normal_vector(n), y = rng.normal_vector(n);
    const FibreTangent u = random_fibre_tangent(rng, s);
    const FieldJet xf = basic_field(frame, x), yf = basic_field(frame, y), uf = vertical_field(frame, u);
    const Eigen::MatrixXd j = frame.acs_matrix();

    // (a)
    const Eigen::VectorXd nabla_u_x = connection_t(frame, uf, xf);
    record(0, std::abs(2 * frame.inner(nabla_u_x, yf.value) + frame.inner(lie_bracket(frame, xf, yf), uf.value)));
    const int s_index = static_cast<int>(rng.uniform_int(0, r - 3));
    const double lambda = rng.normal();
    Eigen::VectorXd coords = Eigen::VectorXd::Zero(fibre_dimension(r));
    coords[s_index] = -lambda; // lambda J'_s1 = -lambda f1 ^ f_s
    const FieldJet u1 = vertical_field(frame, FibreTangent::from_coordinates(s, coords));
    const Eigen::VectorXd expected_a = 0.5 * lambda * (frame.family().j2s[static_cast<std::size_t>(s_index)] * x); // -1/2 lambda J'_s2 X
    record(1, (frame.horizontal_part(connection_t(frame, u1, xf)) - expected_a).norm());

    // (b)
    const Eigen::VectorXd half_ux = 0.5 * phi(model.rep(), u.bivector()) * x;
    record(2, (frame.horizontal_part(j * nabla_u_x) - half_ux).norm());
    record(3, (frame.horizontal_part(connection_t(frame, uf, apply_acs(frame, xf))) - half_ux).norm());
    record(4, frame.horizontal_part(acs_covariant_derivative(frame, uf.value, xf.value)).norm());

    // (c)
    const FibreTangent axy = oneill_A(frame, x, y);
    const FibreTangent axjy = oneill_A(frame, x, Eigen::VectorXd(frame.phi_s() * y));
    record(5, (axjy.coordinates() - fibre_acs(s, axy).coordinates()).norm());
    const Eigen::MatrixXd& s12 = frame.phi_s();
    const Eigen::MatrixXd lhs = s12 * curv_bracket(model, x, y, frame.family());
    const Eigen::MatrixXd rhs = curv_bracket(model, x, Eigen::VectorXd(s12 * y), frame.family());
    record(6, operator_norm(lhs - rhs));

    // (d)
    const Eigen::VectorXd ax_ju = oneill_A(frame, x, fibre_acs(s, u));
    const Eigen::VectorXd ax_u = oneill_A(frame, x, u);
    record(7, (ax_ju - s12 * ax_u).norm());
    record(8, (frame.horizontal_part(connection_t(frame, xf, uf)) - ax_u).norm());

    // (e)
    record(9, acs_covariant_derivative(frame, xf.value, yf.value).norm());
    const Eigen::VectorXd e = frame.stack(rng.normal_vector(n), random_fibre_tangent(rng, s));
    const Eigen::VectorXd f = frame.stack(rng.normal_vector(n), random_fibre_tangent(rng, s));
    record(10, acs_covariant_derivative(frame, e, f).norm());
  }
  return out;
}

struct NearlyKaehlerReport {
  int samples = 0;
  double skew_residual = 0;       ///< max |(nabla_E J2) E|
  double tolerance = 0;
  double min_nijenhuis_ratio = 0; ///< min |N_J2(X, U)| / (|X| |U|)
  double max_nijenhuis_ratio = 0;
  double witness_fraction = 0;    ///< share of samples with ratio above the threshold
  double witness_threshold = 0.1;
  double max_kaehler_defect = 0;  ///< max |(nabla_E J2) F| / (|E| |F|), must be nonzero
  Eigen::VectorXd witness_x;
  Eigen::VectorXd witness_u;
  bool nearly_kaehler() const { return skew_residual <= tolerance; }
  bool non_integrable() const { return witness_fraction >= 0.95; }
};

/// (Z, h_{1/2}, J2): nearly Kaehler and not integrable.
inline NearlyKaehlerReport nearly_kaehler_check(const CurvatureModel& model, int samples, CounterRng& rng, double tolerance = 1e-9,
                                                double witness_threshold = 0.1) {
  require_hypothesis(model);
  if (samples < 1) throw Error("nearly-Kaehler check needs at least one sample");
  const int r = model.rank(), n = model.dimension();
  NearlyKaehlerReport out;
  out.samples = samples;
  out.tolerance = tolerance;
  out.witness_threshold = witness_threshold;
  out.min_nijenhuis_ratio = INFINITY;
  int witnesses = 0;
  double best = -1;
  for (int i = 0; i < samples; ++i) {
    const TwistorFrame frame(model, random_fibre_point(rng, r), 0.5);
    const Eigen::VectorXd e = frame.stack(rng.normal_vector(n), random_fibre_tangent(rng, frame.point()));
    const Eigen::VectorXd f = frame.stack(rng.normal_vector(n), random_fibre_tangent(rng, frame.point()));
    out.skew_residual = std::max(out.skew_residual, acs_covariant_derivative(frame, e, e, AcsKind::EellsSalamon).norm());
    out.max_kaehler_defect =
        std::max(out.max_kaehler_defect, acs_covariant_derivative(frame, e, f, AcsKind::EellsSalamon).norm() / (e.norm() * f.norm()));

    const Eigen::VectorXd x = rng.normal_vector(n);
    const FibreTangent u = random_fibre_tangent(rng, frame.point());
    const double ratio = nijenhuis(frame, frame.lift(x), frame.vertical(u), AcsKind::EellsSalamon).norm() / (x.norm() * u.coordinates().norm());
    out.min_nijenhuis_ratio = std::min(out.min_nijenhuis_ratio, ratio);
    out.max_nijenhuis_ratio = std::max(out.max_nijenhuis_ratio, ratio);
    if (ratio > witness_threshold) ++witnesses;
    if (ratio > best) {
      best = ratio;
      out.witness_x = x;
      out.witness_u = u.coordinates();
    }
  }
  out.witness_fraction = static_cast<double>(witnesses) / samples;
  return out;
}

// ---------------------------------------------------------------------------
// Flat model R^n x Gr~(2, r): J1 computed globally on a coordinate grid.
// ---------------------------------------------------------------------------

struct GridSpec {
  int points_per_axis = 3;
  double extent = 0.2;   ///< coordinates range over [-extent, extent]
  double step = 1e-4;    ///< forward-difference step h
  int base_axes = 2;
  int fibre_axes = 2;
  int pairs = 3;         ///< random vector pairs per grid point

  void validate(int n, int d) const {
    if (points_per_axis < 1) throw Error("grid needs at least one point per axis");
    if (!(extent >= 0) || !(step > 0)) throw Error("grid extent must be non-negative and step positive");
    if (base_axes < 0 || base_axes > n || fibre_axes < 0 || fibre_axes > d) throw Error("grid axes exceed the coordinate dimension");
    if (pairs < 1) throw Error("grid needs at least one vector pair per point");
  }
};

struct FlatGlobalReport {
  int points = 0;
  int pairs = 0;
  double max_residual = 0;         ///< Richardson-extrapolated forward differences
  double max_residual_coarse = 0;  ///< plain forward differences at h
  double convergence_ratio = 0;    ///< sum e(h) / sum e(h/2); first order gives 2
  std::vector<std::string> warnings;
  bool first_order() const { return std::abs(convergence_ratio - 2.0) <= 0.4; }
};

/// J1 on R^n x Gr~(2, r) in product coordinates (x, chart coordinates y).
class FlatModel {
public:
  FlatModel(int r, int m) : rep_(build_rep(r, m)), chart_(FibrePoint::axis(r, 1, 2)) {}

  int base_dimension() const { return rep_.dimension(); }
  int fibre_dim() const { return chart_.dimension(); }
  int dimension() const { return base_dimension() + fibre_dim(); }
  const GraphChart& chart() const { return chart_; }

  Eigen::MatrixXd operator()(const Eigen::VectorXd& p) const {
    if (p.size() != dimension()) throw Error("flat model point has wrong length");
    const int n = base_dimension(), d = fibre_dim();
    const Eigen::VectorXd y = p.tail(d);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n + d, n + d);
    j.topLeftCorner(n, n) = phi(rep_, skew_to_bivector(chart_.point_skew(y)));
    j.bottomRightCorner(d, d) = chart_.acs_matrix(y);
    return j;
  }

private:
  CliffordRep rep_;
  GraphChart chart_;
};

inline FlatGlobalReport flat_model_global_check(int r, int m, const GridSpec& grid, CounterRng& rng) {
  const FlatModel acs(r, m);
  const int n = acs.base_dimension(), d = acs.fibre_dim();
  grid.validate(n, d);
  FlatGlobalReport out;
  if (grid.step >= 1e-2) out.warnings.push_back("finite-difference step h >= 1e-2: grid too coarse for reliable residuals");

  const int axes = grid.base_axes + grid.fibre_axes;
  long total = 1;
  for (int a = 0; a < axes; ++a) total *= grid.points_per_axis;
  const FiniteDifference coarse{grid.step, DifferenceScheme::Forward, false};
  const FiniteDifference fine{grid.step / 2, DifferenceScheme::Forward, false};
  const FiniteDifference extrapolated{grid.step, DifferenceScheme::Forward, true};
  double sum_coarse = 0, sum_fine = 0;
  for (long idx = 0; idx < total; ++idx) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n + d);
    long rest = idx;
    for (int a = 0; a < axes; ++a) {
      const long k = rest % grid.points_per_axis;
      rest /= grid.points_per_axis;
      const double v = grid.points_per_axis == 1 ? 0.0 : -grid.extent + 2.0 * grid.extent * static_cast<double>(k) / (grid.points_per_axis - 1);
      p[a < grid.base_axes ? a : n + (a - grid.base_axes)] = v;
    }
    for (int q = 0; q < grid.pairs; ++q) {
      Eigen::VectorXd e = rng.normal_vector(n + d), f = rng.normal_vector(n + d);
      if (q == 0) { // one purely horizontal-vertical pair
        e.tail(d).setZero();
        f.head(n).setZero();
      }
      const double ec = nijenhuis_fd(acs, p, e, f, coarse).norm();
      const double ef = nijenhuis_fd(acs, p, e, f, fine).norm();
      sum_coarse += ec;
      sum_fine += ef;
      out.max_residual_coarse = std::max(out.max_residual_coarse, ec);
      out.max_residual = std::max(out.max_residual, nijenhuis_fd(acs, p, e, f, extrapolated).norm());
      ++out.pairs;
    }
    ++out.points;
  }
  out.convergence_ratio = sum_fine > 0 ? sum_coarse / sum_fine : INFINITY;
  return out;
}

} // namespace twistorlab
