#pragma once

// Algebraic curvature model of a parallel, non-flat even Clifford structure. Only the
// bracket of the Riemann curvature with the Clifford endomorphisms is modeled: at a
// fibre point S = f1 ^ f2 with adapted family J'_ab = phi(f_a ^ f_b),
//
//   [R_{X,Y}, phi(S)] = kappa * sum_{s>2} ( g(J'_s1 X, Y) J'_s2 - g(J'_s2 X, Y) J'_s1 ).
//
// The sum is invariant under rotations of the adapted frame that fix S, so evaluating
// it in any adapted frame gives a frame-independent result.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "fibre.hpp"
#include "rational.hpp"
#include "repmat.hpp"

namespace twistorlab {

class CurvatureModel {
public:
  CurvatureModel(std::shared_ptr<const CliffordRep> rep, Rational kappa) : rep_(std::move(rep)), kappa_(std::move(kappa)) {
    if (!rep_) throw Error("curvature model needs a representation");
    kappa_.canonicalize();
  }

  CurvatureModel(int r, int m, Rational kappa) : CurvatureModel(std::make_shared<const CliffordRep>(build_rep(r, m)), std::move(kappa)) {}

  const CliffordRep& rep() const { return *rep_; }
  std::shared_ptr<const CliffordRep> rep_ptr() const { return rep_; }
  int rank() const { return rep_->rank(); }
  int dimension() const { return rep_->dimension(); }
  const Rational& kappa_exact() const { return kappa_; }
  double kappa() const { return kappa_.get_d(); }
  bool is_flat() const { return sgn(kappa_) == 0; }

  /// Empty when r > 4 and n != 8; otherwise the reason the identity suites are refused.
  std::optional<std::string> identity_hypothesis_failure() const {
    if (rank() <= 4) return "hypothesis not met: rank r = " + std::to_string(rank()) + " <= 4";
    if (dimension() == 8) return "hypothesis not met: n = 8 excluded";
    return std::nullopt;
  }

  /// Identity hypothesis plus kappa > 0 (metric construction on the fibre).
  std::optional<std::string> kaehler_hypothesis_failure() const {
    if (auto r = identity_hypothesis_failure()) return r;
    if (sgn(kappa_) <= 0) return std::string("hypothesis not met: kappa <= 0");
    return std::nullopt;
  }

  CurvatureModel with_kappa(Rational kappa) const { return CurvatureModel(rep_, std::move(kappa)); }

private:
  std::shared_ptr<const CliffordRep> rep_;
  Rational kappa_;
};

/// phi of the adapted frame bivectors at S: J'_{1s}, J'_{2s} (s = 3..r) and J'_{12}.
struct AdaptedFamily {
  Eigen::MatrixXd frame;
  Eigen::MatrixXd j12;
  std::vector<Eigen::MatrixXd> j1s; ///< index s-3
  std::vector<Eigen::MatrixXd> j2s;
};

/// Uses the supplied frame (columns f_1..f_r, with f1 ^ f2 = S).
inline AdaptedFamily adapted_family(const CliffordRep& rep, const Eigen::MatrixXd& frame) {
  const int r = rep.rank();
  if (frame.rows() != r || frame.cols() != r) throw Error("adapted frame has wrong size");
  auto phi_of = [&](int a, int b) { return phi(rep, skew_to_bivector(wedge_skew(frame.col(a), frame.col(b)))); };
  AdaptedFamily fam;
  fam.frame = frame;
  fam.j12 = phi_of(0, 1);
  for (int s = 2; s < r; ++s) {
    fam.j1s.push_back(phi_of(0, s));
    fam.j2s.push_back(phi_of(1, s));
  }
  return fam;
}

inline AdaptedFamily adapted_family(const CliffordRep& rep, const FibrePoint& s) { return adapted_family(rep, s.frame()); }

/// [R_{X,Y}, phi(S)] in the given adapted family.
inline Eigen::MatrixXd curv_bracket(const CurvatureModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y, const AdaptedFamily& fam) {
  const int n = model.dimension();
  if (x.size() != n || y.size() != n) throw Error("curv_bracket: vectors must have the model dimension");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  if (model.is_flat()) return out;
  const double kappa = model.kappa();
  for (std::size_t k = 0; k < fam.j1s.size(); ++k) {
    // J'_s1 = -J'_1s, J'_s2 = -J'_2s
    const double g_s1 = -y.dot(fam.j1s[k] * x);
    const double g_s2 = -y.dot(fam.j2s[k] * x);
    out.noalias() += kappa * (g_s1 * -fam.j2s[k] - g_s2 * -fam.j1s[k]);
  }
  return out;
}

inline Eigen::MatrixXd curv_bracket(const CurvatureModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y, const FibrePoint& s) {
  if (s.rank() != model.rank()) throw RankMismatch(s.rank(), model.rank());
  return curv_bracket(model, x, y, adapted_family(model.rep(), s));
}

/// Largest singular value.
inline double operator_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// [R_{SX,SY},S] - S[R_{SX,Y},S] - S[R_{X,SY},S] - [R_{X,Y},S], with SX = phi(S) X.
inline Eigen::MatrixXd four_term(const CurvatureModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y, const AdaptedFamily& fam) {
  const Eigen::MatrixXd& s = fam.j12;
  const Eigen::VectorXd sx = s * x, sy = s * y;
  return curv_bracket(model, sx, sy, fam) - s * curv_bracket(model, sx, y, fam) - s * curv_bracket(model, x, sy, fam) -
         curv_bracket(model, x, y, fam);
}

inline double four_term_residual(const CurvatureModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y, const FibrePoint& s) {
  if (model.is_flat()) return 0.0;
  return operator_norm(four_term(model, x, y, adapted_family(model.rep(), s)));
}

struct EinsteinConstants {
  Rational ricci_base;                ///< kappa (n/4 + 2r - 4)
  std::optional<Rational> ricci_fibre;///< 2 r kappa, absent when kappa <= 0
  std::string flag;                   ///< why ricci_fibre is absent
};

/// The Einstein constants as printed for the base and for the fibre, in exact arithmetic.
inline EinsteinConstants einstein_constants(const Rational& kappa, int r, int n) {
  EinsteinConstants out;
  out.ricci_base = kappa * (Rational(n) / 4 + 2 * r - 4);
  out.ricci_base.canonicalize();
  if (sgn(kappa) > 0) {
    out.ricci_fibre = Rational(2 * r) * kappa;
  } else {
    out.flag = "kappa <= 0: no fibre metric with positive Einstein constant";
  }
  return out;
}

inline EinsteinConstants einstein_constants(const CurvatureModel& model) {
  return einstein_constants(model.kappa_exact(), model.rank(), model.dimension());
}

} // namespace twistorlab
