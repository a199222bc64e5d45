#include <gtest/gtest.h>

#include <twistorlab/curvature.hpp>
#include <twistorlab/random.hpp>
#include <twistorlab/twistor.hpp>

using namespace twistorlab;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Direct summation over the whole family, no adapted frame:
//   R_{X,Y} restricted to the Clifford endomorphisms acts as -(kappa/2) sum_{a<b} g(J_ab X, Y) J_ab.
Eigen::MatrixXd direct_bracket(const CurvatureModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y, const FibrePoint& s) {
  const CliffordRep& rep = model.rep();
  const int n = rep.dimension();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (int a = 1; a <= rep.rank(); ++a)
    for (int b = a + 1; b <= rep.rank(); ++b) r += y.dot(rep.basis(a, b) * x) * rep.basis(a, b);
  r *= -0.5 * model.kappa();
  const Eigen::MatrixXd ps = phi(rep, s.bivector());
  return r * ps - ps * r;
}

struct Case {
  int r;
  int m;
};

class FourTerm : public ::testing::TestWithParam<Case> {};

} // namespace

TEST_P(FourTerm, BracketMatchesDirectSumAndFourTermVanishes) {
  const auto [r, m] = GetParam();
  const CurvatureModel model(r, m, Rational(3, 2));
  CounterRng rng(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(m));
  for (int k = 0; k < 30; ++k) {
    const FibrePoint s = random_fibre_point(rng, r);
    const Eigen::VectorXd x = rng.normal_vector(model.dimension()), y = rng.normal_vector(model.dimension());
    const Eigen::MatrixXd b = curv_bracket(model, x, y, s);
    EXPECT_LT(max_abs(b - direct_bracket(model, x, y, s)), 1e-11);
    EXPECT_LT(four_term_residual(model, x, y, s), 1e-9);
    EXPECT_GT(max_abs(b), 1e-3);
  }
}

INSTANTIATE_TEST_SUITE_P(Models, FourTerm, ::testing::Values(Case{5, 2}, Case{6, 2}, Case{7, 2}, Case{9, 1}, Case{10, 1}, Case{5, 1}));

TEST(CurvBracket, AxisAlignedTermwise) {
  // at S = e1 ^ e2: kappa sum_s ( g(J_s1 X, Y) J_s2 - g(J_s2 X, Y) J_s1 )
  const CurvatureModel model(5, 2, Rational(1));
  const CliffordRep& rep = model.rep();
  CounterRng rng(1, 1);
  const Eigen::VectorXd x = rng.normal_vector(16), y = rng.normal_vector(16);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(16, 16);
  for (int s = 3; s <= 5; ++s)
    expected += y.dot(rep.J(s, 1) * x) * rep.J(s, 2) - y.dot(rep.J(s, 2) * x) * rep.J(s, 1);
  EXPECT_LT(max_abs(curv_bracket(model, x, y, FibrePoint::axis(5, 1, 2)) - expected), 1e-12);
}

TEST(CurvBracket, FrameIndependenceAntisymmetryAndLinearity) {
  const CurvatureModel model(6, 2, Rational(1));
  CounterRng rng(2, 2);
  const FibrePoint s = random_fibre_point(rng, 6);
  const AdaptedFamily fam = adapted_family(model.rep(), s);
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(6, 6);
  rot.topLeftCorner(2, 2) << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
  rot.bottomRightCorner(4, 4) = rng.rotation(4);
  const AdaptedFamily other = adapted_family(model.rep(), Eigen::MatrixXd(fam.frame * rot));
  const Eigen::VectorXd x = rng.normal_vector(16), y = rng.normal_vector(16), w = rng.normal_vector(16);
  EXPECT_LT(max_abs(curv_bracket(model, x, y, fam) - curv_bracket(model, x, y, other)), 1e-12);
  EXPECT_LT(max_abs(curv_bracket(model, x, y, fam) + curv_bracket(model, y, x, fam)), 1e-12);
  EXPECT_LT(max_abs(curv_bracket(model, x, x, fam)), 1e-12);
  EXPECT_LT(max_abs(curv_bracket(model, x + 2 * w, y, fam) - curv_bracket(model, x, y, fam) - 2 * curv_bracket(model, w, y, fam)), 1e-12);
  // kappa-linear
  const CurvatureModel doubled = model.with_kappa(Rational(2));
  EXPECT_LT(max_abs(curv_bracket(doubled, x, y, fam) - 2 * curv_bracket(model, x, y, fam)), 1e-12);
}

TEST(CurvBracket, FlatModelAndErrors) {
  const CurvatureModel flat(5, 2, Rational(0));
  CounterRng rng(3, 3);
  const FibrePoint s = random_fibre_point(rng, 5);
  const Eigen::VectorXd x = rng.normal_vector(16), y = rng.normal_vector(16);
  EXPECT_EQ(max_abs(curv_bracket(flat, x, y, s)), 0.0);
  EXPECT_EQ(four_term_residual(flat, x, y, s), 0.0);
  EXPECT_THROW(curv_bracket(flat, Eigen::VectorXd::Zero(3), y, s), Error);
  EXPECT_THROW(curv_bracket(flat, x, y, FibrePoint::axis(6, 1, 2)), RankMismatch);
}

TEST(FourTermIdentity, ComputableAtDimensionEight) {
  // excluded from the theorem suites, but the operation itself is still defined
  const CurvatureModel model(6, 1, Rational(1));
  ASSERT_EQ(model.dimension(), 8);
  CounterRng rng(4, 4);
  for (int k = 0; k < 10; ++k) {
    const FibrePoint s = random_fibre_point(rng, 6);
    EXPECT_LT(four_term_residual(model, rng.normal_vector(8), rng.normal_vector(8), s), 1e-9);
  }
}

TEST(FourTermIdentity, FailsForAWrongComplexStructure) {
  // negative control: replace phi(S) by a structure that is not the fibre point of the frame
  const CurvatureModel model(5, 2, Rational(1));
  CounterRng rng(5, 5);
  AdaptedFamily fam = adapted_family(model.rep(), FibrePoint::axis(5, 1, 2));
  fam.j12 = model.rep().J(1, 3);
  double worst = 0;
  for (int k = 0; k < 5; ++k)
    worst = std::max(worst, operator_norm(four_term(model, rng.normal_vector(16), rng.normal_vector(16), fam)));
  EXPECT_GT(worst, 1e-2);
}

TEST(OperatorNorm, MatchesSingularValue) {
  Eigen::MatrixXd m(2, 2);
  m << 3, 0, 4, 5;
  const double expected = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()[0];
  EXPECT_NEAR(operator_norm(m), expected, 1e-12);
  EXPECT_EQ(operator_norm(Eigen::MatrixXd()), 0.0);
}

TEST(EinsteinConstants, PrintedFormulasExactly) {
  // base kappa (n/4 + 2r - 4), fibre 2 r kappa
  EinsteinConstants e = einstein_constants(Rational(1), 9, 16);
  EXPECT_EQ(e.ricci_base, Rational(18));
  ASSERT_TRUE(e.ricci_fibre.has_value());
  EXPECT_EQ(*e.ricci_fibre, Rational(18));

  e = einstein_constants(Rational(1), 5, 16);
  EXPECT_EQ(e.ricci_base, Rational(10));
  EXPECT_EQ(*e.ricci_fibre, Rational(10));

  e = einstein_constants(Rational(2, 3), 6, 8);
  EXPECT_EQ(e.ricci_base, Rational(2, 3) * Rational(10));
  EXPECT_EQ(*e.ricci_fibre, Rational(8));

  e = einstein_constants(Rational(1, 7), 10, 32);
  EXPECT_EQ(e.ricci_base, Rational(24, 7));
  EXPECT_EQ(*e.ricci_fibre, Rational(20, 7));

  e = einstein_constants(Rational(-1), 9, 16);
  EXPECT_EQ(e.ricci_base, Rational(-18));
  EXPECT_FALSE(e.ricci_fibre.has_value());
  EXPECT_FALSE(e.flag.empty());
}

TEST(CurvatureModel, HypothesisReasons) {
  EXPECT_FALSE(CurvatureModel(9, 1, Rational(1)).identity_hypothesis_failure().has_value());
  EXPECT_EQ(*CurvatureModel(7, 1, Rational(1)).identity_hypothesis_failure(), "hypothesis not met: n = 8 excluded");
  EXPECT_NE(CurvatureModel(4, 1, Rational(1)).identity_hypothesis_failure()->find("r = 4"), std::string::npos);
  EXPECT_TRUE(CurvatureModel(9, 1, Rational(0)).kaehler_hypothesis_failure().has_value());
  EXPECT_FALSE(CurvatureModel(9, 1, Rational(0)).identity_hypothesis_failure().has_value());
  EXPECT_THROW(CurvatureModel(nullptr, Rational(1)), Error);
}
