#include <gtest/gtest.h>

#include <sstream>

#include <twistorlab/fibre.hpp>
#include <twistorlab/random.hpp>
#include <twistorlab/repmat.hpp>

using namespace twistorlab;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST(Dimensions, IrreducibleTable) {
  const std::map<int, int> expected{{2, 2},  {3, 4},   {4, 4},   {5, 8},   {6, 8},   {7, 8},   {8, 8},  {9, 16},
                                    {10, 32}, {11, 64}, {12, 64}, {13, 128}, {14, 128}, {15, 128}, {16, 128}};
  for (const auto& [r, n] : expected) EXPECT_EQ(irreducible_dimension(r), n) << "rank " << r;
  EXPECT_EQ(dimension_table().at(12), 64);
  EXPECT_THROW(irreducible_dimension(1), Error);
  EXPECT_THROW(irreducible_dimension(17), Error);
}

TEST(Generators, AnticommuteAndSquareToMinusOne) {
  for (int k = 1; k <= 15; ++k) {
    const auto g = clifford_generators(k);
    ASSERT_EQ(static_cast<int>(g.size()), k);
    const auto n = g[0].rows();
    for (int a = 0; a < k; ++a) {
      EXPECT_EQ(max_abs(g[a] * g[a] + Eigen::MatrixXd::Identity(n, n)), 0.0);
      EXPECT_EQ(max_abs(g[a] + g[a].transpose()), 0.0);
      for (int b = a + 1; b < k; ++b) EXPECT_EQ(max_abs(g[a] * g[b] + g[b] * g[a]), 0.0) << k << " " << a << " " << b;
    }
  }
}

class RepAxioms : public ::testing::TestWithParam<int> {};

TEST_P(RepAxioms, AllInvariantsExact) {
  const int r = GetParam();
  const CliffordRep rep = build_rep(r, 1);
  EXPECT_EQ(rep.dimension(), irreducible_dimension(r));
  const RepValidation v = validate_rep(rep);
  EXPECT_LE(v.worst_defect(), 1e-12);
  EXPECT_EQ(v.injective, r != 4);
}

INSTANTIATE_TEST_SUITE_P(Ranks, RepAxioms, ::testing::Range(3, 17));

TEST(Rep, CompositionRuleByHand) {
  const CliffordRep rep = build_rep(5, 1);
  EXPECT_EQ(max_abs(rep.J(1, 2) * rep.J(1, 3) - rep.J(2, 3)), 0.0);
  EXPECT_EQ(max_abs(rep.J(2, 1) + rep.J(1, 2)), 0.0);
  EXPECT_EQ(max_abs(rep.J(1, 2) * rep.J(3, 4) - rep.J(3, 4) * rep.J(1, 2)), 0.0);
  EXPECT_THROW(rep.basis(2, 1), Error);
}

TEST(Rep, MultiplicityIsBlockDiagonal) {
  const CliffordRep one = build_rep(5, 1), two = build_rep(5, 2);
  EXPECT_EQ(two.dimension(), 16);
  EXPECT_EQ(max_abs(two.basis(1, 3).topLeftCorner(8, 8) - one.basis(1, 3)), 0.0);
  EXPECT_EQ(max_abs(two.basis(1, 3).topRightCorner(8, 8)), 0.0);
  EXPECT_LE(validate_rep(two).worst_defect(), 1e-12);
  EXPECT_THROW(build_rep(2, 1), Error);
  EXPECT_THROW(build_rep(5, 0), Error);
}

TEST(Phi, LieAlgebraHomomorphism) {
  CounterRng rng(1, 1);
  const CliffordRep rep = build_rep(6, 1);
  for (int k = 0; k < 20; ++k) {
    const RealMultiVector a = bivector_from_coefficients(6, rng.normal_vector(15));
    const RealMultiVector b = bivector_from_coefficients(6, rng.normal_vector(15));
    const RealMultiVector comm = (a * b - b * a).grade_part(2);
    const Eigen::MatrixXd pa = phi(rep, a), pb = phi(rep, b);
    EXPECT_LT(max_abs(pa * pb - pb * pa - phi(rep, comm)), 1e-12);
  }
}

TEST(Phi, UnitDecomposableSquaresToMinusIdentity) {
  CounterRng rng(2, 2);
  for (int r : {3, 5, 9}) {
    const CliffordRep rep = build_rep(r, 1);
    for (int k = 0; k < 100; ++k) {
      const Eigen::MatrixXd q = rng.rotation(r);
      const RealMultiVector a = skew_to_bivector(wedge_skew(q.col(0), q.col(1)));
      ASSERT_TRUE(squares_to_minus_one(a, 1e-12));
      const Eigen::MatrixXd p = phi(rep, a);
      EXPECT_LT(max_abs(p * p + Eigen::MatrixXd::Identity(rep.dimension(), rep.dimension())), 1e-12);
    }
  }
}

TEST(Phi, ExactRationalInputAndErrors) {
  const CliffordRep rep = build_rep(4, 1);
  const RationalMultiVector a = RationalMultiVector::bivector(4, 1, 2, Rational(1, 2));
  EXPECT_EQ(max_abs(phi(rep, a) - 0.5 * rep.J(1, 2)), 0.0);
  EXPECT_THROW(phi(rep, RationalMultiVector::bivector(5, 1, 2)), RankMismatch);
  EXPECT_THROW(phi(rep, RationalMultiVector::generator(4, 1)), GradeError);
}

TEST(PhiInverse, RoundTripAndRejection) {
  CounterRng rng(3, 3);
  const CliffordRep rep = build_rep(9, 1);
  const RealMultiVector a = bivector_from_coefficients(9, rng.normal_vector(36));
  const RealMultiVector back = phi_inverse(rep, phi(rep, a));
  EXPECT_LT((bivector_coefficients(back) - bivector_coefficients(a)).norm(), 1e-12);
  EXPECT_THROW(phi_inverse(rep, Eigen::MatrixXd::Identity(16, 16)), NumericalError);
  try {
    phi_inverse(rep, Eigen::MatrixXd::Identity(16, 16));
  } catch (const NumericalError& e) {
    EXPECT_GT(e.residual(), 0.5);
  }
  EXPECT_THROW(phi_inverse(rep, Eigen::MatrixXd::Identity(8, 8)), Error);
}

TEST(PhiInverse, RankFourIsNotInjective) {
  // in rank 4 the self-dual combination e12 + e34 acts like its image under the volume form
  const CliffordRep rep = build_rep(4, 1);
  EXPECT_FALSE(validate_rep(rep).injective);
  const Eigen::MatrixXd p = rep.J(1, 2), q = rep.J(3, 4);
  EXPECT_TRUE(max_abs(p - q) < 1e-12 || max_abs(p + q) < 1e-12);
}

TEST(Spin, EquivarianceOnRandomRotations) {
  CounterRng rng(4, 4);
  for (int r : {3, 5, 9, 10}) {
    const CliffordRep rep = build_rep(r, 1);
    for (int k = 0; k < 5; ++k) {
      const RealMultiVector a = bivector_from_coefficients(r, rng.normal_vector(bivector_dimension(r)));
      const SpinRotation rot = spin_rotate(rep, a, rng.normal());
      EXPECT_LT(rot.orthogonality_defect, 1e-12);
      EXPECT_LT(equivariance_residual(rep, rot), 1e-10) << "rank " << r;
    }
  }
}

TEST(Spin, ZeroAngleIsIdentity) {
  const CliffordRep rep = build_rep(5, 1);
  const SpinRotation rot = spin_rotate(rep, RealMultiVector::bivector(5, 1, 2, 1.0), 0.0);
  EXPECT_EQ(max_abs(rot.spin - Eigen::MatrixXd::Identity(8, 8)), 0.0);
  EXPECT_EQ(max_abs(rot.frame - Eigen::MatrixXd::Identity(5, 5)), 0.0);
}

TEST(Serialization, WriteReadRoundTrip) {
  const CliffordRep rep = build_rep(6, 2);
  std::stringstream ss;
  write_rep(ss, rep);
  const CliffordRep back = read_rep(ss);
  EXPECT_EQ(back.rank(), 6);
  EXPECT_EQ(back.multiplicity(), 2);
  EXPECT_EQ(back.dimension(), 16);
  for (int i = 1; i <= 6; ++i)
    for (int j = i + 1; j <= 6; ++j) EXPECT_EQ(max_abs(back.basis(i, j) - rep.basis(i, j)), 0.0);
}

TEST(Serialization, MalformedInputThrows) {
  std::stringstream bad_header("not-a-rep 1\n");
  EXPECT_THROW(read_rep(bad_header), ParseError);
  std::stringstream truncated("twistorlab-rep 1\nrank 3 multiplicity 1 dimension 4\nJ 1 2\n0 1\n");
  EXPECT_THROW(read_rep(truncated), Error);
}
