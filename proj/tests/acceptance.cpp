// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <twistorlab/runner.hpp>
#include <twistorlab/sampling.hpp>
#include <twistorlab/twistor.hpp>

using namespace twistorlab;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string sci(double v) { return format_double(v); }

Outcome lemma() {
  Outcome o;
  int total = 0;
  for (int r = 3; r <= 9; ++r) {
    CounterRng rng(101, static_cast<std::uint64_t>(r));
    const LemmaTally t = lemma_equivalence(rng, r, 1000);
    total += t.samples;
    o.require(t.samples >= 1000, "rank " + std::to_string(r) + " undersampled");
    o.require(t.counterexamples == 0, "rank " + std::to_string(r) + ": " + std::to_string(t.counterexamples) + " counterexamples");
    o.require(t.square_minus_one > 0 && t.square_minus_one < t.samples, "rank " + std::to_string(r) + " sample mix degenerate");
  }
  if (o.ok) o.detail = std::to_string(total) + " bivectors, 0 counterexamples";
  return o;
}

Outcome representations() {
  Outcome o;
  double worst = 0;
  for (int r : {3, 5, 6, 7, 9, 10, 12, 16}) {
    const CliffordRep rep = build_rep(r, 1);
    const double d = validate_rep(rep).worst_defect();
    worst = std::max(worst, d);
    o.require(d <= 1e-12, "rank " + std::to_string(r) + " defect " + sci(d));
  }
  const std::vector<std::pair<int, int>> dims{{9, 16}, {10, 32}, {12, 64}, {16, 128}};
  for (const auto& [r, n] : dims) o.require(build_rep(r, 1).dimension() == n, "rank " + std::to_string(r) + " dimension");
  if (o.ok) o.detail = "worst defect " + sci(worst);
  return o;
}

Outcome four_term_identity() {
  Outcome o;
  double worst = 0;
  const std::vector<std::pair<int, int>> models{{5, 2}, {6, 2}, {7, 2}, {9, 1}};
  for (const auto& [r, m] : models) {
    const CurvatureModel model(r, m, Rational(1));
    o.require(model.dimension() != 8, "n = 8 model");
    CounterRng rng(103, static_cast<std::uint64_t>(r));
    for (int i = 0; i < 200; ++i) {
      const FibrePoint s = random_fibre_point(rng, r);
      const double v = four_term_residual(model, rng.normal_vector(model.dimension()), rng.normal_vector(model.dimension()), s);
      worst = std::max(worst, v);
    }
  }
  o.require(worst < 1e-9, "residual " + sci(worst));
  if (o.ok) o.detail = "max residual " + sci(worst) + " over 800 samples";
  return o;
}

Outcome integrability() {
  Outcome o;
  double vertical = 0, mixed = 0, horizontal = 0;
  const std::vector<std::pair<int, int>> models{{5, 2}, {9, 1}};
  for (const auto& [r, m] : models) {
    const CurvatureModel model(r, m, Rational(1));
    CounterRng rng(104, static_cast<std::uint64_t>(r));
    for (int i = 0; i < 50; ++i) {
      const TwistorFrame frame(model, random_fibre_point(rng, r));
      const FibreTangent u = random_fibre_tangent(rng, frame.point()), v = random_fibre_tangent(rng, frame.point());
      const Eigen::VectorXd x = rng.normal_vector(model.dimension()), y = rng.normal_vector(model.dimension());
      vertical = std::max(vertical, nijenhuis_vertical_pair(frame, u, v));
      const MixedNijenhuis mx = nijenhuis_mixed(frame, x, u);
      mixed = std::max({mixed, mx.residual, mx.formula_residual});
      const HorizontalNijenhuis hz = nijenhuis_horizontal(frame, x, y);
      horizontal = std::max({horizontal, hz.vertical_residual, hz.horizontal_residual});
    }
  }
  o.require(vertical < 1e-4, "vertical " + sci(vertical));
  o.require(mixed < 1e-12, "mixed " + sci(mixed));
  o.require(horizontal < 1e-9, "horizontal " + sci(horizontal));
  if (o.ok) o.detail = "vertical " + sci(vertical) + ", mixed " + sci(mixed) + ", horizontal " + sci(horizontal);
  return o;
}

Outcome kaehler() {
  Outcome o;
  double worst = 0;
  const std::vector<std::pair<int, int>> models{{5, 2}, {9, 1}};
  for (const auto& [r, m] : models) {
    const CurvatureModel model(r, m, Rational(1));
    CounterRng rng(105, static_cast<std::uint64_t>(r));
    for (const IdentityResult& row : kaehler_identity_suite(model, 100, rng, 1e-9)) {
      worst = std::max(worst, row.max_residual);
      o.require(row.max_residual < 1e-9, "rank " + std::to_string(r) + " " + row.id + " " + sci(row.max_residual));
    }
    // base kappa (n/4 + 2r - 4), fibre 2 r kappa
    const int n = model.dimension();
    const EinsteinConstants e = einstein_constants(Rational(1), r, n);
    o.require(e.ricci_base == Rational(n) / 4 + Rational(2 * r - 4), "rank " + std::to_string(r) + " base Einstein constant");
    o.require(e.ricci_fibre && *e.ricci_fibre == Rational(2 * r), "rank " + std::to_string(r) + " fibre Einstein constant");
  }
  if (o.ok) o.detail = "max residual " + sci(worst) + "; Einstein constants exact";
  return o;
}

Outcome nearly_kaehler() {
  Outcome o;
  const CurvatureModel model(5, 2, Rational(1));
  CounterRng rng(106, 1);
  const NearlyKaehlerReport nk = nearly_kaehler_check(model, 200, rng, 1e-8);
  double torsion = 0, metric = 0;
  for (int i = 0; i < 20; ++i) {
    const TwistorFrame frame(model, random_fibre_point(rng, 5), 0.5);
    const ConnectionValidity v = connection_validity(frame, 5, rng);
    torsion = std::max(torsion, v.torsion);
    metric = std::max(metric, v.metric);
  }
  o.require(nk.skew_residual < 1e-8, "skew " + sci(nk.skew_residual));
  o.require(torsion < 1e-9, "torsion " + sci(torsion));
  o.require(metric < 1e-9, "metric " + sci(metric));
  o.require(nk.witness_fraction >= 0.95, "witness fraction " + std::to_string(nk.witness_fraction));
  if (o.ok)
    o.detail = "skew " + sci(nk.skew_residual) + ", torsion " + sci(torsion) + ", metric " + sci(metric) + ", witnesses " +
               std::to_string(static_cast<int>(nk.witness_fraction * 100 + 0.5)) + "% (min ratio " + sci(nk.min_nijenhuis_ratio) + ")";
  return o;
}

Outcome flat_global() {
  Outcome o;
  CounterRng rng(107, 1);
  const FlatGlobalReport rep = flat_model_global_check(5, 1, GridSpec{}, rng);
  o.require(rep.max_residual < 1e-4, "residual " + sci(rep.max_residual));
  o.require(std::abs(rep.convergence_ratio - 2.0) <= 0.4, "convergence ratio " + std::to_string(rep.convergence_ratio));
  if (o.ok)
    o.detail = "residual " + sci(rep.max_residual) + " (forward " + sci(rep.max_residual_coarse) + "), ratio " +
               std::to_string(rep.convergence_ratio) + " over " + std::to_string(rep.pairs) + " pairs";
  return o;
}

Outcome guards() {
  Outcome o;
  const std::vector<std::pair<int, int>> excluded{{7, 1}, {4, 1}, {3, 1}, {6, 1}};
  for (const auto& [r, m] : excluded) {
    RunConfig c;
    c.rank = r;
    c.multiplicity = m;
    c.samples = 2;
    c.suites = {"curvature", "integrability", "kaehler", "nearly-kaehler"};
    const Report rep = run(c);
    for (const auto& s : rep.suites) {
      const std::string where = "r=" + std::to_string(r) + " " + s.name;
      o.require(s.status == SuiteStatus::Skipped, where + " not skipped");
      o.require(s.reason.rfind("hypothesis not met", 0) == 0, where + " reason '" + s.reason + "'");
    }
    o.require(rep.exit_code() == 0, "r=" + std::to_string(r) + " exit code");
    bool threw = false;
    try {
      CounterRng rng(108, 1);
      kaehler_identity_suite(CurvatureModel(r, m, Rational(1)), 1, rng);
    } catch (const HypothesisError&) {
      threw = true;
    }
    o.require(threw, "r=" + std::to_string(r) + " API did not refuse");
  }
  if (o.ok) o.detail = "r=7 (n=8), r=6 (n=8), r=4, r=3 all report 'hypothesis not met'";
  return o;
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> body;
  };
  const std::vector<Criterion> criteria{
      {1, "square characterization", 10, lemma},
      {2, "representation axioms", 30, representations},
      {3, "four-term identity", 20, four_term_identity},
      {4, "integrability", 60, integrability},
      {5, "Kaehler identities", 30, kaehler},
      {6, "nearly Kaehler at t = 1/2", 60, nearly_kaehler},
      {7, "flat global check", 120, flat_global},
      {8, "hypothesis guards", 60, guards},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.limit_seconds) o.require(false, "runtime over " + std::to_string(static_cast<int>(c.limit_seconds)) + " s");
    if (!o.ok) ++failures;
    std::printf("[%s] %d %-28s %7.2f s  %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
