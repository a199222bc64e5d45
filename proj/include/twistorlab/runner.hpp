#pragma once

// Suite runner and report serialization behind the twistorlab command-line tool.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <future>
#include <iomanip>
#include <map>
#include <optional>
#include <semaphore>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvature.hpp"
#include "fibre.hpp"
#include "random.hpp"
#include "rational.hpp"
#include "repmat.hpp"
#include "sampling.hpp"
#include "twistor.hpp"

namespace twistorlab {

inline constexpr const char* kReportSchema = "twistorlab-report/1";
inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kThreadsVariable = "TWISTORLAB_THREADS";

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lemma",     "representation", "fibre",          "curvature",
                                              "integrability", "kaehler",    "nearly-kaehler", "flat-global"};
  return names;
}

class ConfigError : public Error {
public:
  using Error::Error;
};

struct RunConfig {
  int rank = 9;
  int multiplicity = 1;
  Rational kappa = 1;
  std::vector<double> t_values{1.0, 0.5};
  std::uint64_t seed = 1;
  int samples = 200;
  std::map<std::string, double> tolerances; ///< per-suite overrides
  std::vector<std::string> suites;          ///< canonical order after normalize()
  std::string output;                       ///< empty: stdout
  std::string format = "text";
  bool timings = false;
  int threads = 1;
  GridSpec grid;

  int dimension() const { return irreducible_dimension(rank) * multiplicity; }

  void validate() const {
    if (rank < kMinRepRank) throw ConfigError("rank must be at least 3 (no twistor fibre of this form below rank 3)");
    if (rank > kMaxRepRank) throw ConfigError("rank must be at most 16");
    if (multiplicity < 1) throw ConfigError("multiplicity must be positive");
    if (samples < 1) throw ConfigError("samples must be positive");
    if (threads < 1) throw ConfigError("thread count must be positive");
    if (t_values.empty()) throw ConfigError("at least one t value is needed");
    for (double t : t_values)
      if (!(t > 0)) throw ConfigError("t values must be positive");
    if (format != "text" && format != "json" && format != "csv") throw ConfigError("format must be text, json or csv");
    for (const auto& s : suites)
      if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
        throw ConfigError("unknown suite: " + s);
    for (const auto& [s, v] : tolerances) {
      if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
        throw ConfigError("tolerance for unknown suite: " + s);
      if (!(v >= 0)) throw ConfigError("tolerance must be non-negative");
    }
    try {
      grid.validate(dimension(), fibre_dimension(rank));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }

  /// Deduplicate and sort the suite selection into canonical order.
  void normalize() {
    std::vector<std::string> out;
    for (const auto& name : suite_names())
      if (std::find(suites.begin(), suites.end(), name) != suites.end()) out.push_back(name);
    suites = std::move(out);
  }
};

/// "all" or a comma-separated list.
inline std::vector<std::string> parse_suite_list(const std::string& text) {
  if (text == "all") return suite_names();
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

inline std::pair<std::string, double> parse_tolerance(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("tolerance must look like suite=value: " + text);
  const std::string value = text.substr(eq + 1);
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return {text.substr(0, eq), v};
  } catch (const std::exception&) {
    throw ConfigError("bad tolerance value: " + text);
  }
}

inline int threads_from_environment() {
  const char* v = std::getenv(kThreadsVariable);
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) throw ConfigError(std::string(kThreadsVariable) + " must be a positive integer");
  return static_cast<int>(n);
}

// ---------------------------------------------------------------------------

enum class SuiteStatus { Pass, Fail, Skipped };

inline const char* to_string(SuiteStatus s) {
  switch (s) {
  case SuiteStatus::Pass: return "pass";
  case SuiteStatus::Fail: return "fail";
  case SuiteStatus::Skipped: return "skipped";
  }
  return "?";
}

struct ResidualRow {
  std::string identity;
  std::optional<double> t;
  int samples = 0;
  double max_residual = 0;
  double tolerance = 0;
  bool pass() const { return std::isfinite(max_residual) && max_residual <= tolerance; }
};

struct SuiteReport {
  std::string name;
  SuiteStatus status = SuiteStatus::Pass;
  std::string reason;
  std::vector<ResidualRow> rows;
  std::vector<std::string> notes;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  double seconds = 0;
};

struct Report {
  RunConfig config;
  std::vector<SuiteReport> suites;

  bool passed() const {
    return std::none_of(suites.begin(), suites.end(), [](const SuiteReport& s) { return s.status == SuiteStatus::Fail; });
  }
  int exit_code() const { return passed() ? 0 : 1; }
};

namespace detail {

/// Default tolerance per class of check; a per-suite override replaces all of them.
struct Tolerances {
  double exact = 1e-12;
  double matrix = 1e-9;
  double fd = 1e-4;
};

class SuiteContext {
public:
  SuiteContext(const RunConfig& config, std::string name)
      : config_(config), rng_(config.seed, CounterRng::stream_id(name)) {
    report_.name = std::move(name);
  }

  CounterRng& rng() { return rng_; }
  const RunConfig& config() const { return config_; }
  SuiteReport& report() { return report_; }

  double tol(double fallback) const {
    auto it = config_.tolerances.find(report_.name);
    return it == config_.tolerances.end() ? fallback : it->second;
  }

  void row(std::string id, double residual, double tolerance, int samples, std::optional<double> t = std::nullopt) {
    report_.rows.push_back(ResidualRow{std::move(id), t, samples, residual, tol(tolerance)});
  }

  void skip(std::string reason) {
    report_.status = SuiteStatus::Skipped;
    report_.reason = std::move(reason);
  }

  SuiteReport finish() {
    if (report_.status != SuiteStatus::Skipped) {
      const bool ok = std::all_of(report_.rows.begin(), report_.rows.end(), [](const ResidualRow& r) { return r.pass(); });
      report_.status = ok ? SuiteStatus::Pass : SuiteStatus::Fail;
    }
    return std::move(report_);
  }

private:
  const RunConfig& config_;
  CounterRng rng_;
  SuiteReport report_;
};

inline std::shared_ptr<const CliffordRep> shared_rep(const RunConfig& c) {
  return std::make_shared<const CliffordRep>(build_rep(c.rank, c.multiplicity));
}

inline void lemma_suite(SuiteContext& ctx) {
  const int r = ctx.config().rank;
  const int samples = std::max(ctx.config().samples, 1000);
  const LemmaTally t = lemma_equivalence(ctx.rng(), r, samples);
  ctx.row("equivalence.counterexamples", t.counterexamples, 0.0, t.samples);
  ctx.report().details = {{"samples", t.samples},
                          {"square_minus_one", t.square_minus_one},
                          {"unit", t.unit},
                          {"decomposable", t.decomposable}};
}

inline void representation_suite(SuiteContext& ctx, const CliffordRep& rep) {
  const Tolerances tol;
  const RepValidation v = validate_rep(rep);
  ctx.row("skew", v.skew, tol.exact, 1);
  ctx.row("orthogonal", v.orthogonal, tol.exact, 1);
  ctx.row("square_minus_identity", v.square, tol.exact, 1);
  ctx.row("composition", v.composition, tol.exact, 1);
  ctx.row("commutation", v.commutation, tol.exact, 1);
  ctx.row("anticommutation", v.anticommutation, tol.exact, 1);
  const int expected = irreducible_dimension(rep.rank()) * rep.multiplicity();
  ctx.row("dimension", std::abs(rep.dimension() - expected), 0.0, 1);
  const int samples = std::min(ctx.config().samples, 20);
  double equivariance = 0;
  for (int k = 0; k < samples; ++k) {
    const RealMultiVector a = skew_to_bivector(wedge_skew(ctx.rng().normal_vector(rep.rank()), ctx.rng().normal_vector(rep.rank())));
    equivariance = std::max(equivariance, equivariance_residual(rep, spin_rotate(rep, a, ctx.rng().normal())));
  }
  ctx.row("spin_equivariance", equivariance, tol.matrix, samples);
  ctx.report().details = {{"dimension", rep.dimension()},
                          {"gram_min_eigenvalue", v.gram_min_eigenvalue},
                          {"injective", v.injective}};
  if (!v.injective) ctx.report().notes.push_back("phi is not injective in rank " + std::to_string(rep.rank()));
}

inline void fibre_suite(SuiteContext& ctx, const CliffordRep& rep) {
  const Tolerances tol;
  const RunConfig& c = ctx.config();
  const int r = c.rank;
  const int samples = std::min(c.samples, 20);
  double nij = 0, square = 0, acs2 = 0, retraction = 0, omega = 0;
  for (int k = 0; k < samples; ++k) {
    const FibrePoint z = random_fibre_point(ctx.rng(), r);
    const FibreTangent u = random_fibre_tangent(ctx.rng(), z), v = random_fibre_tangent(ctx.rng(), z);
    nij = std::max(nij, fibre_nijenhuis(z, u, v, 1e-4));
    square = std::max(square, phi_square_defect(rep, z));
    const FibreTangent jju = fibre_acs(z, fibre_acs(z, u));
    acs2 = std::max(acs2, (jju.coordinates() + u.coordinates()).norm());
    const double h = 1e-5;
    const Eigen::MatrixXd deriv = (retract(z, u, h).skew() - retract(z, u, -h).skew()) / (2 * h);
    retraction = std::max(retraction, (deriv - u.skew()).cwiseAbs().maxCoeff());
    const Eigen::VectorXd a = ctx.rng().normal_vector(2 * (r - 2)), b = ctx.rng().normal_vector(2 * (r - 2)),
                          w = ctx.rng().normal_vector(2 * (r - 2));
    omega = std::max(omega, fibre_kahler_form_defect(z, a, b, w, FiniteDifference{}));
  }
  ctx.row("nijenhuis", nij, tol.fd, samples);
  ctx.row("kaehler_form_closed", omega, tol.fd, samples);
  ctx.row("phi_square_minus_identity", square, tol.matrix, samples);
  ctx.row("acs_square_minus_identity", acs2, tol.exact, samples);
  ctx.row("retract_derivative", retraction, tol.fd, samples);

  const double kappa = c.kappa.get_d();
  const FibreMetric metric = kappa > 0 ? FibreMetric::for_kappa(kappa) : FibreMetric{kappa, 1.0};
  const FibreRicci ricci = fibre_ricci_fd(random_fibre_point(ctx.rng(), r), metric);
  ctx.row("ricci_einstein", ricci.einstein_defect, tol.fd * std::max(1.0, std::abs(metric.einstein_constant(r))), 1);
  ctx.report().details = {{"metric_scale", metric.scale},
                          {"einstein_constant", metric.einstein_constant(r)},
                          {"einstein_constant_measured", ricci.einstein_constant}};
}

inline std::optional<std::string> theorem_guard(const RunConfig& c) {
  if (c.rank <= 4) return "hypothesis not met: rank r = " + std::to_string(c.rank) + " <= 4";
  if (c.dimension() == 8) return std::string("hypothesis not met: n = 8 excluded");
  return std::nullopt;
}

inline void curvature_suite(SuiteContext& ctx, const CurvatureModel& model) {
  const Tolerances tol;
  const int n = model.dimension(), r = model.rank(), samples = ctx.config().samples;
  double four = 0, invariance = 0, antisym = 0;
  for (int k = 0; k < samples; ++k) {
    const FibrePoint s = random_fibre_point(ctx.rng(), r);
    const Eigen::VectorXd x = ctx.rng().normal_vector(n), y = ctx.rng().normal_vector(n);
    const AdaptedFamily fam = adapted_family(model.rep(), s);
    four = std::max(four, operator_norm(four_term(model, x, y, fam)));
    antisym = std::max(antisym, (curv_bracket(model, x, y, fam) + curv_bracket(model, y, x, fam)).cwiseAbs().maxCoeff());
    // another adapted frame: rotate inside span(f1, f2) and inside its complement
    Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(r, r);
    const double a = ctx.rng().normal();
    rot.topLeftCorner(2, 2) << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    rot.bottomRightCorner(r - 2, r - 2) = ctx.rng().rotation(r - 2);
    const AdaptedFamily other = adapted_family(model.rep(), Eigen::MatrixXd(fam.frame * rot));
    invariance = std::max(invariance, (curv_bracket(model, x, y, fam) - curv_bracket(model, x, y, other)).cwiseAbs().maxCoeff());
  }
  ctx.row("four_term", four, tol.matrix, samples);
  ctx.row("antisymmetry", antisym, tol.matrix, samples);
  ctx.row("frame_independence", invariance, tol.matrix, samples);
  const EinsteinConstants e = einstein_constants(model);
  ctx.report().details = {{"ricci_base", to_string(e.ricci_base)},
                          {"ricci_fibre", e.ricci_fibre ? to_string(*e.ricci_fibre) : std::string("n/a")}};
  if (!e.flag.empty()) ctx.report().notes.push_back(e.flag);
}

inline void integrability_suite(SuiteContext& ctx, const CurvatureModel& model) {
  const Tolerances tol;
  const int n = model.dimension(), r = model.rank(), samples = ctx.config().samples;
  const int fd_samples = std::min(samples, 20);
  double vertical = 0, mixed = 0, mixed_formula = 0, mixed_total = 0, hv = 0, hh = 0, h_total = 0;
  for (int k = 0; k < samples; ++k) {
    const TwistorFrame frame(model, random_fibre_point(ctx.rng(), r), 1.0);
    const Eigen::VectorXd x = ctx.rng().normal_vector(n), y = ctx.rng().normal_vector(n);
    const FibreTangent u = random_fibre_tangent(ctx.rng(), frame.point());
    if (k < fd_samples) vertical = std::max(vertical, nijenhuis_vertical_pair(frame, u, random_fibre_tangent(ctx.rng(), frame.point())));
    const MixedNijenhuis m = nijenhuis_mixed(frame, x, u);
    mixed = std::max(mixed, m.residual);
    mixed_formula = std::max(mixed_formula, m.formula_residual);
    mixed_total = std::max(mixed_total, m.total);
    const HorizontalNijenhuis h = nijenhuis_horizontal(frame, x, y);
    hv = std::max(hv, h.vertical_residual);
    hh = std::max(hh, h.horizontal_residual);
    h_total = std::max(h_total, h.total);
  }
  ctx.row("vertical_pair", vertical, tol.fd, fd_samples, 1.0);
  ctx.row("mixed", mixed, tol.exact, samples, 1.0);
  ctx.row("mixed.formula", mixed_formula, tol.exact, samples, 1.0);
  ctx.row("mixed.total", mixed_total, tol.exact, samples, 1.0);
  ctx.row("horizontal.vertical_part", hv, tol.matrix, samples, 1.0);
  ctx.row("horizontal.status", hh, tol.matrix, samples, 1.0);
  ctx.row("horizontal.total", h_total, tol.matrix, samples, 1.0);
}

inline void validity_rows(SuiteContext& ctx, const CurvatureModel& model, double t, int samples) {
  const Tolerances tol;
  const TwistorFrame frame(model, random_fibre_point(ctx.rng(), model.rank()), t);
  const ConnectionValidity v = connection_validity(frame, samples, ctx.rng());
  double iso = 0;
  for (int k = 0; k < samples; ++k) {
    const Eigen::VectorXd a = ctx.rng().normal_vector(frame.dimension()), b = ctx.rng().normal_vector(frame.dimension());
    iso = std::max(iso, acs_isometry_residual(frame, a, b, t == 1.0 ? AcsKind::Integrable : AcsKind::EellsSalamon));
  }
  ctx.row("connection.torsion", v.torsion, tol.matrix, samples, t);
  ctx.row("connection.metric", v.metric, tol.matrix, samples, t);
  ctx.row("connection.oneill", v.oneill, tol.matrix, samples, t);
  ctx.row("acs.isometry", iso, tol.matrix, samples, t);
}

inline void kaehler_suite(SuiteContext& ctx, const CurvatureModel& model) {
  const int samples = ctx.config().samples;
  for (const IdentityResult& r : kaehler_identity_suite(model, samples, ctx.rng())) ctx.row(r.id, r.max_residual, r.tolerance, r.samples, 1.0);
  validity_rows(ctx, model, 1.0, std::min(samples, 50));
  const EinsteinConstants e = einstein_constants(model);
  const FibreMetric metric = FibreMetric::for_kappa(model.kappa());
  ctx.report().details = {{"ricci_base", to_string(e.ricci_base)},
                          {"ricci_fibre", e.ricci_fibre ? to_string(*e.ricci_fibre) : std::string("n/a")},
                          {"fibre_metric_einstein_constant", metric.einstein_constant(model.rank())},
                          {"vertical_scale", metric.scale}};
}

inline void nearly_kaehler_suite(SuiteContext& ctx, const CurvatureModel& model) {
  const int samples = ctx.config().samples;
  const NearlyKaehlerReport nk = nearly_kaehler_check(model, samples, ctx.rng());
  ctx.row("skew", nk.skew_residual, 1e-8, samples, 0.5);
  ctx.row("nonintegrability.shortfall", 1.0 - nk.witness_fraction, 0.05, samples, 0.5);
  for (double t : ctx.config().t_values) validity_rows(ctx, model, t, std::min(samples, 50));
  ctx.report().details = {{"witness_threshold", nk.witness_threshold},
                          {"witness_fraction", nk.witness_fraction},
                          {"min_nijenhuis_ratio", nk.min_nijenhuis_ratio},
                          {"max_nijenhuis_ratio", nk.max_nijenhuis_ratio},
                          {"max_kaehler_defect", nk.max_kaehler_defect}};
}

inline void flat_suite(SuiteContext& ctx) {
  const Tolerances tol;
  const RunConfig& c = ctx.config();
  const FlatGlobalReport f = flat_model_global_check(c.rank, c.multiplicity, c.grid, ctx.rng());
  ctx.row("nijenhuis", f.max_residual, tol.fd, f.pairs, 1.0);
  ctx.row("richardson_ratio", std::abs(f.convergence_ratio - 2.0) / 2.0, 0.2, f.pairs, 1.0);
  for (const auto& w : f.warnings) ctx.report().notes.push_back(w);
  ctx.report().details = {{"points", f.points},
                          {"pairs", f.pairs},
                          {"step", c.grid.step},
                          {"max_residual_forward", f.max_residual_coarse},
                          {"convergence_ratio", f.convergence_ratio}};
}

inline SuiteReport run_suite(const RunConfig& config, const std::string& name, const std::shared_ptr<const CliffordRep>& rep) {
  SuiteContext ctx(config, name);
  const auto start = std::chrono::steady_clock::now();
  try {
    const CurvatureModel model(rep, config.kappa);
    if (name == "lemma") lemma_suite(ctx);
    else if (name == "representation") representation_suite(ctx, *rep);
    else if (name == "fibre") fibre_suite(ctx, *rep);
    else if (name == "flat-global") flat_suite(ctx);
    else if (auto why = theorem_guard(config)) ctx.skip(*why);
    else if (name == "curvature") curvature_suite(ctx, model);
    else if (name == "integrability") integrability_suite(ctx, model);
    else if (auto k = model.kaehler_hypothesis_failure()) ctx.skip(*k);
    else if (name == "kaehler") kaehler_suite(ctx, model);
    else if (name == "nearly-kaehler") nearly_kaehler_suite(ctx, model);
  } catch (const Error& e) {
    ctx.report().notes.push_back(std::string("error: ") + e.what());
    ctx.row("error", INFINITY, 0.0, 0);
  }
  SuiteReport out = ctx.finish();
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

} // namespace detail

/// Runs the selected suites; at most config.threads of them concurrently. Each suite
/// draws from its own random stream, so results do not depend on scheduling.
inline Report run(RunConfig config) {
  config.normalize();
  config.validate();
  Report report{config, {}};
  const auto rep = detail::shared_rep(config);
  std::counting_semaphore<1024> slots(config.threads);
  std::vector<std::future<SuiteReport>> jobs;
  for (const auto& name : config.suites) {
    jobs.push_back(std::async(std::launch::async, [&, name] {
      slots.acquire();
      SuiteReport r = detail::run_suite(report.config, name, rep);
      slots.release();
      return r;
    }));
  }
  for (auto& j : jobs) report.suites.push_back(j.get());
  return report;
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(6) << std::scientific << v;
  return os.str();
}

inline std::string format_t(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

inline nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json tol = nlohmann::ordered_json::object();
  for (const auto& [k, v] : c.tolerances) tol[k] = v;
  return {{"rank", c.rank},
          {"multiplicity", c.multiplicity},
          {"dimension", c.dimension()},
          {"kappa", to_string(c.kappa)},
          {"t_values", c.t_values},
          {"seed", c.seed},
          {"samples", c.samples},
          {"suites", c.suites},
          {"tolerance_overrides", tol},
          {"default_tolerances", {{"exact", 1e-12}, {"matrix", 1e-9}, {"finite_difference", 1e-4}}},
          {"grid",
           {{"points_per_axis", c.grid.points_per_axis},
            {"extent", c.grid.extent},
            {"step", c.grid.step},
            {"base_axes", c.grid.base_axes},
            {"fibre_axes", c.grid.fibre_axes},
            {"pairs", c.grid.pairs}}}};
}

inline nlohmann::ordered_json to_json(const Report& report) {
  nlohmann::ordered_json suites = nlohmann::ordered_json::array();
  for (const auto& s : report.suites) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : s.rows) {
      rows.push_back({{"identity", r.identity},
                      {"t", r.t ? nlohmann::ordered_json(*r.t) : nlohmann::ordered_json(nullptr)},
                      {"samples", r.samples},
                      {"max_residual", std::isfinite(r.max_residual) ? nlohmann::ordered_json(r.max_residual) : nlohmann::ordered_json(nullptr)},
                      {"tolerance", r.tolerance},
                      {"pass", r.pass()}});
    }
    nlohmann::ordered_json js = {{"name", s.name}, {"status", to_string(s.status)}};
    if (!s.reason.empty()) js["reason"] = s.reason;
    js["rows"] = rows;
    js["notes"] = s.notes;
    js["details"] = s.details;
    if (report.config.timings) js["seconds"] = s.seconds;
    suites.push_back(js);
  }
  return {{"schema", kReportSchema},
          {"version", kVersion},
          {"config", config_json(report.config)},
          {"suites", suites},
          {"passed", report.passed()}};
}

inline const char* kCsvHeader = "suite,identity,r,n,kappa,t,samples,max_residual,tolerance,status";

/// One row per identity plus a summary row per suite.
inline std::string to_csv(const Report& report) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  const RunConfig& c = report.config;
  for (const auto& s : report.suites) {
    // the flat model has kappa = 0 whatever the configuration says
    const std::string kappa = s.name == "flat-global" ? std::string("0") : to_string(c.kappa);
    const std::string prefix_tail = "," + std::to_string(c.rank) + "," + std::to_string(c.dimension()) + "," + kappa + ",";
    double worst = 0;
    int samples = 0;
    for (const auto& r : s.rows) {
      os << s.name << ',' << r.identity << prefix_tail << (r.t ? format_t(*r.t) : "") << ',' << r.samples << ','
         << format_double(r.max_residual) << ',' << format_double(r.tolerance) << ',' << (r.pass() ? "pass" : "fail") << '\n';
      worst = std::max(worst, r.max_residual / std::max(r.tolerance, 1e-300));
      samples = std::max(samples, r.samples);
    }
    os << s.name << ",summary" << prefix_tail << ',' << samples << ',' << (s.rows.empty() ? "" : format_double(worst)) << ",1,"
       << to_string(s.status) << '\n';
  }
  return os.str();
}

inline std::string to_text(const Report& report) {
  std::ostringstream os;
  const RunConfig& c = report.config;
  os << "twistorlab " << kVersion << "  r=" << c.rank << " m=" << c.multiplicity << " n=" << c.dimension() << " kappa=" << to_string(c.kappa)
     << " seed=" << c.seed << " samples=" << c.samples << '\n';
  for (const auto& s : report.suites) {
    os << '\n' << "[" << to_string(s.status) << "] " << s.name;
    if (!s.reason.empty()) os << "  (" << s.reason << ")";
    os << "  " << std::fixed << std::setprecision(2) << s.seconds << " s" << std::defaultfloat << '\n';
    for (const auto& r : s.rows) {
      const std::string label = r.t ? r.identity + " (t=" + format_t(*r.t) + ")" : r.identity;
      os << "    " << std::left << std::setw(36) << label << std::right << "  " << std::setw(13) << format_double(r.max_residual)
         << "  <= " << format_double(r.tolerance) << "  " << (r.pass() ? "ok" : "FAIL") << '\n';
    }
    for (const auto& n : s.notes) os << "    note: " << n << '\n';
  }
  os << '\n' << (report.passed() ? "all selected suites passed" : "some suites failed") << '\n';
  return os.str();
}

inline std::string emit_report(const Report& report, const std::string& format) {
  if (format == "json") return to_json(report).dump(2) + "\n";
  if (format == "csv") return to_csv(report);
  if (format == "text") return to_text(report);
  throw ConfigError("unknown format: " + format);
}

} // namespace twistorlab
