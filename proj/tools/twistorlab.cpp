// twistorlab: run the verification suites and print a residual report.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <twistorlab/runner.hpp>

using namespace twistorlab;

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for twistor spaces of even Clifford structures"};
  RunConfig config;
  std::string kappa_text = "1";
  std::string suites_text = "all";
  std::vector<std::string> tolerance_text;
  std::vector<double> t_values;

  app.add_option("-r,--rank", config.rank, "Clifford rank r (3..16)")->capture_default_str();
  app.add_option("-m,--multiplicity", config.multiplicity, "Copies of the irreducible representation")->capture_default_str();
  app.add_option("-k,--kappa", kappa_text, "Curvature constant, exact (1, -2, 3/2, 0.25)")->capture_default_str();
  app.add_option("--t", t_values, "Vertical metric scales for the connection checks (default 1 0.5)");
  app.add_option("-s,--seed", config.seed, "Random seed")->capture_default_str();
  app.add_option("-n,--samples", config.samples, "Samples per suite")->capture_default_str();
  app.add_option("--suites", suites_text, "Comma-separated suites or 'all'")->capture_default_str();
  app.add_option("--tolerance", tolerance_text, "Per-suite tolerance override, suite=value (repeatable)");
  app.add_option("-f,--format", config.format, "text, json or csv")->capture_default_str();
  app.add_option("-o,--out", config.output, "Output file (default stdout)");
  app.add_flag("--timings", config.timings, "Include wall-clock timings in json output");
  app.add_option("--grid-points", config.grid.points_per_axis, "flat-global: grid points per axis")->capture_default_str();
  app.add_option("--grid-extent", config.grid.extent, "flat-global: coordinate half-width")->capture_default_str();
  app.add_option("--grid-step", config.grid.step, "flat-global: finite-difference step")->capture_default_str();
  app.add_option("--grid-pairs", config.grid.pairs, "flat-global: vector pairs per point")->capture_default_str();
  app.footer("Environment: TWISTORLAB_THREADS sets how many suites run concurrently.\n"
             "Exit codes: 0 pass, 1 suite failure, 2 configuration error, 3 I/O error.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Report report;
  try {
    config.kappa = parse_rational(kappa_text);
    config.suites = parse_suite_list(suites_text);
    for (const auto& t : tolerance_text) config.tolerances.insert(parse_tolerance(t));
    if (!t_values.empty()) config.t_values = t_values;
    config.threads = threads_from_environment();
    report = run(config);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }

  const std::string text = emit_report(report, config.format);
  if (config.output.empty()) {
    std::cout << text;
    if (!std::cout) return 3;
  } else {
    std::ofstream out(config.output, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) {
      std::cerr << "cannot write " << config.output << '\n';
      return 3;
    }
  }
  return report.exit_code();
}
