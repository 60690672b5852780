// gds_cli: command-line front end for the geometric data set library.
//
// Exit codes: 0 success, 1 verification failure, 2 bad input, 3 budget
// exceeded without a heuristic fallback.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gds/box_distance.hpp"
#include "gds/constructions.hpp"
#include "gds/dataset_io.hpp"
#include "gds/errors.hpp"
#include "gds/metrics.hpp"
#include "gds/observable_distance.hpp"
#include "gds/order_checks.hpp"
#include "gds/theorem_suite.hpp"

namespace {

using gds::Json;

struct Options {
  std::string mode = "exact";
  std::size_t budget_cells = 16;
  std::uint64_t seed = 0;

  std::string input = "-";
  std::string other;
  std::vector<std::string> inputs;

  // od / pd / kyfan / prohorov
  std::vector<std::string> kappas;
  std::size_t grid = 0;
  std::string feature;
  std::string feature2;
  std::string alpha = "1/2";

  // dconc / box
  bool exact = false;
  bool heuristic = false;
  bool bounds = false;
  bool mm = false;
  std::size_t budget = 65536;
  std::size_t heuristic_budget = 2000;

  // quotient
  std::vector<std::string> keep;

  // gen
  std::vector<std::string> values;
  std::size_t n = 3;
  std::size_t k = 2;
  std::string scale = "1";
  std::string kind = "discrete";
  std::string base;

  // check
  std::string tol;

  std::size_t trials = 50;
};

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

template <gds::Scalar T>
T parse_value(const std::string& text) {
  T out{};
  if (!gds::parse_scalar(text, out)) throw gds::SchemaError("not a number: \"" + text + "\"");
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

/// A dataset from a path, "-", or a generator spec such as "singleton:0,1",
/// "discrete:4" or "random:n,k,seed".
template <gds::Scalar T>
gds::GeometricDataSet<T> resolve(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string head = spec.substr(0, colon);
    const auto args = split(spec.substr(colon + 1), ',');
    if (head == "singleton") {
      std::vector<T> values;
      for (const auto& a : args) values.push_back(parse_value<T>(a));
      if (values.empty()) throw gds::SchemaError("singleton: needs at least one value");
      return gds::singleton_gds<T>(std::span<const T>(values));
    }
    auto count = [&](std::size_t i) -> std::size_t {
      if (i >= args.size()) throw gds::SchemaError("generator spec \"" + spec + "\" is missing arguments");
      return std::stoull(args[i]);
    };
    if (head == "discrete") return gds::n_point_discrete<T>(count(0));
    if (head == "random") return gds::random_gds<T>(count(0), count(1), args.size() > 2 ? count(2) : 0);
  }
  return gds::load_dataset<T>(spec);
}

template <gds::Scalar T>
Json number(const T& v) {
  Json out;
  out["decimal"] = gds::format_decimal(v);
  if constexpr (gds::scalar_traits<T>::exact) out["exact"] = gds::format_exact(v);
  return out;
}

template <gds::Scalar T>
Json matrix_json(const gds::Matrix<T>& M) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < M.cols(); ++j) row.push_back(gds::scalar_to_json(M(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t feature_index(const std::vector<std::string>& labels, const std::string& name) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == name) return i;
  throw gds::SchemaError("no feature named \"" + name + "\"");
}

void emit(const Json& doc) { std::cout << doc.dump(2) << '\n'; }

// Picks the two inputs of a binary command: positionals first, then --other.
template <gds::Scalar T>
std::pair<gds::GeometricDataSet<T>, gds::GeometricDataSet<T>> pair_of(const Options& o) {
  std::vector<std::string> specs = o.inputs;
  if (specs.empty()) specs.push_back("-");
  if (specs.size() == 1) {
    if (o.other.empty()) throw gds::SchemaError("a second data set is required (positional or --other)");
    specs.push_back(o.other);
  }
  return {resolve<T>(specs[0]), resolve<T>(specs[1])};
}

template <gds::Scalar T>
std::vector<T> kappa_list(const Options& o) {
  std::vector<T> kappas;
  for (const auto& s : o.kappas) kappas.push_back(parse_value<T>(s));
  if (o.grid > 0)
    for (std::size_t i = 0; i <= o.grid; ++i)
      kappas.push_back(gds::from_ratio<T>(static_cast<std::int64_t>(i), static_cast<std::int64_t>(o.grid)));
  return kappas;
}

template <gds::Scalar T>
int cmd_od(const Options& o) {
  auto X = resolve<T>(o.input);
  auto kappas = kappa_list<T>(o);
  if (kappas.empty()) kappas = gds::observable_diameter_breakpoints(X);
  std::cout << "kappa,od" << (gds::scalar_traits<T>::exact ? ",kappa_exact,od_exact" : "") << '\n';
  for (const T& kappa : kappas) {
    const T v = gds::observable_diameter(X, kappa);
    std::cout << gds::format_decimal(kappa) << ',' << gds::format_decimal(v);
    if constexpr (gds::scalar_traits<T>::exact) std::cout << ',' << gds::format_exact(kappa) << ',' << gds::format_exact(v);
    std::cout << '\n';
  }
  return 0;
}

template <gds::Scalar T>
int cmd_pd(const Options& o) {
  auto X = resolve<T>(o.input);
  const T alpha = parse_value<T>(o.alpha);
  Json doc;
  doc["alpha"] = number(alpha);
  Json rows = Json::object();
  for (std::size_t f = 0; f < X.features().size(); ++f) {
    const auto& name = X.features().labels()[f];
    if (!o.feature.empty() && name != o.feature) continue;
    rows[name] = number(gds::partial_diameter<T>(X.features().row(f), X.measure(), alpha));
  }
  if (rows.empty()) throw gds::SchemaError("no feature named \"" + o.feature + "\"");
  doc["partial_diameter"] = std::move(rows);
  emit(doc);
  return 0;
}

template <gds::Scalar T>
int cmd_dconc(const Options& o) {
  auto [X, Y] = pair_of<T>(o);
  Json doc;
  if (o.bounds) {
    auto upper = gds::dconc_heuristic(X, Y, o.heuristic_budget, o.seed);
    T lower = 0;
    for (std::size_t f = 0; f < X.features().size(); ++f)
      lower = gds::max_of(lower, gds::dconc_lower_witness<T>(X, Y, X.features().row(f)));
    doc["lower"] = number(lower);
    doc["upper"] = number(upper.value);
    emit(doc);
    return 0;
  }
  if (o.heuristic && !o.exact) {
    auto h = gds::dconc_heuristic(X, Y, o.heuristic_budget, o.seed);
    doc["dconc"] = number(h.value);
    doc["exact"] = false;
    doc["coupling"] = matrix_json(h.coupling.matrix());
    emit(doc);
    return 0;
  }
  gds::DconcOptions opt;
  opt.max_assignment_pairs = o.budget;
  opt.fallback_to_heuristic = o.heuristic;
  opt.heuristic_budget = o.heuristic_budget;
  opt.seed = o.seed;
  auto r = gds::dconc_exact(X, Y, opt);
  doc["dconc"] = number(r.value);
  doc["exact"] = r.exact;
  doc["coupling"] = matrix_json(r.coupling.matrix());
  emit(doc);
  return 0;
}

template <gds::Scalar T>
Json cells_json(const gds::CellSet& S) {
  Json cells = Json::array();
  for (std::size_t c : S.cells()) cells.push_back(Json::array({c / S.cols(), c % S.cols()}));
  return cells;
}

template <gds::Scalar T>
int cmd_box(const Options& o) {
  auto [X, Y] = pair_of<T>(o);
  Json doc;
  if (o.mm) {
    auto MX = gds::gds_to_mm(X);
    auto MY = gds::gds_to_mm(Y);
    if (o.heuristic && !o.exact) {
      auto h = gds::box_mm_heuristic(MX, MY, o.heuristic_budget, o.seed);
      doc["box"] = number(h.value);
      doc["exact"] = false;
      doc["cells"] = cells_json<T>(h.cells);
      doc["coupling"] = matrix_json(h.coupling.matrix());
    } else {
      try {
        auto r = gds::box_mm_exact(MX, MY, o.budget_cells);
        doc["box"] = number(r.value);
        doc["exact"] = true;
        doc["cells"] = cells_json<T>(r.cells);
        doc["coupling"] = matrix_json(r.coupling.matrix());
      } catch (const gds::SizeLimit&) {
        if (!o.heuristic) throw;
        auto h = gds::box_mm_heuristic(MX, MY, o.heuristic_budget, o.seed);
        doc["box"] = number(h.value);
        doc["exact"] = false;
        doc["cells"] = cells_json<T>(h.cells);
        doc["coupling"] = matrix_json(h.coupling.matrix());
      }
    }
    emit(doc);
    return 0;
  }
  if (o.heuristic && !o.exact) {
    auto h = gds::box_heuristic(X, Y, o.heuristic_budget, o.seed);
    doc["box"] = number(h.value);
    doc["exact"] = false;
    doc["cells"] = cells_json<T>(h.cells);
    doc["coupling"] = matrix_json(h.coupling.matrix());
    emit(doc);
    return 0;
  }
  gds::BoxOptions opt;
  opt.max_cells = o.budget_cells;
  opt.fallback_to_heuristic = o.heuristic;
  opt.heuristic_budget = o.heuristic_budget;
  opt.seed = o.seed;
  auto r = gds::box_exact(X, Y, opt);
  doc["box"] = number(r.value);
  doc["exact"] = r.exact;
  doc["cells"] = cells_json<T>(r.cells);
  doc["coupling"] = matrix_json(r.coupling.matrix());
  emit(doc);
  return 0;
}

template <gds::Scalar T>
int cmd_prohorov(const Options& o) {
  Json doc;
  if (!o.feature.empty()) {
    auto X = resolve<T>(o.inputs.empty() ? o.input : o.inputs[0]);
    const auto f = X.features().row(feature_index(X.features().labels(), o.feature));
    const auto g = X.features().row(feature_index(X.features().labels(), o.feature2));
    const auto w = X.measure().weights();
    doc["prohorov"] = number(gds::prohorov_on_line<T>(f, w, g, w));
    emit(doc);
    return 0;
  }
  auto [X, Y] = pair_of<T>(o);
  if (X.size() != Y.size()) throw gds::SchemaError("prohorov: both data sets must have the same points");
  doc["prohorov"] = number(gds::prohorov<T>(X.metric(), X.measure().weights(), Y.measure().weights()));
  emit(doc);
  return 0;
}

template <gds::Scalar T>
int cmd_kyfan(const Options& o) {
  auto X = resolve<T>(o.input);
  const auto f = X.features().row(feature_index(X.features().labels(), o.feature));
  const auto g = X.features().row(feature_index(X.features().labels(), o.feature2));
  Json doc;
  doc["ky_fan"] = number(gds::ky_fan(X.measure(), f, g));
  emit(doc);
  return 0;
}

template <gds::Scalar T>
int cmd_quotient(const Options& o) {
  auto X = resolve<T>(o.input);
  gds::Matrix<T> rows(0, X.size());
  std::vector<std::string> labels;
  for (const auto& name : o.keep) {
    rows.append_row(X.features().row(feature_index(X.features().labels(), name)));
    labels.push_back(name);
  }
  if (labels.empty()) throw gds::SchemaError("quotient: name at least one feature with --keep");
  auto q = gds::quotient_gds(X, gds::FeatureFamily<T>(std::move(rows), std::move(labels)));
  gds::write_dataset(std::cout, q.space);
  return 0;
}

template <gds::Scalar T>
int cmd_product(const Options& o) {
  auto [X, Y] = pair_of<T>(o);
  gds::write_dataset(std::cout, gds::product_gds(X, Y));
  return 0;
}

template <gds::Scalar T>
int cmd_gen(const Options& o, const std::string& what) {
  if (what == "singleton") {
    std::vector<T> values;
    for (const auto& v : o.values) values.push_back(parse_value<T>(v));
    if (values.empty()) throw gds::SchemaError("gen singleton: give --values");
    gds::write_dataset(std::cout, gds::singleton_gds<T>(std::span<const T>(values)));
  } else if (what == "discrete") {
    gds::write_dataset(std::cout, gds::n_point_discrete<T>(o.n));
  } else if (what == "random") {
    gds::write_dataset(std::cout, gds::random_gds<T>(o.n, o.k, o.seed, parse_value<T>(o.scale)));
  } else {
    std::vector<gds::GeometricDataSet<T>> seq;
    if (o.kind == "discrete") {
      seq = gds::levy_sequence<T>(gds::LevyKind::n_point_discrete, o.n);
    } else if (o.kind == "power") {
      if (o.base.empty()) throw gds::SchemaError("gen levy --kind power needs --base");
      auto base = resolve<T>(o.base);
      seq = gds::levy_sequence<T>(gds::LevyKind::product_power, o.n, &base);
    } else {
      throw gds::SchemaError("gen levy: unknown kind \"" + o.kind + "\"");
    }
    auto kappas = kappa_list<T>(o);
    if (kappas.empty())
      for (std::int64_t i = 0; i <= 10; ++i) kappas.push_back(gds::from_ratio<T>(i, 10));
    auto table = gds::levy_table<T>(seq, kappas);
    std::cout << "N";
    for (const T& kappa : kappas) std::cout << ",od(" << gds::format_exact(kappa) << ")";
    std::cout << '\n';
    for (std::size_t i = 0; i < seq.size(); ++i) {
      std::cout << i + 1;
      for (std::size_t j = 0; j < kappas.size(); ++j) std::cout << ',' << gds::format_decimal(table(i, j));
      std::cout << '\n';
    }
  }
  return 0;
}

template <gds::Scalar T>
int cmd_check(const Options& o, const std::string& what) {
  auto [X, Y] = pair_of<T>(o);
  const T tol = o.tol.empty() ? gds::scalar_traits<T>::tolerance() : parse_value<T>(o.tol);
  auto verdict = what == "domination" ? gds::check_domination(X, Y, tol) : gds::check_isomorphism(X, Y, tol);
  Json doc;
  doc["relation"] = what;
  doc["holds"] = verdict.holds;
  if (verdict.map) doc["map"] = *verdict.map;
  emit(doc);
  return 0;
}

int cmd_verify(const Options& o) {
  auto report = gds::verify_theorem_suite(o.seed, o.trials);
  emit(report.to_json());
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  o.mode = env_or("GDS_MODE", "exact");
  try {
    o.budget_cells = std::stoull(env_or("GDS_BUDGET_CELLS", "16"));
  } catch (const std::exception&) {
    std::cerr << "error: GDS_BUDGET_CELLS must be a positive integer\n";
    return 2;
  }

  CLI::App app{"Observable diameter, observable distance and box distance of finite geometric data sets"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--mode", o.mode, "exact (rational) or float arithmetic; default from GDS_MODE")
      ->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--budget-cells", o.budget_cells, "cap on n*m for cell-set enumeration; default from GDS_BUDGET_CELLS");
  app.add_option("--seed", o.seed, "seed for generators and heuristics");

  const std::string source_help = "data set: path, '-', singleton:a,b, discrete:N or random:n,k,seed";

  auto* od = app.add_subcommand("od", "observable diameter over a kappa grid (CSV)");
  od->add_option("input", o.input, source_help);
  od->add_option("--kappa", o.kappas, "kappa values")->delimiter(',');
  od->add_option("--grid", o.grid, "use kappa = i/K for i = 0..K");

  auto* pd = app.add_subcommand("pd", "partial diameter of feature pushforwards");
  pd->add_option("input", o.input, source_help);
  pd->add_option("--alpha", o.alpha, "mass fraction");
  pd->add_option("--feature", o.feature, "restrict to one feature");

  auto* dconc = app.add_subcommand("dconc", "observable distance");
  dconc->add_option("inputs", o.inputs, source_help)->expected(0, 2);
  dconc->add_option("--other", o.other, "second data set when only one positional is given");
  dconc->add_flag("--exact", o.exact, "exact search (default)");
  dconc->add_flag("--heuristic", o.heuristic, "heuristic only, or fallback with --exact");
  dconc->add_flag("--bounds", o.bounds, "lower bound from feature witnesses and heuristic upper bound");
  dconc->add_option("--budget", o.budget, "cap on assignment pairs for the exact search");
  dconc->add_option("--heuristic-budget", o.heuristic_budget, "iterations of the heuristic");

  auto* box = app.add_subcommand("box", "box distance");
  box->add_option("inputs", o.inputs, source_help)->expected(0, 2);
  box->add_option("--other", o.other, "second data set when only one positional is given");
  box->add_flag("--exact", o.exact, "exact enumeration (default)");
  box->add_flag("--heuristic", o.heuristic, "heuristic only, or fallback with --exact");
  box->add_flag("--mm", o.mm, "treat inputs as mm-spaces with their induced metrics");
  box->add_option("--heuristic-budget", o.heuristic_budget, "objective evaluations of the heuristic");

  auto* prohorov = app.add_subcommand("prohorov", "Prohorov distance of two measures on the same points");
  prohorov->add_option("inputs", o.inputs, source_help)->expected(0, 2);
  prohorov->add_option("--other", o.other, "second data set when only one positional is given");
  prohorov->add_option("--f", o.feature, "with --g: distance between the pushforwards of one data set");
  prohorov->add_option("--g", o.feature2, "second feature");

  auto* kyfan = app.add_subcommand("kyfan", "Ky Fan distance between two features");
  kyfan->add_option("input", o.input, source_help);
  kyfan->add_option("--f", o.feature, "first feature")->required();
  kyfan->add_option("--g", o.feature2, "second feature")->required();

  auto* quotient = app.add_subcommand("quotient", "quotient by a subfamily of features (dataset JSON)");
  quotient->add_option("input", o.input, source_help);
  quotient->add_option("--keep", o.keep, "features spanning the quotient")->delimiter(',')->required();

  auto* product = app.add_subcommand("product", "product data set (dataset JSON)");
  product->add_option("inputs", o.inputs, source_help)->expected(0, 2);
  product->add_option("--other", o.other, "second data set when only one positional is given");

  auto* gen = app.add_subcommand("gen", "generators");
  gen->require_subcommand(1);
  auto* gen_singleton = gen->add_subcommand("singleton", "one point with constant features");
  gen_singleton->add_option("--values", o.values, "constants")->delimiter(',')->required();
  auto* gen_discrete = gen->add_subcommand("discrete", "N-point discrete data set");
  gen_discrete->add_option("--n", o.n, "number of points")->check(CLI::PositiveNumber);
  auto* gen_random = gen->add_subcommand("random", "seeded random instance");
  gen_random->add_option("--n", o.n, "points")->check(CLI::PositiveNumber);
  gen_random->add_option("--k", o.k, "features")->check(CLI::PositiveNumber);
  gen_random->add_option("--scale", o.scale, "feature values lie in [0, scale]");
  auto* gen_levy = gen->add_subcommand("levy", "observable diameter table of a Levy sequence (CSV)");
  gen_levy->add_option("--kind", o.kind, "discrete or power")->check(CLI::IsMember({"discrete", "power"}));
  gen_levy->add_option("--n", o.n, "largest member")->check(CLI::PositiveNumber);
  gen_levy->add_option("--base", o.base, "base data set for product powers");
  gen_levy->add_option("--kappa", o.kappas, "kappa values")->delimiter(',');
  gen_levy->add_option("--grid", o.grid, "use kappa = i/K for i = 0..K");

  auto* check = app.add_subcommand("check", "order relations");
  check->require_subcommand(1);
  std::vector<CLI::App*> check_subs;
  for (const char* rel : {"domination", "isomorphism"}) {
    auto* sub = check->add_subcommand(rel, std::string("does the first data set admit a ") + rel + " onto the second");
    sub->add_option("inputs", o.inputs, source_help)->expected(0, 2);
    sub->add_option("--other", o.other, "second data set when only one positional is given");
    sub->add_option("--tol", o.tol, "sup-norm tolerance for feature matching");
    check_subs.push_back(sub);
  }

  auto* verify = app.add_subcommand("verify", "randomized theorem suite (JSON report)");
  verify->add_option("--trials", o.trials, "trials per property");

  CLI11_PARSE(app, argc, argv);
  if (o.mode != "exact" && o.mode != "float") {
    std::cerr << "error: mode must be exact or float\n";
    return 2;
  }

  auto dispatch = [&]<gds::Scalar T>() -> int {
    if (od->parsed()) return cmd_od<T>(o);
    if (pd->parsed()) return cmd_pd<T>(o);
    if (dconc->parsed()) return cmd_dconc<T>(o);
    if (box->parsed()) return cmd_box<T>(o);
    if (prohorov->parsed()) return cmd_prohorov<T>(o);
    if (kyfan->parsed()) return cmd_kyfan<T>(o);
    if (quotient->parsed()) return cmd_quotient<T>(o);
    if (product->parsed()) return cmd_product<T>(o);
    if (gen->parsed()) {
      for (auto* sub : {gen_singleton, gen_discrete, gen_random, gen_levy})
        if (sub->parsed()) return cmd_gen<T>(o, sub->get_name());
    }
    for (auto* sub : check_subs)
      if (sub->parsed()) return cmd_check<T>(o, sub->get_name());
    return cmd_verify(o);
  };

  try {
    return o.mode == "exact" ? dispatch.template operator()<gds::Rational>() : dispatch.template operator()<double>();
  } catch (const gds::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << " (rerun with --heuristic)\n";
    return 3;
  } catch (const gds::SizeLimit& e) {
    std::cerr << "budget exceeded: " << e.what() << " (rerun with --heuristic or raise GDS_BUDGET_CELLS)\n";
    return 3;
  } catch (const gds::SchemaError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const gds::Error& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
