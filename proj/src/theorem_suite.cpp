#include "gds/theorem_suite.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <utility>

#include "gds/box_distance.hpp"
#include "gds/constructions.hpp"
#include "gds/coupling.hpp"
#include "gds/metrics.hpp"
#include "gds/observable_distance.hpp"
#include "gds/order_checks.hpp"

namespace gds {

namespace {

using Q = Rational;
using Gds = GeometricDataSet<Q>;

struct Outcome {
  bool ok = true;
  std::size_t size = 0;
  Json instance;
};

struct Property {
  std::string name;
  bool asserted;
  std::function<Outcome(std::mt19937_64&)> run;
};

Gds draw(std::mt19937_64& rng, std::size_t max_n, std::size_t max_k) {
  return random_gds<Q>(1 + rng() % max_n, 1 + rng() % max_k, rng());
}

Coupling<Q> draw_coupling(std::mt19937_64& rng, const DiscreteMeasure<Q>& mu, const DiscreteMeasure<Q>& nu) {
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  const std::uint64_t mask = (std::uint64_t{1} << (n * m)) - 1;
  auto a = max_mass_on_set(mu, nu, CellSet(n, m, rng() & mask)).coupling;
  auto b = max_mass_on_set(mu, nu, CellSet(n, m, rng() & mask)).coupling;
  const Q t = from_ratio<Q>(static_cast<std::int64_t>(rng() % 5), 4);
  Matrix<Q> mix(n, m);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < m; ++y) mix(x, y) = t * a(x, y) + (1 - t) * b(x, y);
  return Coupling<Q>(std::move(mix), mu, nu);
}

Json matrix_json(const Matrix<Q>& M) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < M.cols(); ++j) row.push_back(format_exact(M(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Outcome spaces(bool ok, std::initializer_list<std::pair<const char*, const Gds*>> named) {
  Outcome out{ok, 0, Json::object()};
  for (const auto& [name, X] : named) {
    out.size += X->size();
    out.instance[name] = dataset_to_json(*X);
  }
  return out;
}

std::vector<Property> registry() {
  std::vector<Property> props;

  props.push_back({"d_conc <= Box", true, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 3, 3);
                     auto Y = draw(rng, 3, 3);
                     return spaces(dconc_exact(X, Y).value <= box_exact(X, Y).value, {{"X", &X}, {"Y", &Y}});
                   }});

  props.push_back({"d_conc metric axioms", true, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 3, 2);
                     auto Y = draw(rng, 3, 2);
                     auto Z = draw(rng, 3, 2);
                     const Q xy = dconc_exact(X, Y).value;
                     const bool ok = xy == dconc_exact(Y, X).value && dconc_exact(X, X).value == 0 &&
                                     dconc_exact(X, Z).value <= xy + dconc_exact(Y, Z).value;
                     return spaces(ok, {{"X", &X}, {"Y", &Y}, {"Z", &Z}});
                   }});

  props.push_back({"Box metric axioms", true, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 3, 2);
                     auto Y = draw(rng, 3, 2);
                     auto Z = draw(rng, 3, 2);
                     const Q xy = box_exact(X, Y).value;
                     const bool ok = xy == box_exact(Y, X).value && box_exact(X, X).value == 0 &&
                                     box_exact(X, Z).value <= xy + box_exact(Y, Z).value;
                     return spaces(ok, {{"X", &X}, {"Y", &Y}, {"Z", &Z}});
                   }});

  props.push_back({"dis pi <= Box_pi", true, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 3, 3);
                     auto Y = draw(rng, 3, 3);
                     auto pi = draw_coupling(rng, X.measure(), Y.measure());
                     const bool ok = dis_coupling(pi, X.metric(), Y.metric()).value <=
                                     box_at_coupling(pi, X.features(), Y.features()).value;
                     auto out = spaces(ok, {{"X", &X}, {"Y", &Y}});
                     out.instance["pi"] = matrix_json(pi.matrix());
                     return out;
                   }});

  props.push_back({"coupling continuity of Box_pi and d_conc^pi", true, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 3, 2);
                     auto Y = draw(rng, 3, 2);
                     auto pi = draw_coupling(rng, X.measure(), Y.measure());
                     auto rho = draw_coupling(rng, X.measure(), Y.measure());
                     const Q dp = coupling_prohorov(pi, rho, X.metric(), Y.metric());
                     const Q box_gap = abs_diff(box_at_coupling(pi, X.features(), Y.features()).value,
                                                box_at_coupling(rho, X.features(), Y.features()).value);
                     const Q dconc_gap = abs_diff(dconc_at_coupling(X, Y, pi), dconc_at_coupling(X, Y, rho));
                     auto out = spaces(box_gap <= 4 * dp && dconc_gap <= 2 * dp, {{"X", &X}, {"Y", &Y}});
                     out.instance["pi"] = matrix_json(pi.matrix());
                     out.instance["rho"] = matrix_json(rho.matrix());
                     return out;
                   }});

  props.push_back({"observable diameter semi-continuity", true, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 3, 2);
                     auto Y = draw(rng, 3, 2);
                     const Q delta = dconc_exact(X, Y).value + Q(1, 64);
                     bool ok = true;
                     for (const Q& kappa : observable_diameter_breakpoints(Y)) {
                       if (kappa + delta > 1) continue;
                       if (observable_diameter(X, Q(kappa + delta)) > observable_diameter(Y, kappa) + 2 * delta)
                         ok = false;
                     }
                     return spaces(ok, {{"X", &X}, {"Y", &Y}});
                   }});

  props.push_back({"Prohorov brute force = max-flow", true, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 6, 3);
                     auto w = [&] {
                       std::vector<std::int64_t> raw(X.size());
                       std::int64_t total = 0;
                       for (auto& r : raw) total += (r = static_cast<std::int64_t>(rng() % 4));
                       if (total == 0) total += (raw[0] = 1);
                       std::vector<Q> out;
                       for (auto r : raw) out.push_back(from_ratio<Q>(r, total));
                       return out;
                     };
                     auto mu = w();
                     auto nu = w();
                     const bool ok = prohorov_brute_force<Q>(X.metric(), mu, nu) == prohorov_max_flow<Q>(X.metric(), mu, nu);
                     return spaces(ok, {{"X", &X}});
                   }});

  props.push_back({"Ky Fan bounds Prohorov of pushforwards", true, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 5, 2);
                     auto f = X.features().row(0);
                     auto g = X.features().row(X.features().size() - 1);
                     const auto w = X.measure().weights();
                     const bool ok = prohorov_on_line<Q>(f, w, g, w) <= ky_fan(X.measure(), f, g);
                     return spaces(ok, {{"X", &X}});
                   }});

  props.push_back({"Lip1 witness", true, [](std::mt19937_64& rng) {
                     auto A = draw(rng, 3, 2);
                     auto B = draw(rng, 3, 2);
                     auto X = gds_to_mm(A);
                     auto Y = gds_to_mm(B);
                     const std::size_t n = X.size();
                     const std::size_t m = Y.size();
                     CellSet S(n, m, rng() & ((std::uint64_t{1} << (n * m)) - 1));
                     if (S.empty()) S.insert(0);
                     const Q dis = distortion(S, X.dist(), Y.dist());
                     auto fs = sample_lip1(X, 4, rng());
                     bool ok = true;
                     for (std::size_t k = 0; k < fs.size(); ++k) {
                       auto g = lip1_witness<Q>(S, fs.row(k), X.dist(), Y.dist());
                       if (!is_lipschitz<Q>(g, Y.dist())) ok = false;
                       if (2 * sup_pseudometric<Q>(S, lift_first<Q>(fs.row(k), m), lift_second<Q>(g, n)) > dis) ok = false;
                     }
                     return spaces(ok, {{"X", &A}, {"Y", &B}});
                   }});

  props.push_back({"heuristics bound the exact values", true, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 3, 2);
                     auto Y = draw(rng, 3, 2);
                     const auto seed = rng();
                     const bool ok = dconc_heuristic(X, Y, 200, seed).value >= dconc_exact(X, Y).value &&
                                     box_heuristic(X, Y, 600, seed).value >= box_exact(X, Y).value;
                     return spaces(ok, {{"X", &X}, {"Y", &Y}});
                   }});

  props.push_back({"heuristics reach the exact values", false, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 3, 2);
                     auto Y = draw(rng, 3, 2);
                     const auto seed = rng();
                     const bool ok = dconc_heuristic(X, Y, 200, seed).value == dconc_exact(X, Y).value &&
                                     box_heuristic(X, Y, 600, seed).value == box_exact(X, Y).value;
                     return spaces(ok, {{"X", &X}, {"Y", &Y}});
                   }});

  props.push_back({"feature order is a partial order", true, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 4, 3);
                     auto pick = [&](const FeatureFamily<Q>& F) {
                       Matrix<Q> rows(0, F.points());
                       for (std::size_t f = 0; f < F.size(); ++f)
                         if (rng() % 2 == 0 || (f + 1 == F.size() && rows.rows() == 0)) rows.append_row(F.row(f));
                       return FeatureFamily<Q>(std::move(rows));
                     };
                     auto Q1 = quotient_gds(X, pick(X.features()));
                     auto Q2 = quotient_gds(Q1.space, pick(Q1.space.features()));
                     bool ok = check_domination(X, X).holds && check_domination(X, Q1.space).holds &&
                               check_domination(Q1.space, Q2.space).holds && check_domination(X, Q2.space).holds;
                     const bool back = check_domination(Q1.space, X).holds;
                     if (back && !check_isomorphism(X, Q1.space).holds) ok = false;
                     return spaces(ok, {{"X", &X}});
                   }});

  props.push_back({"quotient universal property", true, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 4, 3);
                     auto pick = [&](const FeatureFamily<Q>& F) {
                       Matrix<Q> rows(0, F.points());
                       for (std::size_t f = 0; f < F.size(); ++f)
                         if (rng() % 2 == 0 || (f + 1 == F.size() && rows.rows() == 0)) rows.append_row(F.row(f));
                       return FeatureFamily<Q>(std::move(rows));
                     };
                     auto G = pick(X.features());
                     auto Y = quotient_gds(X, G);
                     auto Z = quotient_gds(X, pick(G));
                     // the unique factorization is forced on the image of the quotient map
                     std::vector<std::size_t> t(Y.space.size(), Z.space.size());
                     bool ok = true;
                     for (std::size_t x = 0; x < X.size(); ++x) {
                       std::size_t& slot = t[Y.map[x]];
                       if (slot != Z.space.size() && slot != Z.map[x]) ok = false;
                       slot = Z.map[x];
                     }
                     if (ok) {
                       auto image = pushforward(Y.space.measure(), t, Z.space.size());
                       for (std::size_t z = 0; z < Z.space.size(); ++z)
                         if (image.weights[z] != Z.space.measure()[z]) ok = false;
                       for (std::size_t a = 0; a < Y.space.size(); ++a)
                         for (std::size_t b = 0; b < Y.space.size(); ++b)
                           if (Z.space.metric()(t[a], t[b]) > Y.space.metric()(a, b)) ok = false;
                     }
                     return spaces(ok, {{"X", &X}});
                   }});

  props.push_back({"dominated partner", true, [](std::mt19937_64& rng) {
                     auto X = draw(rng, 3, 3);
                     auto Y = draw(rng, 3, 3);
                     Matrix<Q> rows(0, X.size());
                     for (std::size_t f = 0; f < X.features().size(); ++f)
                       if (rng() % 2 == 0 || (f + 1 == X.features().size() && rows.rows() == 0))
                         rows.append_row(X.features().row(f));
                     auto Xp = quotient_gds(X, FeatureFamily<Q>(std::move(rows)));
                     auto r = dominated_partner(X, Xp.space, Xp.map, Y);
                     const bool ok = r.partner.space.features().size() <= Xp.space.features().size() &&
                                     r.dconc_reduced <= r.dconc_original &&
                                     check_domination(Y, r.partner.space).holds;
                     return spaces(ok, {{"X", &X}, {"Y", &Y}});
                   }});

  props.push_back({"Box of mm-spaces is the infimum of dis pi", true, [](std::mt19937_64& rng) {
                     auto A = draw(rng, 3, 2);
                     auto B = draw(rng, 3, 2);
                     auto X = gds_to_mm(A);
                     auto Y = gds_to_mm(B);
                     Q best = 1;
                     for (const auto& pi : enumerate_couplings(X.measure(), Y.measure()))
                       best = min_of(best, dis_coupling(pi, X.dist(), Y.dist()).value);
                     return spaces(best == box_mm_exact(X, Y).value, {{"X", &A}, {"Y", &B}});
                   }});

  return props;
}

}  // namespace

bool SuiteReport::ok() const {
  return std::none_of(properties.begin(), properties.end(),
                      [](const PropertyReport& p) { return p.asserted && p.failed > 0; });
}

Json SuiteReport::to_json() const {
  Json doc;
  doc["seed"] = seed;
  doc["trials"] = trials;
  doc["ok"] = ok();
  Json list = Json::array();
  for (const auto& p : properties) {
    Json entry;
    entry["name"] = p.name;
    entry["asserted"] = p.asserted;
    entry["passed"] = p.passed;
    entry["failed"] = p.failed;
    if (p.failing_instance) {
      entry["failing_size"] = *p.failing_size;
      entry["failing_instance"] = *p.failing_instance;
    }
    list.push_back(std::move(entry));
  }
  doc["properties"] = std::move(list);
  return doc;
}

std::vector<std::string> theorem_suite_properties() {
  std::vector<std::string> names;
  for (const auto& p : registry()) names.push_back(p.name);
  return names;
}

SuiteReport verify_theorem_suite(std::uint64_t seed, std::size_t trials) {
  SuiteReport report{seed, trials, {}};
  if (trials == 0) return report;
  const auto props = registry();
  for (std::size_t i = 0; i < props.size(); ++i) {
    PropertyReport pr{props[i].name, props[i].asserted, 0, 0, std::nullopt, std::nullopt};
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    for (std::size_t t = 0; t < trials; ++t) {
      Outcome out = props[i].run(rng);
      if (out.ok) {
        ++pr.passed;
        continue;
      }
      ++pr.failed;
      if (!pr.failing_size || out.size < *pr.failing_size) {
        pr.failing_size = out.size;
        pr.failing_instance = std::move(out.instance);
      }
    }
    report.properties.push_back(std::move(pr));
  }
  return report;
}

}  // namespace gds
