// Acceptance suite: one PASS/FAIL line per criterion, with its tolerance and
// runtime limit. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gds/box_distance.hpp"
#include "gds/constructions.hpp"
#include "gds/coupling.hpp"
#include "gds/metrics.hpp"
#include "gds/observable_distance.hpp"
#include "gds/order_checks.hpp"

using namespace gds;

namespace {

using Q = Rational;
using Gds = GeometricDataSet<Q>;

constexpr double kFloatTol = 1e-9;

Q q(long p, unsigned long d = 1) {
  Q r(p, d);
  r.canonicalize();
  return r;
}

struct Verdict {
  bool ok = true;
  std::string detail;
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
  const Q t = q(static_cast<long>(rng() % 5), 4);
  Matrix<Q> mix(n, m);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < m; ++y) mix(x, y) = t * a(x, y) + (1 - t) * b(x, y);
  return Coupling<Q>(std::move(mix), mu, nu);
}

std::vector<Q> random_weights(std::mt19937_64& rng, std::size_t n) {
  std::vector<long> raw(n);
  long total = 0;
  for (auto& r : raw) total += (r = static_cast<long>(rng() % 5));
  if (total == 0) total += (raw[rng() % n] = 1);
  std::vector<Q> w;
  for (long r : raw) w.push_back(q(r, static_cast<unsigned long>(total)));
  return w;
}

bool within(const Q& a, const Q& b, double tol) { return std::abs(Q(a - b).get_d()) <= tol; }

std::string str(const Q& v) { return format_exact(v); }

// 1. distinct singletons are at observable distance exactly 1
Verdict singleton_separation() {
  std::mt19937_64 rng(1001);
  Verdict v;
  int pairs = 0;
  while (pairs < 20) {
    auto subset = [&] {
      std::vector<Q> s;
      const auto mask = 1 + rng() % 1023;
      for (long i = 0; i < 10; ++i)
        if ((mask >> i) & 1U) s.push_back(q(i));
      return s;
    };
    auto A = subset();
    auto B = subset();
    if (A == B) continue;
    ++pairs;
    const Q d = dconc_exact(singleton_gds<Q>(A), singleton_gds<Q>(B)).value;
    if (d != 1) {
      v.ok = false;
      v.detail = "value " + str(d) + " on pair " + std::to_string(pairs);
    }
  }
  if (v.ok) v.detail = "20 pairs, all exactly 1";
  return v;
}

// 2. d_conc(X_N, *_{1}) <= 1/N, with the oracle values frozen at 1/N
Verdict discrete_example() {
  Verdict v;
  std::ostringstream os;
  auto one = singleton_gds<Q>({q(1)});
  for (unsigned long N = 2; N <= 4; ++N) {
    const Q d = dconc_exact(n_point_discrete<Q>(N), one).value;
    os << "N=" << N << ":" << str(d) << " ";
    if (!(d <= q(1, N))) v.ok = false;
    if (d != q(1, N)) v.ok = false;  // regression value
  }
  v.detail = os.str() + "(bound 1/N, frozen 1/N)";
  return v;
}

// 3. the witness h_N separates X(X_4) from the point by at least 1/2
Verdict mm_witness_bound() {
  auto X = mm_sampled_gds(gds_to_mm(n_point_discrete<Q>(4)), 0, 0);
  // Lip1 of a point is the constants; the grid contains the minimizer 1/2
  std::vector<Q> constants;
  for (long k = 0; k <= 8; ++k) constants.push_back(q(k, 8));
  auto P = singleton_gds<Q>(constants);
  std::vector<Q> h{q(0), q(0), q(1), q(1)};
  const Q d = dconc_lower_witness<Q>(X, P, h);
  return {d >= q(1, 2), "witness value " + str(d) + " >= 1/2"};
}

// 4. d_conc <= Box on 50 random pairs
Verdict dconc_below_box() {
  std::mt19937_64 rng(1004);
  int violations = 0;
  for (int t = 0; t < 50; ++t) {
    auto X = draw(rng, 4, 3);
    auto Y = draw(rng, 4, 3);
    if (!(dconc_exact(X, Y).value <= box_exact(X, Y).value)) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations in 50 pairs"};
}

// 5. symmetry and triangle inequality, also through the glued witnesses
Verdict box_metric() {
  std::mt19937_64 rng(1005);
  int asym = 0, tri = 0, glued = 0;
  for (int t = 0; t < 30; ++t) {
    auto X = draw(rng, 3, 3);
    auto Y = draw(rng, 3, 3);
    auto Z = draw(rng, 3, 3);
    auto xy = box_exact(X, Y);
    auto yz = box_exact(Y, Z);
    const Q xz = box_exact(X, Z).value;
    if (xy.value != box_exact(Y, X).value) ++asym;
    if (!(xz <= xy.value + yz.value)) ++tri;
    // compose the witnesses: glue the couplings and chain the cell sets
    auto g = glue(xy.coupling, yz.coupling);
    CellSet S(X.size(), Z.size());
    for (std::size_t a : xy.cells.cells())
      for (std::size_t b : yz.cells.cells())
        if (a % Y.size() == b / Z.size()) S.insert(a / Y.size(), b % Z.size());
    if (!(box_objective(g.composed, S, X.features(), Z.features()) <= xy.value + yz.value)) ++glued;
  }
  return {asym + tri + glued == 0, "30 triples: " + std::to_string(asym) + " asymmetric, " + std::to_string(tri) +
                                       " triangle, " + std::to_string(glued) + " glued-witness violations"};
}

// 6. dis pi <= Box_pi and the Lip1 witness construction
Verdict distortion_equivalence() {
  std::mt19937_64 rng(1006);
  int order = 0, upper = 0, lipschitz = 0, certificates = 0, certified = 0;
  for (int t = 0; t < 30; ++t) {
    auto A = draw(rng, 3, 3);
    auto B = draw(rng, 3, 3);
    auto pi = draw_coupling(rng, A.measure(), B.measure());
    if (!(dis_coupling(pi, A.metric(), B.metric()).value <= box_at_coupling(pi, A.features(), B.features()).value))
      ++order;

    auto X = gds_to_mm(A);
    auto Y = gds_to_mm(B);
    const std::size_t n = X.size();
    const std::size_t m = Y.size();
    CellSet S(n, m, rng() & ((std::uint64_t{1} << (n * m)) - 1));
    if (S.empty()) S.insert(rng() % (n * m));
    const Q dis = distortion(S, X.dist(), Y.dist());
    auto fs = sample_lip1(X, 10, rng());
    for (std::size_t k = fs.size() - 10; k < fs.size(); ++k) {
      auto g = lip1_witness<Q>(S, fs.row(k), X.dist(), Y.dist());
      if (!is_lipschitz<Q>(g, Y.dist())) ++lipschitz;
      const Q gap = sup_pseudometric<Q>(S, lift_first<Q>(fs.row(k), m), lift_second<Q>(g, n));
      if (Q(2 * gap - dis).get_d() > kFloatTol) ++upper;
    }
    // extremal pair with dX >= dY: f = dX(x1, .) meets the two-value lower bound
    for (std::size_t a : S.cells()) {
      bool done = false;
      for (std::size_t b : S.cells()) {
        const Q dx = X.dist()(a / m, b / m);
        const Q dy = Y.dist()(a % m, b % m);
        if (!(dis > 0) || dx - dy != dis) continue;
        Q lower = dx;
        for (const Q& g1 : {Q(0), dx, Q(dx - dy), Q(dx + dy), Q((dx - dy) / 2), Q((dx + dy) / 2)})
          lower = min_of(lower, max_of(abs_value(g1), max_of(Q(0), Q(abs_value(Q(dx - g1)) - dy))));
        std::vector<Q> f(n);
        for (std::size_t x = 0; x < n; ++x) f[x] = X.dist()(a / m, x);
        auto g = lip1_witness<Q>(S, f, X.dist(), Y.dist());
        const Q gap = sup_pseudometric<Q>(S, lift_first<Q>(f, m), lift_second<Q>(g, n));
        if (!within(lower, dis / 2, kFloatTol) || !within(2 * gap, dis, kFloatTol)) ++certificates;
        ++certified;
        done = true;
        break;
      }
      if (done) break;
    }
  }
  const bool ok = order + upper + lipschitz + certificates == 0 && certified > 0;
  return {ok, std::to_string(order) + " order, " + std::to_string(upper) + " sup-gap, " + std::to_string(lipschitz) +
                  " Lipschitz violations; " + std::to_string(certified) + " extremal certificates, " +
                  std::to_string(certificates) + " failed"};
}

// 7. coupling continuity of Box_pi (4 d_P) and d_conc^pi (2 d_P)
Verdict coupling_continuity() {
  std::mt19937_64 rng(1007);
  int box_bad = 0, dconc_bad = 0;
  for (int t = 0; t < 30; ++t) {
    auto X = draw(rng, 3, 3);
    auto Y = draw(rng, 3, 3);
    auto pi = draw_coupling(rng, X.measure(), Y.measure());
    auto rho = draw_coupling(rng, X.measure(), Y.measure());
    const Q dp = coupling_prohorov(pi, rho, X.metric(), Y.metric());
    const Q a = box_at_coupling(pi, X.features(), Y.features()).value;
    const Q b = box_at_coupling(rho, X.features(), Y.features()).value;
    if (!(abs_diff(a, b) <= 4 * dp)) ++box_bad;
    if (!(abs_diff(dconc_at_coupling(X, Y, pi), dconc_at_coupling(X, Y, rho)) <= 2 * dp)) ++dconc_bad;
  }
  return {box_bad + dconc_bad == 0,
          std::to_string(box_bad) + " Box and " + std::to_string(dconc_bad) + " d_conc violations in 30 pairs"};
}

// 8. od(X; -(kappa + delta)) <= od(Y; -kappa) + 2 delta
Verdict od_semicontinuity() {
  std::mt19937_64 rng(1008);
  const Q step = q(1, 64);
  int violations = 0, checks = 0;
  for (int t = 0; t < 30; ++t) {
    auto X = draw(rng, 4, 3);
    auto Y = draw(rng, 4, 3);
    const Q delta = dconc_exact(X, Y).value + step;
    auto kappas = observable_diameter_breakpoints(Y);
    for (long i = 0; i <= 64; ++i) kappas.push_back(q(i, 64));
    for (const Q& kappa : kappas) {
      if (kappa + delta > 1) continue;
      ++checks;
      if (observable_diameter(X, Q(kappa + delta)) > observable_diameter(Y, kappa) + 2 * delta) ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(checks) + " checks"};
}

// 9. heuristics reach the exact values
Verdict oracle_agreement() {
  std::mt19937_64 rng(1009);
  int dconc_miss = 0, box_miss = 0;
  for (int t = 0; t < 30; ++t) {
    auto X = draw(rng, 3, 3);
    auto Y = draw(rng, 3, 3);
    const auto seed = rng();
    if (!within(dconc_heuristic(X, Y, 2000, seed).value, dconc_exact(X, Y).value, kFloatTol)) ++dconc_miss;
  }
  for (int t = 0; t < 30; ++t) {
    auto X = draw(rng, 3, 3);
    auto Y = draw(rng, 3, 3);
    const auto seed = rng();
    if (!within(box_heuristic(X, Y, 4000, seed).value, box_exact(X, Y).value, kFloatTol)) ++box_miss;
  }
  return {dconc_miss + box_miss == 0, std::to_string(dconc_miss) + " d_conc and " + std::to_string(box_miss) +
                                          " Box mismatches in 30 instances each"};
}

// 10. Prohorov by brute force and by max-flow; Ky Fan dominates Prohorov
Verdict prohorov_paths() {
  std::mt19937_64 rng(1010);
  int disagree = 0, order = 0;
  for (int t = 0; t < 100; ++t) {
    auto X = draw(rng, 8, 3);
    auto mu = random_weights(rng, X.size());
    auto nu = random_weights(rng, X.size());
    if (prohorov_brute_force<Q>(X.metric(), mu, nu) != prohorov_max_flow<Q>(X.metric(), mu, nu)) ++disagree;
  }
  for (int t = 0; t < 100; ++t) {
    auto X = draw(rng, 6, 1);
    const std::size_t n = X.size();
    std::vector<Q> f(n), g(n);
    for (std::size_t x = 0; x < n; ++x) {
      f[x] = q(static_cast<long>(rng() % 9), 8);
      g[x] = q(static_cast<long>(rng() % 9), 8);
    }
    const auto w = X.measure().weights();
    if (!(prohorov_on_line<Q>(f, w, g, w) <= ky_fan<Q>(X.measure(), f, g))) ++order;
  }
  return {disagree + order == 0,
          std::to_string(disagree) + " disagreements, " + std::to_string(order) + " Ky Fan order violations"};
}

// 11. feature order: partial order, the singleton counterexample, quotients
Verdict order_structure() {
  std::mt19937_64 rng(1011);
  int bad = 0;
  auto pick = [&](const FeatureFamily<Q>& F) {
    Matrix<Q> rows(0, F.points());
    for (std::size_t f = 0; f < F.size(); ++f)
      if (rng() % 2 == 0 || (f + 1 == F.size() && rows.rows() == 0)) rows.append_row(F.row(f));
    return FeatureFamily<Q>(std::move(rows));
  };
  for (int t = 0; t < 20; ++t) {
    auto X = draw(rng, 4, 3);
    auto Q1 = quotient_gds(X, pick(X.features()));
    auto Q2 = quotient_gds(Q1.space, pick(Q1.space.features()));
    if (!check_domination(X, X).holds) ++bad;
    auto a = check_domination(X, Q1.space);
    auto b = check_domination(Q1.space, Q2.space);
    if (!a.holds || !b.holds || !check_domination(X, Q2.space).holds) {
      ++bad;
      continue;
    }
    if (check_domination(Q1.space, X).holds && !check_isomorphism(X, Q1.space).holds) ++bad;

    // universal property: Z = X / G' with G' inside G factors through X / G
    auto G = pick(X.features());
    auto Y = quotient_gds(X, G);
    auto Z = quotient_gds(X, pick(G));
    std::size_t factorizations = 0;
    std::vector<std::size_t> tmap(Y.space.size());
    for (std::size_t code = 0, total = detail::saturating_power(Z.space.size(), Y.space.size()); code < total; ++code) {
      std::size_t c = code;
      for (std::size_t y = 0; y < Y.space.size(); ++y, c /= Z.space.size()) tmap[y] = c % Z.space.size();
      bool commutes = true;
      for (std::size_t x = 0; x < X.size(); ++x)
        if (tmap[Y.map[x]] != Z.map[x]) commutes = false;
      if (!commutes) continue;
      ++factorizations;
      auto image = pushforward(Y.space.measure(), tmap, Z.space.size());
      for (std::size_t z = 0; z < Z.space.size(); ++z)
        if (image.weights[z] != Z.space.measure()[z]) ++bad;
    }
    if (factorizations != 1) ++bad;
  }
  const bool counterexample = !check_domination(singleton_gds<Q>({q(0)}), singleton_gds<Q>({q(1)})).holds;
  return {bad == 0 && counterexample, std::to_string(bad) + " violations on 20 instances; *_{0} does " +
                                          (counterexample ? "not " : "") + "dominate *_{1}"};
}

// 12. Levy table of the discrete family
Verdict levy_table_check() {
  auto seq = levy_sequence<Q>(LevyKind::n_point_discrete, 10);
  std::vector<Q> kappas;
  for (long i = 0; i <= 40; ++i) kappas.push_back(q(i, 40));
  auto table = levy_table<Q>(seq, kappas);
  int wrong = 0;
  for (std::size_t N = 1; N <= 10; ++N)
    for (std::size_t j = 0; j < kappas.size(); ++j) {
      // X_1 is a single point, so its row is identically 0
      const Q expect = N >= 2 && kappas[j] < q(1, N) ? q(1) : q(0);
      if (table(N - 1, j) != expect) ++wrong;
    }
  return {wrong == 0, std::to_string(wrong) + " mismatching entries in a 10 x 41 table (closed form for N >= 2, "
                                             "0 for the one-point X_1)"};
}

struct Criterion {
  int id;
  std::string name;
  std::string tolerance;
  double limit_seconds;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "singleton separation", "exact", 1, singleton_separation},
      {2, "discrete example d_conc(X_N, *_{1}) <= 1/N", "exact", 10, discrete_example},
      {3, "mm-space witness bound >= 1/2", "exact", 5, mm_witness_bound},
      {4, "d_conc <= Box", "exact", 300, dconc_below_box},
      {5, "Box metric axioms", "exact", 600, box_metric},
      {6, "distortion equivalence", "1e-9", 120, distortion_equivalence},
      {7, "coupling continuity", "exact", 120, coupling_continuity},
      {8, "observable diameter semi-continuity", "exact", 60, od_semicontinuity},
      {9, "heuristic and exact oracles agree", "1e-9", 600, oracle_agreement},
      {10, "Prohorov dual paths and Ky Fan order", "exact", 60, prohorov_paths},
      {11, "order structure", "exact", 120, order_structure},
      {12, "Levy diagnostic table", "exact", 1, levy_table_check},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = v.ok && in_time;
    if (!pass) ++failures;
    char timing[96];
    std::snprintf(timing, sizeof timing, "%.3fs of %.0fs", secs, c.limit_seconds);
    std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (tol " << c.tolerance << ", "
              << timing << (in_time ? "" : ", over time") << "): " << v.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
