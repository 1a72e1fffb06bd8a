#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "liouplan/cartan.hpp"
#include "liouplan/errors.hpp"
#include "liouplan/quadrature.hpp"
#include "liouplan/scenarios.hpp"
#include "liouplan/verify.hpp"
#include "support.hpp"

using namespace liouplan;
using testing_support::fill_column;

namespace {

CumulativeIntegral integrate_fn(double t0, double tf, std::size_t n, auto f) {
  TrajectoryTable table(t0, tf, n);
  fill_column(table, "f", f);
  return cumulative_integral(table.grid("f"), table.midpoints("f"), table.step());
}

double sup_gap(const std::vector<double>& got, auto exact, const TrajectoryTable& table) {
  double worst = 0.0;
  for (std::size_t k = 0; k < table.points(); ++k) worst = std::max(worst, std::abs(got[k] - exact(table.time(k))));
  return worst;
}

ExtensionStep step(const char* var, ExtensionKind kind, const char* alpha) {
  return {var, kind, parse_expression(alpha)};
}

PVForm pv_of(std::vector<std::vector<std::string>> text) {
  std::vector<std::vector<Expr>> entries;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < text.size(); ++i) {
    names.push_back("z" + std::to_string(i + 1));
    entries.emplace_back();
    for (const auto& s : text[i]) entries.back().push_back(parse_expression(s));
  }
  return PVForm(names, entries);
}

}  // namespace

TEST_CASE("cumulative Simpson examples") {
  const CumulativeIntegral g = integrate_fn(0.0, 1.0, 100, [](double t) { return 5 * t * t; });
  CHECK(g.grid.front() == 0.0);
  CHECK(std::abs(g.grid.back() - 5.0 / 3.0) <= 1e-10);

  // y = t^2: y + y'^2 = t^2 + 4t^2, integral 5t^3/3 everywhere, midpoints too.
  TrajectoryTable table(0.0, 2.0, 37);
  fill_column(table, "y", [](double t) { return t * t; });
  fill_column(table, "y'", [](double t) { return 2 * t; });
  const SampledColumn f = sample_expression(parse_expression("y + y'^2"), table);
  const CumulativeIntegral h = cumulative_integral(f.grid, f.mid, table.step());
  for (std::size_t k = 0; k < table.points(); ++k) {
    const double t = table.time(k);
    CHECK(h.grid[k] == doctest::Approx(5 * t * t * t / 3).epsilon(1e-13));
  }
  for (std::size_t k = 0; k < table.intervals(); ++k) {
    const double t = table.mid_time(k);
    CHECK(h.mid[k] == doctest::Approx(5 * t * t * t / 3).epsilon(1e-13));
  }

  const CumulativeIntegral z = integrate_fn(0.0, 1.0, 10, [](double) { return 0.0; });
  for (double v : z.grid) CHECK(v == 0.0);
}

TEST_CASE("cumulative integral rejects non-finite samples with their index") {
  std::vector<double> grid{0, 1, NAN, 3};
  std::vector<double> mid{0, 1, 2};
  try {
    cumulative_integral(grid, mid, 0.1);
    FAIL("expected NonFiniteSample");
  } catch (const NonFiniteSample& e) {
    CHECK(e.index() == 2);
  }
  grid[2] = 2;
  mid[1] = INFINITY;
  try {
    cumulative_integral(grid, mid, 0.1);
    FAIL("expected NonFiniteSample");
  } catch (const NonFiniteSample& e) {
    CHECK(e.index() == 4 + 1);
  }
  CHECK_THROWS_AS(cumulative_integral(grid, std::vector<double>{1.0}, 0.1), InputError);
}

TEST_CASE("property: monotone for nonnegative integrands") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = testing_support::uniform(rng, 0.1, 3), b = testing_support::uniform(rng, 0, 6);
    const CumulativeIntegral g = integrate_fn(0.0, 2.0, 64, [&](double t) { return a * std::pow(std::sin(b * t), 2); });
    for (std::size_t k = 1; k < g.grid.size(); ++k) CHECK(g.grid[k] >= g.grid[k - 1]);
  }
}

TEST_CASE("convergence order of the cumulative integral") {
  auto f = [](double t) { return std::exp(std::sin(t)) * std::cos(3 * t); };
  // Reference: the same rule on a 64x finer grid.
  const CumulativeIntegral ref = integrate_fn(0.0, 2.0, 12800, f);
  std::vector<double> err;
  for (std::size_t n : {25u, 50u, 100u, 200u}) {
    const CumulativeIntegral g = integrate_fn(0.0, 2.0, n, f);
    double worst = 0.0;
    for (std::size_t k = 0; k <= n; ++k) worst = std::max(worst, std::abs(g.grid[k] - ref.grid[k * (12800 / n)]));
    err.push_back(worst);
  }
  for (std::size_t i = 0; i + 1 < err.size(); ++i) CHECK(err[i] / err[i + 1] >= 11.0);
}

TEST_CASE("integral and exponential extensions") {
  TrajectoryTable base(0.5, 1.5, 50);
  const SampledColumn one = integral_extension(parse_expression("1"), base, 0.0);
  CHECK(sup_gap(one.grid, [](double t) { return t - 0.5; }, base) <= 1e-14);

  TrajectoryTable quarter(0.0, std::numbers::pi / 2, 100);
  CHECK(std::abs(integral_extension(parse_expression("cos(t)"), quarter, 0.0).grid.back() - 1.0) <= 1e-8);

  const SampledColumn e1 = exponential_extension(parse_expression("1"), base, 1.0);
  CHECK(sup_gap(e1.grid, [](double t) { return std::exp(t - 0.5); }, base) <= 1e-12);

  TrajectoryTable from0(0.0, 3.0, 200);
  const SampledColumn es = exponential_extension(parse_expression("cos(t)"), from0, 1.0);
  CHECK(sup_gap(es.grid, [](double t) { return std::exp(std::sin(t)); }, from0) <= 1e-8);

  const SampledColumn zero = exponential_extension(parse_expression("cos(t)"), from0, 0.0);
  for (double v : zero.grid) CHECK(v == 0.0);
  for (double v : zero.mid) CHECK(v == 0.0);

  CHECK_THROWS_AS(exponential_extension(parse_expression("1000"), base, 1.0), ExpOverflow);
  CHECK_THROWS_AS(integral_extension(parse_expression("q"), base, 0.0), InputError);
  CHECK_THROWS_AS(integral_extension(parse_expression("1/(t-1)"), base, 0.0), DomainError);
}

TEST_CASE("chain reconstruction") {
  TrajectoryTable base(0.0, 1.0, 40);
  fill_column(base, "w", [](double t) { return std::sin(t); });

  const TrajectoryTable same = reconstruct_chain({}, base, {});
  CHECK(same.column_names() == base.column_names());

  ExtensionChain chain{{step("p", ExtensionKind::Integral, "1"), step("q", ExtensionKind::Integral, "p")}};
  const TrajectoryTable out = reconstruct_chain(chain, base, {0.0, 0.0});
  CHECK(sup_gap(out.grid("q"), [](double t) { return t * t / 2; }, out) <= 1e-14);
  CHECK(out.has_midpoints("q"));

  ExtensionChain mixed{{step("p", ExtensionKind::Integral, "w"), step("q", ExtensionKind::Exponential, "p")}};
  const TrajectoryTable m = reconstruct_chain(mixed, base, {1.0, 2.0});
  // p = 2 - cos t; q = 2 exp(2t - sin t).
  CHECK(sup_gap(m.grid("p"), [](double t) { return 2 - std::cos(t); }, m) <= 1e-10);
  CHECK(sup_gap(m.grid("q"), [](double t) { return 2 * std::exp(2 * t - std::sin(t)); }, m) <= 1e-8);

  CHECK_THROWS_AS(reconstruct_chain(chain, base, {0.0}), InputError);
  ExtensionChain broken{{step("p", ExtensionKind::Integral, "ln(t)")}};
  try {
    reconstruct_chain(broken, base, {0.0});
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("'p'") != std::string::npos);
  }
}

TEST_CASE("variation of constants examples") {
  TrajectoryTable base(0.0, 1.0, 400);
  const TrajectoryTable thm1 =
      reconstruct(ReconstructionPlan::for_pv(pv_of({{"1", "0"}, {"2", "1"}}), {1.0, 0.0}), base);
  CHECK(sup_gap(thm1.grid("z1"), [](double t) { return std::exp(t); }, base) <= 1e-12);
  CHECK(sup_gap(thm1.grid("z2"), [](double t) { return 2 * t * std::exp(t); }, base) <= 1e-11);

  const ReconstructionPlan diag = ReconstructionPlan::for_pv(pv_of({{"cos(t)"}}), {1.0});
  CHECK(diag.mode == ReconstructionMode::Triangular);
  CHECK(sup_gap(reconstruct(diag, base).grid("z1"), [](double t) { return std::exp(std::sin(t)); }, base) <= 1e-10);

  const TrajectoryTable zero = reconstruct(ReconstructionPlan::for_pv(pv_of({{"1"}}), {0.0}), base);
  for (double v : zero.grid("z1")) CHECK(v == 0.0);

  CHECK_THROWS_AS(ReconstructionPlan::for_pv(pv_of({{"0", "1"}, {"0", "1"}}), {0.0, 1.0}), InputError);
  ReconstructionPlan forced = ReconstructionPlan::for_pv(pv_of({{"cos(t)"}}), {1.0});
  forced.mode = ReconstructionMode::UnitTriangular;
  CHECK_THROWS_AS(reconstruct_pv(forced, base), InputError);
  CHECK_THROWS_AS(reconstruct(ReconstructionPlan::for_pv(pv_of({{"1"}}), {0.0, 1.0}), base), InputError);
}

TEST_CASE("property: exponential chain step and 1x1 PV agree") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    TrajectoryTable base(0.0, 1.0, 100);
    const double a = testing_support::uniform(rng, -2, 2), w = testing_support::uniform(rng, 0, 5);
    fill_column(base, "e", [&](double t) { return a * std::cos(w * t); });
    const Expr alpha = parse_expression("e + t^2");
    const double x0 = testing_support::uniform(rng, -2, 2);
    const TrajectoryTable chain = reconstruct(
        ReconstructionPlan::for_chain({{{"z1", ExtensionKind::Exponential, alpha}}}, {x0}), base);
    const TrajectoryTable pv = reconstruct(ReconstructionPlan::for_pv(PVForm({"z1"}, {{alpha}}), {x0}), base);
    double worst = 0.0;
    for (std::size_t k = 0; k < base.points(); ++k) {
      worst = std::max(worst, std::abs(chain.grid("z1")[k] - pv.grid("z1")[k]) / std::max(1.0, std::abs(pv.grid("z1")[k])));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("embedded integral agrees with the integral extension") {
  const CartanField cf = CartanField::from_system(builtin_academic(3));
  const Expr alpha = parse_expression("2 + sin(3*t)");
  TrajectoryTable base(0.0, 1.0, 200);
  const PVForm pv = embed_integral_as_pv(cf, alpha);
  CHECK(pv.classification() == MatrixClass::General);
  const TrajectoryTable direct = integrate_linear(pv, base, {0.0, 2.0});
  const SampledColumn quad = integral_extension(alpha, base, 0.0);
  for (std::size_t k = 0; k < base.points(); ++k) CHECK(std::abs(direct.grid("xi")[k] - quad.grid[k]) <= 1e-8);
}
