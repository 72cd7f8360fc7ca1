#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"

#include "flr/errors.hpp"
#include "flr/hilbert.hpp"

using namespace flr;

namespace {

Curve random_curve(const GridPtr& grid, std::mt19937_64& gen) {
  std::normal_distribution<double> z;
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid->size()));
  for (auto& x : v) x = z(gen);
  return Curve(grid, v);
}

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

TEST_CASE("trapezoid grid weights") {
  auto g2 = make_trapezoid_grid(0.0, 1.0, 2);
  CHECK(g2->points() == std::vector<double>{0.0, 1.0});
  CHECK(g2->weights() == std::vector<double>{0.5, 0.5});

  auto g3 = make_trapezoid_grid(0.0, 1.0, 3);
  CHECK(g3->weights() == std::vector<double>{0.25, 0.5, 0.25});

  auto g5 = make_trapezoid_grid(0.0, 2.0, 5);
  double sum = 0.0;
  for (double w : g5->weights()) sum += w;
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-12));

  auto g = make_trapezoid_grid(-1.0, 3.0, 1001);
  sum = 0.0;
  for (double w : g->weights()) sum += w;
  CHECK(std::abs(sum - 4.0) / 4.0 < 1e-12);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(make_trapezoid_grid(0.0, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(make_trapezoid_grid(1.0, 1.0, 3), ValidationError);
  CHECK_THROWS_AS(make_trapezoid_grid(2.0, 1.0, 3), ValidationError);
  CHECK_THROWS_AS(Grid({0.0, 0.0}, {1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(Grid({0.0, 1.0}, {1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(Grid({0.0, 1.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(Grid({0.0}, {1.0}), ValidationError);
}

TEST_CASE("curve validation") {
  auto grid = make_trapezoid_grid(0.0, 1.0, 3);
  CHECK_THROWS_AS(Curve(grid, Eigen::VectorXd::Zero(2)), StructuralError);
  Eigen::VectorXd bad(3);
  bad << 0.0, std::nan(""), 1.0;
  CHECK_THROWS_AS(Curve(grid, bad), ValidationError);
}

TEST_CASE("inner product examples") {
  auto grid = make_trapezoid_grid(0.0, 1.0, 11);
  const Curve one(grid, Eigen::VectorXd::Ones(11));
  CHECK(inner_product(one, one) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(norm(one) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(norm(Curve::zero(grid)) == 0.0);

  Eigen::VectorXd even = Eigen::VectorXd::Zero(11), odd = Eigen::VectorXd::Zero(11);
  for (Eigen::Index i = 0; i < 11; ++i) (i % 2 == 0 ? even : odd)[i] = 1.0 + static_cast<double>(i);
  CHECK(inner_product(Curve(grid, even), Curve(grid, odd)) == 0.0);

  // trapezoid rule against the analytic integral of sin^2(pi t) over [0, 1]
  auto fine = make_trapezoid_grid(0.0, 1.0, 201);
  Eigen::VectorXd s(201);
  for (Eigen::Index i = 0; i < 201; ++i) s[i] = std::sin(std::numbers::pi * fine->points()[static_cast<std::size_t>(i)]);
  const Curve sine(fine, s);
  CHECK(std::abs(inner_product(sine, sine) - 0.5) < 1e-4);

  const Curve u = sine * (1.0 / norm(sine));
  CHECK(norm(u * 3.0) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("cross-grid operations are rejected") {
  auto a = make_trapezoid_grid(0.0, 1.0, 5);
  auto b = make_trapezoid_grid(0.0, 2.0, 5);
  auto a_copy = make_trapezoid_grid(0.0, 1.0, 5);
  const Curve f(a, Eigen::VectorXd::Ones(5));
  CHECK_THROWS_AS(inner_product(f, Curve(b, Eigen::VectorXd::Ones(5))), StructuralError);
  // equal grids built separately are the same grid
  CHECK_NOTHROW(inner_product(f, Curve(a_copy, Eigen::VectorXd::Ones(5))));
  InnerProductSpace space(b);
  CHECK_THROWS_AS(space.inner_product(f, f), StructuralError);
}

TEST_CASE("inner product properties on random curves") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 2 + static_cast<std::size_t>(trial % 40);
    std::vector<double> pts(p), w(p);
    double t = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      t += u(gen);
      pts[i] = t;
      w[i] = u(gen);
    }
    auto grid = std::make_shared<const Grid>(pts, w);
    InnerProductSpace space(grid);
    const Curve f = random_curve(grid, gen), g = random_curve(grid, gen), h = random_curve(grid, gen);
    const double a = std::normal_distribution<double>()(gen), b = std::normal_distribution<double>()(gen);

    // symmetric bit for bit
    CHECK(space.inner_product(f, g) == space.inner_product(g, f));
    // bilinear
    CHECK(rel(space.inner_product(f * a + g * b, h), a * space.inner_product(f, h) + b * space.inner_product(g, h)) <
          1e-10);
    // Cauchy-Schwarz
    CHECK(std::abs(space.inner_product(f, g)) <= space.norm(f) * space.norm(g) * (1.0 + 1e-10));
    // parallelogram law
    const double lhs = std::pow(space.norm(f + g), 2) + std::pow(space.norm(f - g), 2);
    const double rhs = 2.0 * (std::pow(space.norm(f), 2) + std::pow(space.norm(g), 2));
    CHECK(rel(lhs, rhs) < 1e-10);
    // positive definite
    CHECK(space.inner_product(f, f) > 0.0);
  }
}

TEST_CASE("curve matrix CSV") {
  std::istringstream in("0,0.5,1\n1,2,3\n-1.5e-3,0,4\n\n");
  const Sample s = read_curve_matrix(in);
  CHECK(s.size() == 2);
  CHECK(s.grid()->weights() == std::vector<double>{0.25, 0.5, 0.25});
  CHECK(s.rows()(1, 0) == -1.5e-3);

  std::ostringstream out;
  write_curve_matrix(out, s);
  std::istringstream back(out.str());
  const Sample again = read_curve_matrix(back);
  CHECK(again.rows() == s.rows());
  CHECK(*again.grid() == *s.grid());

  std::istringstream ragged("0,1\n1,2,3\n");
  CHECK_THROWS_AS(read_curve_matrix(ragged), StructuralError);
  std::istringstream text("0,1\n1,abc\n");
  CHECK_THROWS_AS(read_curve_matrix(text), ValidationError);
  std::istringstream only_grid("0,1\n");
  CHECK_THROWS_AS(read_curve_matrix(only_grid), ValidationError);
  std::istringstream comma_decimal("0;1\n1,5;2\n");
  CHECK_THROWS_AS(read_curve_matrix(comma_decimal), ValidationError);
}

TEST_CASE("real formatting round-trips and is locale independent") {
  CHECK(format_real(2.0) == "2.0");
  CHECK(format_real(-0.5) == "-0.5");
  CHECK(format_real(1e-300) == "1e-300");
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = z(gen);
    CHECK(parse_real(format_real(v)) == v);
  }
  CHECK_THROWS_AS(parse_real("1,5"), ValidationError);
  CHECK_THROWS_AS(parse_real("inf"), ValidationError);
  CHECK(parse_real(" +3.25 ") == 3.25);
}

TEST_CASE("sample from curves") {
  auto grid = make_trapezoid_grid(0.0, 1.0, 3);
  std::vector<Curve> curves{Curve(grid, Eigen::Vector3d(1, 2, 3)), Curve(grid, Eigen::Vector3d(4, 5, 6))};
  const Sample s(curves);
  CHECK(s.size() == 2);
  CHECK(s.curve(1).values() == Eigen::Vector3d(4, 5, 6));
  CHECK_THROWS_AS(Sample(std::span<const Curve>{}), ValidationError);
  curves.push_back(Curve(make_trapezoid_grid(0.0, 2.0, 3), Eigen::Vector3d(1, 1, 1)));
  CHECK_THROWS_AS(Sample{curves}, StructuralError);
}
