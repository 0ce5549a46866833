#include "catch_amalgamated.hpp"

#include "support.hpp"

#include "reactsynth/error.hpp"

using namespace reactsynth;
using namespace reactsynth::testing;
using Catch::Approx;

namespace {

Eigen::VectorXd pt(double a) { return Eigen::VectorXd::Constant(1, a); }
Eigen::VectorXd pt(double a, double b) { return Eigen::Vector2d(a, b); }

}  // namespace

TEST_CASE("box basics")
{
  const Box b(pt(0, 1), pt(2, 4));
  CHECK(b.dim() == 2);
  CHECK(b.volume() == 6);
  CHECK(b.radius() == 1.5);
  CHECK(b.widest() == 1);
  CHECK(b.center() == pt(1, 2.5));
  const auto [lo, hi] = b.split(1);
  CHECK(lo.hi(1) == 2.5);
  CHECK(hi.lo(1) == 2.5);
  CHECK(b.clamp(pt(-1, 5)) == pt(0, 4));
  CHECK(b.contains(pt(2, 4)));
  CHECK_FALSE(b.contains(pt(2.1, 4)));
  const auto p = b.product(Box::cube(1, 5, 6));
  CHECK(p.dim() == 3);
  CHECK(p.slice(2, 1) == Box::cube(1, 5, 6));
  CHECK_THROWS_AS(Box(pt(1), pt(0)), DomainError);
  CHECK_THROWS_AS(Box(pt(0), pt(1, 1)), DimensionError);
}

TEST_CASE("removed squares are open")
{
  const RemovedSquare sq{pt(0.5, 0.5), 0.25};
  CHECK(sq.contains(pt(0.5, 0.7)));
  CHECK_FALSE(sq.contains(pt(0.75, 0.5)));
  CHECK(sq.covers(Box(pt(0.3, 0.3), pt(0.7, 0.7))));
  CHECK_FALSE(sq.covers(Box(pt(0.25, 0.3), pt(0.7, 0.7))));
  CHECK(sq.disjoint(Box(pt(0.75, 0), pt(1, 1))));
  CHECK_FALSE(sq.disjoint(Box(pt(0.74, 0), pt(1, 1))));
}

TEST_CASE("a square larger than the base empties it")
{
  RegionSet r(Box::cube(1, 0, 1));
  r.remove(pt(0.5), 0.6);
  CHECK_FALSE(r.contains(pt(0)));
  CHECK_FALSE(r.contains(pt(1)));
  CHECK_FALSE(r.find_point(1e-3).has_value());
  const auto [lo, hi] = r.remaining_measure_bounds(10);
  CHECK(lo == 0);
  CHECK(hi == 0);
}

TEST_CASE("removal keeps the boundary point")
{
  RegionSet r(Box::cube(1, 0, 3));
  r.remove(pt(0), 1);
  CHECK(r.contains(pt(1)));
  CHECK_FALSE(r.contains(pt(0.999)));
  CHECK(r.contains(pt(3)));
  const auto [lo, hi] = r.remaining_measure_bounds(10);
  CHECK(lo == Approx(2));
  CHECK(hi == Approx(2));
}

TEST_CASE("two corner squares leave the anti-diagonal band")
{
  RegionSet r(Box::cube(2, 0, 1));
  r.remove(pt(0, 0), 0.5);
  r.remove(pt(1, 1), 0.5);
  CHECK(r.contains(pt(0.6, 0.2)));
  CHECK_FALSE(r.contains(pt(0.2, 0.2)));
  CHECK(r.contains(pt(0.5, 0.5)));
  CHECK_FALSE(r.contains(pt(0.9, 0.7)));
  const auto [lo, hi] = r.remaining_measure_bounds(12);
  CHECK(lo == Approx(0.5));
  CHECK(hi == Approx(0.5));
}

TEST_CASE("membership")
{
  RegionSet r(Box::cube(2, 0, 1));
  CHECK(r.contains(pt(0.3, 0.3)));
  CHECK_FALSE(r.contains(pt(1.2, 0.3)));
  r.remove(pt(0.5, 0.5), 0.25);
  CHECK(r.contains(pt(0.75, 0.5)));
  CHECK_FALSE(r.contains(pt(0.74, 0.5)));
}

TEST_CASE("find_point examples")
{
  RegionSet r(Box::cube(2, 0, 1));
  CHECK(*r.find_point(1e-3) == pt(0.5, 0.5));

  RegionSet line(Box::cube(1, 0, 1));
  line.remove(pt(0.25), 0.3);
  const auto p = line.find_point(1e-3);
  REQUIRE(p);
  CHECK((*p)(0) >= 0.55);
  CHECK(line.contains(*p));

  CHECK_THROWS_AS(line.find_point(0), DomainError);
}

TEST_CASE("find_point_in looks only inside the sub-box")
{
  RegionSet r(Box::cube(1, 0, 1));
  r.remove(pt(0.5), 0.25);
  CHECK_FALSE(r.find_point_in(Box::cube(1, 0.3, 0.7), 1e-4).has_value());
  const auto p = r.find_point_in(Box::cube(1, 0.6, 1), 1e-4);
  REQUIRE(p);
  CHECK((*p)(0) >= 0.75);
}

TEST_CASE("measure brackets tighten with depth")
{
  RegionSet r(Box::cube(2, 0, 1));
  auto full = r.remaining_measure_bounds(4);
  CHECK(full.first == 1);
  CHECK(full.second == 1);

  RegionSet line(Box::cube(1, 0, 1));
  line.remove(pt(0.5), 0.25);
  const auto coarse = line.remaining_measure_bounds(0);
  const auto fine = line.remaining_measure_bounds(16);
  CHECK(coarse.first <= 0.5);
  CHECK(coarse.second >= 0.5);
  CHECK(fine.first >= coarse.first);
  CHECK(fine.second <= coarse.second);
  CHECK(fine.first == Approx(0.5));
  CHECK(fine.second == Approx(0.5));
}

TEST_CASE("invalid removals are rejected")
{
  RegionSet r(Box::cube(2, 0, 1));
  CHECK_THROWS_AS(r.remove(pt(0.5, 0.5), 0), DomainError);
  CHECK_THROWS_AS(r.remove(pt(0.5), 0.1), DimensionError);
  CHECK_THROWS_AS(r.remaining_measure_bounds(-1), DomainError);
}

TEST_CASE("without leaves the original untouched")
{
  const RegionSet r(Box::cube(1, 0, 1));
  const auto s = r.without(pt(0.5), 0.1);
  CHECK(r.removed().empty());
  CHECK(s.removed().size() == 1);
  CHECK_FALSE(s.contains(pt(0.5)));
}

TEST_CASE("random removals: monotone measure, consistent points, exact cover")
{
  std::mt19937_64 rng(301);
  std::uniform_real_distribution<double> unit(0, 1), rad(0.02, 0.2);
  for (int n = 0; n < 30; ++n) {
    const Eigen::Index dim = 1 + n % 2;
    RegionSet r(Box::cube(dim, 0, 1));
    double last_upper = 1;
    for (int k = 0; k < 12; ++k) {
      Eigen::VectorXd c(dim);
      for (auto & x : c) { x = unit(rng); }
      r.remove(c, rad(rng));
      const auto [lo, hi] = r.remaining_measure_bounds(12);
      REQUIRE(lo <= hi);
      REQUIRE(hi <= last_upper + 1e-12);
      last_upper = hi;
      if (auto p = r.find_point(1e-4)) {
        REQUIRE(r.contains(*p));
      }
      REQUIRE(r.removed().size() == static_cast<std::size_t>(k + 1));
    }
    // Few squares: the bracket collapses and matches a grid count.
    const auto [lo, hi] = r.remaining_measure_bounds(12);
    CHECK(hi - lo <= 1e-9);
    const int per = dim == 1 ? 100001 : 801;
    std::size_t inside = 0, total = 0;
    for_each_grid_point(r.base(), per, [&](const Eigen::VectorXd & p) {
      ++total;
      if (r.contains(p)) { ++inside; }
    });
    CHECK(double(inside) / double(total) == Approx(hi).margin(dim == 1 ? 1e-4 : 1e-2));
  }
}
