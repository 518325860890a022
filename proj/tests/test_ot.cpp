#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "trajlab/core/errors.hpp"
#include "trajlab/core/gradcheck.hpp"
#include "trajlab/core/rng.hpp"
#include "trajlab/ot/sinkhorn.hpp"

using namespace trajlab;
using ot::DiscreteMeasure;
using ot::SinkhornOptions;

namespace {

Vec v1(double x) {
  Vec v(1);
  v << x;
  return v;
}

std::vector<Vec> random_cloud(Rng& rng, int n, int d, double shift = 0.0) {
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vec p(d);
    for (int j = 0; j < d; ++j) p[j] = rng.gaussian() + shift;
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace

TEST_SUITE_BEGIN("ot");

TEST_CASE("cost matrix hand values") {
  CHECK(ot::cost_matrix({Vec::Zero(2)}, {Vec::Zero(2)})(0, 0) == 0.0);

  const Mat c = ot::cost_matrix({v1(0.0)}, {v1(1.0), v1(3.0)});
  CHECK(c(0, 0) == doctest::Approx(1.0));
  CHECK(c(0, 1) == doctest::Approx(9.0));
}

TEST_CASE("cost matrix equals the expanded-identity recomputation") {
  Rng rng(21);
  const auto xs = random_cloud(rng, 3, 5);
  const auto ys = random_cloud(rng, 4, 5);
  const Mat c = ot::cost_matrix(xs, ys);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double expanded = xs[static_cast<std::size_t>(i)].squaredNorm() -
                              2.0 * xs[static_cast<std::size_t>(i)].dot(
                                        ys[static_cast<std::size_t>(j)]) +
                              ys[static_cast<std::size_t>(j)].squaredNorm();
      CHECK(c(i, j) == doctest::Approx(expanded).epsilon(1e-12));
    }
  }
}

TEST_CASE("single atoms force the trivial plan and entropic cost c(x,y)") {
  const auto a = DiscreteMeasure::uniform({v1(0.0)});
  const auto b = DiscreteMeasure::uniform({v1(1.0)});
  SinkhornOptions opt;
  const ot::TransportPlan tp = ot::sinkhorn(a, b, opt);
  CHECK(tp.converged);
  CHECK(tp.plan(0, 0) == doctest::Approx(1.0).epsilon(1e-9));

  CHECK(ot::ot_eps(a, a, opt).value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ot::ot_eps(a, b, opt).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("1-D sorted uniform atoms concentrate on the monotone matching") {
  std::vector<Vec> pts = {v1(0.0), v1(0.5), v1(1.0), v1(1.5)};
  const auto a = DiscreteMeasure::uniform(pts);
  std::vector<Vec> shifted = {v1(0.05), v1(0.55), v1(1.05), v1(1.55)};
  const auto b = DiscreteMeasure::uniform(shifted);
  SinkhornOptions opt{1e-3, 5000, 1e-10};
  const ot::TransportPlan tp = ot::sinkhorn(a, b, opt);
  REQUIRE(tp.converged);
  for (int i = 0; i < 4; ++i) {
    CHECK(tp.plan(i, i) >= 0.95 * a.weights[i]);
  }
}

TEST_CASE("uniform pairs on matching supports cost about zero") {
  const auto a = DiscreteMeasure::uniform({v1(0.0), v1(1.0)});
  const auto b = DiscreteMeasure::uniform({v1(0.0), v1(1.0)});
  SinkhornOptions opt{1e-3, 5000, 1e-10};
  const ot::OtValue v = ot::ot_eps(a, b, opt);
  CHECK(v.converged);
  CHECK(std::abs(v.value) < 5e-3);
}

TEST_CASE("divergence identity, symmetry, trivial pair") {
  Rng rng(5);
  SinkhornOptions opt;
  const auto pts = random_cloud(rng, 6, 3);
  const auto a = DiscreteMeasure::uniform(pts);
  const auto b = DiscreteMeasure::uniform(random_cloud(rng, 5, 3, 0.7));

  CHECK(std::abs(ot::sinkhorn_divergence(a, a, opt).value) < 1e-8);
  const double ab = ot::sinkhorn_divergence(a, b, opt).value;
  const double ba = ot::sinkhorn_divergence(b, a, opt).value;
  CHECK(std::abs(ab - ba) < 1e-8);

  const auto d0 = DiscreteMeasure::uniform({v1(0.0)});
  const auto d1 = DiscreteMeasure::uniform({v1(1.0)});
  CHECK(ot::sinkhorn_divergence(d0, d1, opt).value ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("divergence is nonnegative over seeded instances") {
  SinkhornOptions opt;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto a = DiscreteMeasure::uniform(random_cloud(rng, 6, 2));
    const auto b = DiscreteMeasure::uniform(random_cloud(rng, 7, 2, 0.5));
    const ot::OtValue v = ot::sinkhorn_divergence(a, b, opt);
    CHECK(v.converged);
    CHECK(v.value >= -1e-8);
  }
}

TEST_CASE("divergence approaches the exact assignment cost as eps shrinks") {
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    Rng rng(seed);
    const auto xs = random_cloud(rng, 8, 2);
    const auto ys = random_cloud(rng, 8, 2, 1.0);
    const double exact = testing::exact_assignment_cost(xs, ys);
    REQUIRE(exact > 1e-3);

    const auto a = DiscreteMeasure::uniform(xs);
    const auto b = DiscreteMeasure::uniform(ys);
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double eps : {0.1, 0.05, 0.01}) {
      SinkhornOptions opt{eps, 20000, 1e-10};
      const ot::OtValue v = ot::sinkhorn_divergence(a, b, opt);
      REQUIRE(v.converged);
      const double gap = std::abs(v.value - exact);
      CHECK(gap <= prev_gap + 1e-9);  // monotone shrinkage
      prev_gap = gap;
      if (eps == 0.01) CHECK(gap / exact < 0.05);
    }
  }
}

TEST_CASE("point gradient: zero at a == b, closed form for single atoms") {
  SinkhornOptions opt;
  Rng rng(17);
  const auto pts = random_cloud(rng, 4, 2);
  const auto a = DiscreteMeasure::uniform(pts);
  const ot::PointGrads self = ot::sinkhorn_grad_points(a, a, opt);
  REQUIRE(self.converged);
  for (const Vec& g : self.grads) CHECK(g.norm() < 1e-6);

  Vec x(2);
  Vec y(2);
  x << 0.2, -0.4;
  y << 1.0, 0.3;
  const auto dx = DiscreteMeasure::uniform({x});
  const auto dy = DiscreteMeasure::uniform({y});
  const ot::PointGrads g = ot::sinkhorn_grad_points(dx, dy, opt);
  CHECK((g.grads[0] - 2.0 * (x - y)).norm() < 1e-8);
}

TEST_CASE("point gradient matches finite differences through the solver") {
  SinkhornOptions opt{0.05, 5000, 1e-12};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(300 + seed);
    const auto xs = random_cloud(rng, 5, 2);
    const auto ys = random_cloud(rng, 5, 2, 0.6);
    const auto a = DiscreteMeasure::uniform(xs);
    const auto b = DiscreteMeasure::uniform(ys);

    const ot::PointGrads g = ot::sinkhorn_grad_points(a, b, opt);
    REQUIRE(g.converged);
    Vec analytic(10);
    Vec flat(10);
    for (int i = 0; i < 5; ++i) {
      analytic.segment(2 * i, 2) = g.grads[static_cast<std::size_t>(i)];
      flat.segment(2 * i, 2) = xs[static_cast<std::size_t>(i)];
    }
    const Vec numeric = finite_diff_grad(
        [&](const Vec& theta) {
          std::vector<Vec> moved = xs;
          for (int i = 0; i < 5; ++i) {
            moved[static_cast<std::size_t>(i)] = theta.segment(2 * i, 2);
          }
          return ot::sinkhorn_divergence(DiscreteMeasure::uniform(moved), b, opt)
              .value;
        },
        flat, 1e-5);
    CHECK(max_rel_error(analytic, numeric, 1e-4) < 1e-3);
  }
}

TEST_CASE("non-convergence is reported, not thrown") {
  Rng rng(9);
  const auto a = DiscreteMeasure::uniform(random_cloud(rng, 6, 2));
  const auto b = DiscreteMeasure::uniform(random_cloud(rng, 6, 2, 3.0));
  SinkhornOptions opt{0.01, 2, 1e-14};  // starved iteration budget
  const ot::TransportPlan tp = ot::sinkhorn(a, b, opt);
  CHECK_FALSE(tp.converged);
  const ot::OtValue v = ot::sinkhorn_divergence(a, b, opt);
  CHECK_FALSE(v.converged);
}

TEST_CASE("measure validation") {
  DiscreteMeasure m;
  m.points = {v1(0.0), v1(1.0)};
  m.weights = Vec(2);
  m.weights << 0.7, 0.7;
  CHECK_THROWS_AS(m.validate(), DegenerateInputError);
  m.weights << 0.5, 0.5;
  CHECK_NOTHROW(m.validate());
}

TEST_SUITE_END();
