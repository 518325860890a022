#include <doctest.h>

#include <cmath>

#include "trajlab/core/errors.hpp"
#include "trajlab/core/gradcheck.hpp"
#include "trajlab/core/mlp.hpp"
#include "trajlab/core/numeric.hpp"
#include "trajlab/core/rng.hpp"
#include "trajlab/core/similarity.hpp"

using namespace trajlab;

TEST_SUITE_BEGIN("core");

TEST_CASE("mlp forward: zero params give zero output") {
  const MlpParams p = MlpParams::zeros(3, 5, 2);
  const Vec y = mlp_forward(p, Vec::Constant(3, 1.7));
  CHECK(y.norm() == 0.0);
}

TEST_CASE("mlp forward: identity weights at the origin") {
  MlpParams p = MlpParams::zeros(2, 2, 2);
  p.w1 = Mat::Identity(2, 2);
  p.w2 = Mat::Identity(2, 2);
  const Vec y = mlp_forward(p, Vec::Zero(2));
  CHECK(y.norm() == 0.0);  // tanh(0) = 0
}

TEST_CASE("mlp forward matches a straight-line recomputation") {
  Rng rng(42);
  const MlpParams p = MlpParams::glorot(4, 6, 3, rng);
  Vec x(4);
  x << 0.3, -1.2, 0.05, 2.0;

  Vec h(6);
  for (int i = 0; i < 6; ++i) {
    double acc = p.b1[i];
    for (int j = 0; j < 4; ++j) acc += p.w1(i, j) * x[j];
    h[i] = std::tanh(acc);
  }
  Vec expect(3);
  for (int i = 0; i < 3; ++i) {
    double acc = p.b2[i];
    for (int j = 0; j < 6; ++j) acc += p.w2(i, j) * h[j];
    expect[i] = acc;
  }
  CHECK((mlp_forward(p, x) - expect).norm() < 1e-14);
}

TEST_CASE("mlp forward is pure") {
  Rng rng(7);
  const MlpParams p = MlpParams::glorot(3, 4, 3, rng);
  Vec x(3);
  x << 0.1, 0.2, -0.4;
  const Vec a = mlp_forward(p, x);
  const Vec b = mlp_forward(p, x);
  CHECK(a == b);
}

TEST_CASE("mlp forward rejects shape mismatch") {
  const MlpParams p = MlpParams::zeros(3, 5, 2);
  CHECK_THROWS_AS(mlp_forward(p, Vec::Zero(4)), DimensionError);
}

TEST_CASE("mlp backward: zero dy gives zero gradients") {
  Rng rng(1);
  const MlpParams p = MlpParams::glorot(3, 4, 2, rng);
  const MlpBackward bw = mlp_backward(p, Vec::Constant(3, 0.5), Vec::Zero(2));
  CHECK(mlp_flatten(bw.dparams).norm() == 0.0);
  CHECK(bw.dx.norm() == 0.0);
}

TEST_CASE("mlp backward: scalar net matches the hand expansion") {
  // y = w2 * tanh(w1 * x), so dy/dw2 = tanh(w1 x), dy/dw1 = w2 x (1 - tanh^2).
  MlpParams p = MlpParams::zeros(1, 1, 1);
  const double w1 = 0.8;
  const double w2 = -1.3;
  const double x = 0.6;
  p.w1(0, 0) = w1;
  p.w2(0, 0) = w2;
  const MlpBackward bw =
      mlp_backward(p, Vec::Constant(1, x), Vec::Constant(1, 1.0));
  const double th = std::tanh(w1 * x);
  CHECK(bw.dparams.w2(0, 0) == doctest::Approx(th).epsilon(1e-12));
  CHECK(bw.dparams.w1(0, 0) ==
        doctest::Approx(w2 * x * (1.0 - th * th)).epsilon(1e-12));
  CHECK(bw.dx[0] == doctest::Approx(w2 * w1 * (1.0 - th * th)).epsilon(1e-12));
}

TEST_CASE("mlp backward agrees with central finite differences") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    MlpParams p = MlpParams::glorot(4, 4, 4, rng);
    Vec x(4);
    for (int i = 0; i < 4; ++i) x[i] = rng.gaussian();
    Vec dy(4);
    for (int i = 0; i < 4; ++i) dy[i] = rng.gaussian();

    const MlpBackward bw = mlp_backward(p, x, dy);
    const Vec analytic = mlp_flatten(bw.dparams);
    const Vec numeric = finite_diff_grad(
        [&](const Vec& theta) {
          MlpParams q = p;
          mlp_unflatten(q, theta);
          return dy.dot(mlp_forward(q, x));
        },
        mlp_flatten(p), 1e-5);
    CHECK(max_rel_error(analytic, numeric) < 1e-4);

    const Vec numeric_dx = finite_diff_grad(
        [&](const Vec& xv) { return dy.dot(mlp_forward(p, xv)); }, x, 1e-5);
    CHECK(max_rel_error(bw.dx, numeric_dx) < 1e-4);
  }
}

TEST_CASE("cosine similarity hand values") {
  Vec a(2);
  Vec b(2);
  a << 1, 0;
  b << 1, 0;
  CHECK(cosine_sim(a, a, 1.0) == doctest::Approx(1.0));
  b << 0, 1;
  CHECK(cosine_sim(a, b, 1.0) == doctest::Approx(0.0));
  b << 1, 1;
  CHECK(cosine_sim(a, b, 0.5) ==
        doctest::Approx(std::sqrt(0.5) / 0.5).epsilon(1e-9));  // ~1.41421
  CHECK_THROWS_AS(cosine_sim(a, Vec::Zero(2), 1.0), DegenerateInputError);
}

TEST_CASE("cosine similarity gradient matches finite differences") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    Vec a(5);
    Vec b(5);
    for (int i = 0; i < 5; ++i) {
      a[i] = rng.gaussian();
      b[i] = rng.gaussian();
    }
    const CosineSimGrad g = cosine_sim_grad(a, b, 0.3);
    const Vec na = finite_diff_grad(
        [&](const Vec& av) { return cosine_sim(av, b, 0.3); }, a, 1e-6);
    const Vec nb = finite_diff_grad(
        [&](const Vec& bv) { return cosine_sim(a, bv, 0.3); }, b, 1e-6);
    CHECK(max_rel_error(g.da, na) < 1e-4);
    CHECK(max_rel_error(g.db, nb) < 1e-4);
  }
}

TEST_CASE("finite_diff_grad on known functions") {
  Vec x(2);
  x << 1, 2;
  const Vec g = finite_diff_grad([](const Vec& v) { return v.squaredNorm(); }, x);
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-6));

  const Vec gc = finite_diff_grad([](const Vec&) { return 3.25; }, x);
  CHECK(gc.norm() == 0.0);

  Vec z = Vec::Zero(1);
  const Vec gs =
      finite_diff_grad([](const Vec& v) { return std::sin(v[0]); }, z);
  CHECK(gs[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("rng reproduces streams and splits independently") {
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng parent(9);
  Rng c1 = parent.split(1);
  Rng c2 = parent.split(2);
  CHECK(c1.next_u64() != c2.next_u64());
  // Splitting is a pure function of (state, tag).
  Rng c1_again = parent.split(1);
  c1 = parent.split(1);
  CHECK(c1.next_u64() == c1_again.next_u64());
}

TEST_CASE("rng uniform_int stays in range") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) CHECK(rng.uniform_int(7) < 7);
}

TEST_CASE("pairwise sum matches simple sum") {
  std::vector<double> xs;
  Rng rng(11);
  double direct = 0.0;
  for (int i = 0; i < 1000; ++i) {
    xs.push_back(rng.gaussian());
    direct += xs.back();
  }
  CHECK(pairwise_sum(xs) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("l2_normalize guards the zero vector") {
  CHECK_THROWS_AS(l2_normalize(Vec::Zero(3)), DegenerateInputError);
  Vec v(2);
  v << 3, 4;
  CHECK((l2_normalize(v) - Vec((Vec(2) << 0.6, 0.8).finished())).norm() < 1e-15);
}

TEST_SUITE_END();
