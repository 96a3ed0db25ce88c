#include <cmath>
#include <random>

#include "coda/transforms.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace coda;
using coda::testing::make_panel;
using coda::testing::random_composition;

TEST_CASE("zero strategy: replace bumps only zero count cells") {
  Eigen::MatrixXd counts(2, 2);
  counts << 2, 0, 1, 1;
  auto panel = make_panel({2000, 2001}, 1, 2, counts);
  auto [m, report] = apply_zero_strategy(panel, ZeroStrategy::replace(0.5));
  CHECK(report.replaced_cells == 1);
  CHECK(m.values(0, 0) == doctest::Approx(2.0 / 2.5));
  CHECK(m.values(0, 1) == doctest::Approx(0.5 / 2.5));
  CHECK(m.values(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("zero strategy: omit drops the zero column and reports it") {
  Eigen::MatrixXd counts(2, 3);
  counts << 2, 0, 2,
            1, 3, 1;
  auto panel = make_panel({2000, 2001}, 1, 3, counts);
  auto [m, report] = apply_zero_strategy(panel, ZeroStrategy::omit());
  CHECK(m.n_parts() == 2);
  REQUIRE(report.dropped_parts.size() == 1);
  CHECK(report.dropped_parts[0] == 1);
  CHECK(report.dropped_names[0] == "age0|cause1");
  // rows re-closed over the surviving parts
  CHECK(m.values(0, 0) == doctest::Approx(0.5));
  CHECK(m.values(1, 1) == doctest::Approx(0.5));
  CHECK(std::abs(m.values.row(0).sum() - 1.0) < 1e-12);
}

TEST_CASE("zero strategy: strictly positive panel unchanged under any strategy") {
  Eigen::MatrixXd counts(2, 4);
  counts << 4, 3, 2, 1, 1, 2, 3, 4;
  auto panel = make_panel({2000, 2001}, 2, 2, counts);
  auto base = build_composition(panel);
  for (auto s : {ZeroStrategy::none(), ZeroStrategy::omit(), ZeroStrategy::replace(0.25)}) {
    auto [m, report] = apply_zero_strategy(panel, s);
    CHECK((m.values - base.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(report.dropped_parts.empty());
    CHECK(report.replaced_cells == 0);
  }
}

TEST_CASE("zero strategy: all parts dropped is an error") {
  Eigen::MatrixXd counts(2, 2);
  counts << 0, 2, 1, 0;
  auto panel = make_panel({2000, 2001}, 1, 2, counts);
  CHECK_THROWS_AS(apply_zero_strategy(panel, ZeroStrategy::omit()), Error);
}

TEST_CASE("helmert p=2 and p=3 explicit rows") {
  const auto& h2 = helmert(2);
  CHECK(h2(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(h2(0, 1) == doctest::Approx(-1.0 / std::sqrt(2.0)));

  const auto& h3 = helmert(3);
  CHECK(h3(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(h3(0, 1) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(h3(0, 2) == 0.0);
  CHECK(h3(1, 0) == doctest::Approx(1.0 / std::sqrt(6.0)));
  CHECK(h3(1, 1) == doctest::Approx(1.0 / std::sqrt(6.0)));
  CHECK(h3(1, 2) == doctest::Approx(-2.0 / std::sqrt(6.0)));
}

TEST_CASE("helmert orthonormality and zero row sums for p up to 120") {
  for (int p : {2, 3, 7, 24, 120}) {
    const auto& h = helmert(p);
    Eigen::MatrixXd hht = h * h.transpose();
    CHECK((hht - Eigen::MatrixXd::Identity(p - 1, p - 1)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(h.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    // H^T H = I - J/P
    Eigen::MatrixXd hth = h.transpose() * h;
    Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(p, p).array() - 1.0 / p;
    CHECK((hth - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(helmert(1), Error);
}

TEST_CASE("clr of uniform row is zero; hand fixture") {
  Eigen::VectorXd u = Eigen::VectorXd::Constant(5, 0.2);
  CHECK(clr(u).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::VectorXd x(3);
  x << 0.5, 0.25, 0.25;
  Eigen::VectorXd w = clr(x);
  const double ln2 = std::log(2.0);
  CHECK(w(0) == doctest::Approx(2.0 * ln2 / 3.0));
  CHECK(w(1) == doctest::Approx(-ln2 / 3.0));
  CHECK(w(2) == doctest::Approx(-ln2 / 3.0));
  CHECK(std::abs(w.sum()) < 1e-10);
}

TEST_CASE("clr rejects zeros") {
  Eigen::VectorXd x(3);
  x << 0.5, 0.0, 0.5;
  CHECK_THROWS_AS(clr(x), Error);
}

TEST_CASE("clr_inverse of zero vector is uniform; exp fixture") {
  CHECK((clr_inverse(Eigen::VectorXd::Zero(4)).array() - 0.25).abs().maxCoeff() < 1e-15);
  Eigen::VectorXd w(2);
  w << 1.0, -1.0;
  auto x = clr_inverse(w);
  const double e2 = std::exp(2.0);
  CHECK(x(0) == doctest::Approx(e2 / (e2 + 1.0)));
  CHECK(x(1) == doctest::Approx(1.0 / (e2 + 1.0)));
}

TEST_CASE("clr permutation equivariance") {
  Eigen::VectorXd x(4);
  x << 0.4, 0.3, 0.2, 0.1;
  Eigen::VectorXd w = clr(x);
  std::vector<int> perm = {2, 0, 3, 1};
  Eigen::VectorXd xp(4), expected(4);
  for (int i = 0; i < 4; ++i) {
    xp(i) = x(perm[i]);
    expected(i) = w(perm[i]);
  }
  CHECK((clr(xp) - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("ilr of uniform is zero; P=3 fixture against explicit Helmert rows") {
  CHECK(ilr(Eigen::VectorXd::Constant(3, 1.0 / 3.0)).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::VectorXd x(3);
  x << 0.5, 0.3, 0.2;
  Eigen::VectorXd w = clr(x);
  Eigen::VectorXd z = ilr(x);
  CHECK(z(0) == doctest::Approx((w(0) - w(1)) / std::sqrt(2.0)));
  CHECK(z(1) == doctest::Approx((w(0) + w(1) - 2.0 * w(2)) / std::sqrt(6.0)));
}

TEST_CASE("roundtrips for clr, ilr, alpha on strictly positive rows") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd x = random_composition(rng, 8);
    CHECK((clr_inverse(clr(x)) - x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ilr_inverse(ilr(x)) - x).cwiseAbs().maxCoeff() < 1e-12);
    for (double a : {0.1, 0.5, 1.0})
      CHECK((alpha_inverse(alpha_forward(x, a), a) - x).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("alpha roundtrip preserves zeros") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd x = random_composition(rng, 10, 0.3);
    for (double a : {0.2, 0.7, 1.0}) {
      Eigen::VectorXd back = alpha_inverse(alpha_forward(x, a), a);
      CHECK((back - x).cwiseAbs().maxCoeff() < 1e-10);
      for (int i = 0; i < x.size(); ++i)
        if (x(i) == 0.0) CHECK(back(i) == 0.0);
    }
  }
}

TEST_CASE("alpha_forward of uniform row is zero") {
  for (double a : {0.1, 0.5, 1.0})
    CHECK(alpha_forward(Eigen::VectorXd::Constant(6, 1.0 / 6.0), a).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("alpha pre-image of a zero part sits exactly at -1/alpha") {
  Eigen::VectorXd x(4);
  x << 0.5, 0.0, 0.3, 0.2;
  for (double a : {0.25, 0.5, 1.0}) {
    const int p = 4;
    Eigen::ArrayXd powered = x.array().pow(a);
    Eigen::VectorXd w = ((p * powered / powered.sum() - 1.0) / a).matrix();
    CHECK(w(1) == -1.0 / a);
    // and the full pre-image respects the alpha-space bounds with zero sum
    CHECK(std::abs(w.sum()) < 1e-10);
    CHECK(w.minCoeff() >= -1.0 / a - 1e-12);
    CHECK(w.maxCoeff() <= (p - 1) / a + 1e-12);
    // back-mapped from z it is recovered identically
    Eigen::VectorXd z = alpha_forward(x, a);
    CHECK((helmert(p).transpose() * z - w).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("alpha-space membership for random rows with zeros") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const int p = 5 + rep % 8;
    Eigen::VectorXd x = random_composition(rng, p, 0.25);
    for (double a : {0.1, 0.6, 1.0}) {
      Eigen::VectorXd w = helmert(p).transpose() * alpha_forward(x, a);
      CHECK(std::abs(w.sum()) < 1e-10);
      CHECK(w.minCoeff() >= -1.0 / a - 1e-10);
      CHECK(w.maxCoeff() <= (p - 1) / a + 1e-10);
    }
  }
}

TEST_CASE("alpha to zero limit approaches ilr monotonically") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x = random_composition(rng, 6);
    Eigen::VectorXd reference = ilr(x);
    double prev = std::numeric_limits<double>::infinity();
    for (double a : {0.1, 0.01, 0.001, 1e-4}) {
      const double dist = (alpha_forward(x, a) - reference).cwiseAbs().maxCoeff();
      CHECK(dist < prev);
      prev = dist;
    }
    CHECK((alpha_forward(x, 1e-6) - reference).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("alpha_inverse of zero vector is uniform") {
  for (double a : {0.1, 0.5, 1.0})
    CHECK((alpha_inverse(Eigen::VectorXd::Zero(4), a).array() - 0.2).abs().maxCoeff() < 1e-12);
}

TEST_CASE("alpha_inverse clamps negative components to the boundary and reports them") {
  // pick z so that one v component lands below zero
  const int p = 3;
  Eigen::VectorXd w(p);
  w << 1.2, 0.0, -1.2;  // v = 0.5*w + 1 at alpha=0.5 -> (1.6, 1.0, 0.4): no clamp
  double a = 0.5;
  {
    ClampReport rep;
    Eigen::VectorXd z = helmert(p) * w;
    alpha_inverse(z, a, &rep);
    CHECK(rep.empty());
  }
  w << 2.4, 0.0, -2.4;  // v = (2.2, 1.0, -0.2): part 2 clamped
  {
    ClampReport rep;
    Eigen::VectorXd z = helmert(p) * w;
    Eigen::VectorXd x = alpha_inverse(z, a, &rep);
    REQUIRE(rep.clamped_parts.size() == 1);
    CHECK(rep.clamped_parts[0] == 2);
    CHECK(x(2) == 0.0);
    CHECK(std::abs(x.sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("alpha_inverse rejects all-clamped input") {
  // v = alpha*H^T z + 1 with every part <= 0 requires each w_i <= -1/alpha,
  // impossible through H of a real z unless constructed directly; use a w
  // with zero sum pushed through H and alpha=1: w = (-1,-1,2)*... instead
  // force it with a z whose back-map has all negatives except none positive
  // is unreachable; check AlphaOutOfRange paths here instead.
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(alpha_inverse(z, 0.0), Error);
  CHECK_THROWS_AS(alpha_inverse(z, 1.5), Error);
  Eigen::VectorXd x(3);
  x << 0.2, 0.3, 0.5;
  CHECK_THROWS_AS(alpha_forward(x, 0.0), Error);
  CHECK_THROWS_AS(alpha_forward(x, -0.5), Error);
}

TEST_CASE("rda is alpha at 1, bit for bit") {
  std::mt19937_64 rng(53);
  Eigen::VectorXd x = random_composition(rng, 7, 0.2);
  CHECK(rda_forward(x) == alpha_forward(x, 1.0));
  Eigen::VectorXd z = rda_forward(x);
  CHECK(rda_inverse(z) == alpha_inverse(z, 1.0));
  CHECK(rda_forward(Eigen::VectorXd::Constant(4, 0.25)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((rda_inverse(rda_forward(x)) - x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("transform tags parse and print") {
  CHECK(TransformTag::parse("clr").label() == "clr");
  CHECK(TransformTag::parse("ilr").label() == "ilr");
  CHECK(TransformTag::parse("rda").label() == "rda");
  CHECK(TransformTag::parse("alpha:0.5").alpha == 0.5);
  CHECK(TransformTag::parse("alpha:0.5").label() == "alpha:0.5");
  CHECK_THROWS_AS(TransformTag::parse("logit"), Error);
  CHECK_THROWS_AS(TransformTag::alpha_t(0.0), Error);
  CHECK_THROWS_AS(TransformTag::alpha_t(1.1), Error);
}

TEST_CASE("transform_matrix applies the tagged transform row-wise") {
  std::mt19937_64 rng(61);
  CompositionMatrix m;
  m.values.resize(4, 6);
  for (int t = 0; t < 4; ++t) m.values.row(t) = random_composition(rng, 6).transpose();
  m.parts.resize(6);
  for (int p = 0; p < 6; ++p) m.parts[p] = {p / 3, p % 3};

  auto tc = transform_matrix(m, TransformTag::clr());
  CHECK(tc.values.cols() == 6);
  CHECK(tc.values.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);

  auto ta = transform_matrix(m, TransformTag::alpha_t(0.4));
  CHECK(ta.values.cols() == 5);
  for (int t = 0; t < 4; ++t) {
    Eigen::VectorXd row = m.values.row(t);
    CHECK((ta.values.row(t).transpose() - alpha_forward(row, 0.4)).cwiseAbs().maxCoeff() <
          1e-14);
  }
}
