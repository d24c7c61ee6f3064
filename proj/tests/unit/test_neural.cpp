#include <random>

#include "doctest.h"
#include "neural.hpp"

using namespace hexgraph;

namespace {

Mat<double> random_mat(int r, int c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Mat<double> m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = d(rng);
  return m;
}

Csr random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (coin(rng)) {
        e.emplace_back(a, b);
        e.emplace_back(b, a);
      }
    }
  }
  return Csr::from_edges(n, e);
}

}  // namespace

TEST_CASE("dense forward") {
  Dense<double> d("d", 2, 2);
  d.w.value = Mat<double>::Identity(2, 2);
  Mat<double> x(1, 2);
  x << 1, 2;
  CHECK(d.forward(x, nullptr) == x);

  Dense<double> s("s", 2, 1);
  s.w.value << 1, 1;
  s.b.value << 0.5;
  CHECK(s.forward(x, nullptr)(0, 0) == 3.5);
  CHECK_THROWS_AS(s.forward(Mat<double>::Zero(1, 3), nullptr), Error);
}

TEST_CASE("sage conv forward") {
  // Node 0 with neighbours 1 and 2.
  Csr g = Csr::from_edges(3, {{0, 1}, {0, 2}, {1, 0}, {2, 0}});
  SageConv<double> s("s", 1, 1);
  s.w_self.value << 1;
  s.w_neigh.value << 1;
  Mat<double> h(3, 1);
  h << 1, 3, 5;
  CHECK(s.forward(g, h, nullptr)(0, 0) == 5.0);

  Csr lone = Csr::from_edges(1, {});
  Mat<double> one(1, 1);
  one << 7;
  CHECK(s.forward(lone, one, nullptr)(0, 0) == 7.0);
  CHECK_THROWS_AS(Csr::from_edges(2, {{0, 5}}), Error);
}

TEST_CASE("readout forward") {
  Mat<double> h(2, 2);
  h << 1, 2, 3, 0;
  Mat<double> r = Readout<double>::forward(h, {0, 2}, nullptr);
  Mat<double> expected(1, 8);
  expected << 2, 1, 3, 2, 1, 0, 4, 2;
  CHECK(r == expected);

  Mat<double> single(1, 2);
  single << 4, -1;
  Mat<double> rs = Readout<double>::forward(single, {0, 1}, nullptr);
  for (int b = 0; b < 4; ++b) {
    CHECK(rs(0, 2 * b) == 4);
    CHECK(rs(0, 2 * b + 1) == -1);
  }
  CHECK_THROWS_AS(Readout<double>::forward(h, {0, 0}, nullptr), Error);
}

TEST_CASE("readout is permutation invariant") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    Mat<float> h = random_mat(9, 4, rng).cast<float>();
    Mat<float> p = h;
    std::vector<int> perm = {3, 1, 4, 0, 8, 2, 6, 5, 7};
    for (int i = 0; i < 9; ++i) p.row(i) = h.row(perm[i]);
    Mat<float> a = Readout<float>::forward(h, {0, 9}, nullptr);
    Mat<float> b = Readout<float>::forward(p, {0, 9}, nullptr);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-6f);
  }
}

TEST_CASE("conv forward") {
  Conv2d<double> c("c", 1, 1, 3);
  c.w.value.setZero();
  c.w.value(0, 4) = 1.0;  // centred delta
  std::mt19937_64 rng(2);
  ImageShape s{1, 3, 3};
  Mat<double> x = random_mat(1, 9, rng);
  CHECK((c.forward(x, s, nullptr) - x).cwiseAbs().maxCoeff() == 0.0);

  c.w.value.setOnes();
  Mat<double> ones = Mat<double>::Ones(1, 9);
  Mat<double> y = c.forward(ones, s, nullptr);
  CHECK(y(0, 4) == 9.0);
  CHECK(y(0, 0) == 4.0);
  CHECK(y(0, 8) == 4.0);
  CHECK(y(0, 1) == 6.0);
  CHECK_THROWS_AS(Conv2d<double>("bad", 1, 1, 5), Error);
}

TEST_CASE("gradient checks") {
  std::mt19937_64 rng(3);

  SUBCASE("dense") {
    Dense<double> d("d", 5, 4);
    d.init(rng);
    d.b.value = random_mat(1, 4, rng);
    Mat<double> x = random_mat(6, 5, rng);
    Mat<double> r = random_mat(6, 4, rng);
    Mat<double> dx;
    auto loss = [&] { return (d.forward(x, nullptr).array() * r.array()).sum(); };
    auto backprop = [&] {
      zero_grads(d.parameters());
      Dense<double>::Cache c;
      d.forward(x, &c);
      dx = d.backward(r, c);
    };
    const double err = grad_check({{&d.w.value, &d.w.grad}, {&d.b.value, &d.b.grad}, {&x, &dx}},
                                  loss, backprop);
    CHECK(err < 1e-4);
  }

  SUBCASE("sage conv") {
    Csr g = random_graph(10, 0.3, rng);
    SageConv<double> s("s", 3, 4);
    s.init(rng);
    s.b.value = random_mat(1, 4, rng);
    Mat<double> h = random_mat(10, 3, rng);
    Mat<double> r = random_mat(10, 4, rng);
    Mat<double> dh;
    auto loss = [&] { return (s.forward(g, h, nullptr).array() * r.array()).sum(); };
    auto backprop = [&] {
      zero_grads(s.parameters());
      SageConv<double>::Cache c;
      s.forward(g, h, &c);
      dh = s.backward(g, r, c);
    };
    const double err = grad_check({{&s.w_self.value, &s.w_self.grad},
                                   {&s.w_neigh.value, &s.w_neigh.grad},
                                   {&s.b.value, &s.b.grad},
                                   {&h, &dh}},
                                  loss, backprop);
    CHECK(err < 1e-4);
  }

  SUBCASE("readout") {
    Mat<double> h = random_mat(7, 3, rng);
    Mat<double> r = random_mat(2, 12, rng);
    std::vector<int> offsets = {0, 3, 7};
    Mat<double> dh;
    auto loss = [&] { return (Readout<double>::forward(h, offsets, nullptr).array() * r.array()).sum(); };
    auto backprop = [&] {
      Readout<double>::Cache c;
      Readout<double>::forward(h, offsets, &c);
      dh = Readout<double>::backward(r, c, 7);
    };
    CHECK(grad_check({{&h, &dh}}, loss, backprop) < 1e-4);
  }

  SUBCASE("conv2d and residual block") {
    ImageShape s{2, 5, 5};
    Conv2d<double> c("c", 4, 3, 3);
    c.init(rng);
    c.b.value = random_mat(3, 1, rng);
    Mat<double> x = random_mat(4, s.pixels(), rng);
    Mat<double> r = random_mat(3, s.pixels(), rng);
    Mat<double> dx;
    auto loss = [&] { return (c.forward(x, s, nullptr).array() * r.array()).sum(); };
    auto backprop = [&] {
      zero_grads(c.parameters());
      Conv2d<double>::Cache cache;
      c.forward(x, s, &cache);
      dx = c.backward(r, s, cache);
    };
    CHECK(grad_check({{&c.w.value, &c.w.grad}, {&c.b.value, &c.b.grad}, {&x, &dx}}, loss,
                     backprop) < 1e-4);

    ResidualBlock<double> block("r", 3);
    block.init(rng);
    Mat<double> y = random_mat(3, s.pixels(), rng);
    Mat<double> dy;
    auto loss2 = [&] { return (block.forward(y, s, nullptr).array() * r.array()).sum(); };
    auto backprop2 = [&] {
      zero_grads(block.parameters());
      ResidualBlock<double>::Cache cache;
      block.forward(y, s, &cache);
      dy = block.backward(r, s, cache);
    };
    std::vector<std::pair<Mat<double>*, const Mat<double>*>> checked = {{&y, &dy}};
    for (auto* p : block.parameters()) checked.emplace_back(&p->value, &p->grad);
    CHECK(grad_check(checked, loss2, backprop2) < 1e-4);

    Conv2d<double> point("p", 3, 2, 1);
    point.init(rng);
    Mat<double> r2 = random_mat(2, s.pixels(), rng);
    Mat<double> dz;
    Mat<double> z = random_mat(3, s.pixels(), rng);
    auto loss3 = [&] { return (point.forward(z, s, nullptr).array() * r2.array()).sum(); };
    auto backprop3 = [&] {
      zero_grads(point.parameters());
      Conv2d<double>::Cache cache;
      point.forward(z, s, &cache);
      dz = point.backward(r2, s, cache);
    };
    CHECK(grad_check({{&point.w.value, &point.w.grad}, {&z, &dz}}, loss3, backprop3) < 1e-4);
  }
}

TEST_CASE("sage conv is permutation equivariant") {
  std::mt19937_64 rng(5);
  SageConv<float> s("s", 6, 8);
  s.init(rng);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 3 + static_cast<int>(rng() % 20);
    std::bernoulli_distribution coin(0.3);
    std::vector<std::pair<int, int>> e;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (coin(rng)) {
          e.emplace_back(a, b);
          e.emplace_back(b, a);
        }
      }
    }
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<int, int>> pe;
    for (auto [a, b] : e) pe.emplace_back(perm[a], perm[b]);
    Mat<float> h = random_mat(n, 6, rng).cast<float>();
    Mat<float> ph(n, 6);
    for (int i = 0; i < n; ++i) ph.row(perm[i]) = h.row(i);
    Mat<float> y = s.forward(Csr::from_edges(n, e), h, nullptr);
    Mat<float> py = s.forward(Csr::from_edges(n, pe), ph, nullptr);
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, static_cast<double>((py.row(perm[i]) - y.row(i)).cwiseAbs().maxCoeff()));
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("adam") {
  Param<float> p("p", 1, 1);
  p.value(0, 0) = 0.5f;
  p.grad(0, 0) = 1.0f;
  Adam<float> adam(AdamConfig{1e-3, 0.9, 0.999, 1e-8, 0.0});
  adam.step({&p});
  CHECK(p.value(0, 0) == doctest::Approx(0.5 - 1e-3).epsilon(1e-6));
  CHECK(p.grad(0, 0) == 0.0f);

  Param<float> q("q", 2, 2);
  q.value.setConstant(0.3f);
  Adam<float> still;
  still.step({&q});
  CHECK(q.value == Mat<float>::Constant(2, 2, 0.3f));

  auto run = [] {
    std::mt19937_64 rng(9);
    Dense<float> d("d", 3, 2);
    d.init(rng);
    Adam<float> opt;
    Mat<float> x = Mat<float>::Ones(4, 3);
    for (int i = 0; i < 2; ++i) {
      Dense<float>::Cache c;
      Mat<float> y = d.forward(x, &c);
      d.backward(y, c);
      opt.step(d.parameters());
    }
    return d.w.value;
  };
  CHECK(run() == run());
}

TEST_CASE("finite check") {
  Mat<float> m = Mat<float>::Zero(2, 2);
  require_finite(m, "m");
  m(0, 0) = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(require_finite(m, "m"), Error);
}
