// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <random>

#include "gradcheck.hpp"
#include "loadfc/error.hpp"
#include "loadfc/init.hpp"
#include "loadfc/kernels.hpp"
#include "loadfc/layers.hpp"
#include "loadfc/loss.hpp"
#include "loadfc/optim.hpp"
#include "loadfc/rng.hpp"

using namespace loadfc;
using loadfc::testing::check_gradients;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Parameter random_param(const char* name, Shape shape, std::mt19937_64& gen, double lo = -1,
                       double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = u(gen);
  return Parameter(name, t);
}

GruParams random_gru(std::size_t in, std::size_t hidden, std::uint64_t seed) {
  CounterRng rng(seed, 1);
  GruParams g("gru", in, hidden, rng, seed);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (Parameter* p : {&g.b_z, &g.b_r, &g.b_h})
    for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] = u(gen);
  return g;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no loadfc::Error thrown";
  return ErrorKind::Io;
}

}  // namespace

// --- kernels ----------------------------------------------------------------

TEST(Kernels, SerialMatchesNaiveAndOmpIsBitwiseSerial) {
  using namespace kernels;
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-1, 1);
  const std::size_t sizes[] = {1, 3, 17, 32, 64, 65, 97, 130};
  for (std::size_t m : sizes)
    for (std::size_t k : {1ul, 9ul, 64ul, 100ul})
      for (std::size_t n : sizes) {
        const GemmDims d{m, k, n};
        std::vector<double> a(m * k), b(k * n), c(m * n), bt(n * k);
        for (double& x : a) x = u(gen);
        for (double& x : b) x = u(gen);
        for (double& x : c) x = u(gen);
        std::vector<double> naive(m * n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            long double s = 0;
            for (std::size_t p = 0; p < k; ++p) s += (long double)a[i * k + p] * b[p * n + j];
            naive[i * n + j] = double(s);
          }
        std::vector<double> s1(m * n), o1(m * n);
        serial::gemm(d, a, b, s1);
        for (std::size_t i = 0; i < m * n; ++i)
          ASSERT_NEAR(s1[i], naive[i], 1e-12 * double(k)) << m << "x" << k << "x" << n;

        for (int threads : {1, 2, 3, 4}) {
          omp_set_num_threads(threads);
          omp::gemm(d, a, b, o1);
          ASSERT_EQ(o1, s1);
          std::vector<double> sa = c, oa = c;
          serial::gemm_acc(d, a, b, sa);
          omp::gemm_acc(d, a, b, oa);
          ASSERT_EQ(oa, sa);
          // dA += dC * B^T with dC = c: [m,n], B: [k,n]
          std::vector<double> bkn(k * n);
          for (double& x : bkn) x = u(gen);
          std::vector<double> sn(m * k, 0.5), on(m * k, 0.5);
          serial::gemm_acc_nt(d, c, bkn, sn);
          omp::gemm_acc_nt(d, c, bkn, on);
          ASSERT_EQ(on, sn);
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t p = 0; p < k; ++p) {
              double ref = 0.5;
              for (std::size_t j = 0; j < n; ++j) ref += c[i * n + j] * bkn[p * n + j];
              ASSERT_NEAR(sn[i * k + p], ref, 1e-12 * double(n));
            }
          // dB += A^T * dC
          std::vector<double> st(k * n, -0.25), ot(k * n, -0.25);
          serial::gemm_acc_tn(d, a, c, st);
          omp::gemm_acc_tn(d, a, c, ot);
          ASSERT_EQ(ot, st);
          for (std::size_t p = 0; p < k; ++p)
            for (std::size_t j = 0; j < n; ++j) {
              double ref = -0.25;
              for (std::size_t i = 0; i < m; ++i) ref += a[i * k + p] * c[i * n + j];
              ASSERT_NEAR(st[p * n + j], ref, 1e-12 * double(m));
            }
        }
        omp_set_num_threads(1);
      }
}

// --- tape -------------------------------------------------------------------

TEST(Tape, NotScalarLossAndForeignTape) {
  Tape t;
  Parameter p("p", Tensor(Shape{1, 2}, {1, 2}));
  const Var v = t.param(p);
  EXPECT_EQ(kind_of([&] { t.backward(v); }), ErrorKind::NotScalarLoss);
  Tape other;
  const Var l = sum(other.param(p));
  EXPECT_EQ(kind_of([&] { t.backward(l); }), ErrorKind::NotScalarLoss);
}

TEST(Tape, TopologicalOrderAndDisconnectedGradIsZero) {
  Parameter a("a", Tensor(Shape{1, 2}, {1, 2}));
  Parameter unused("u", Tensor(Shape{1, 2}, {3, 4}));
  Tape t;
  const Var va = t.param(a);
  const Var vu = t.param(unused);
  const Var y = sum(mul(va, va));
  EXPECT_LT(va.id(), y.id());
  EXPECT_LT(vu.id(), y.id());
  t.backward(y);
  EXPECT_EQ(a.grad.vec(), (std::vector<double>{2, 4}));
  EXPECT_EQ(unused.grad.vec(), (std::vector<double>{0, 0}));
}

TEST(Tape, GradientsOfEveryPrimitive) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 5; ++trial) {
    Parameter a = random_param("a", Shape{3, 4}, gen);
    Parameter b = random_param("b", Shape{3, 4}, gen, 0.5, 1.5);
    Parameter w = random_param("w", Shape{4, 2}, gen);
    Parameter bias = random_param("bias", Shape{2}, gen);
    std::vector<Parameter*> ps = {&a, &b, &w, &bias};
    const auto r = check_gradients(ps, [&](Tape& t) {
      const Var va = t.param(a), vb = t.param(b), vw = t.param(w), vbias = t.param(bias);
      Var x = add(mul(va, vb), div(va, vb));
      x = sub(x, scale(square(va), 0.3));
      x = add_scalar(abs(x), 0.1);
      x = maximum(x, tanh(vb));
      x = max_scalar(x, 0.4);
      Var y = add(matmul(x, vw), vbias);
      y = concat_cols(sigmoid(y), slice_cols(x, 1, 2));
      std::vector<Var> rows = {slice_rows(y, 2, 1), slice_rows(y, 0, 1)};
      return add(mean(stack_rows(rows)), sum(tanh(y)));
    });
    EXPECT_LT(r.max_rel_error, 1e-6) << "trial " << trial;
  }
}

// --- layers -----------------------------------------------------------------

TEST(Dense, Examples) {
  CounterRng rng(0, 3);
  DenseParams d("fc", 2, 1, Activation::Identity, Initializer::Zero, rng, 0);
  Tape t;
  const Var x = t.constant(Tensor(Shape{1, 2}, {1, 1}));
  EXPECT_EQ(dense_forward(d, x).value().vec(), (std::vector<double>{0}));
  d.weight.value = Tensor(Shape{2, 1}, {1, 2});
  d.bias.value = Tensor(Shape{1}, {3});
  Tape t2;
  EXPECT_EQ(dense_forward(d, t2.constant(Tensor(Shape{1, 2}, {1, 1}))).item(), 6.0);
  DenseParams s("fc", 3, 2, Activation::Sigmoid, Initializer::Zero, rng, 0);
  Tape t3;
  const Var out = dense_forward(s, t3.constant(Tensor(Shape{2, 3}, {1, -2, 3, 4, 5, 6})));
  for (double v : out.value().vec()) EXPECT_EQ(v, 0.5);
}

TEST(Dense, SymbolicGradientOfQuadraticCost) {
  // dC/dw_jk = a_k (a_j - y_j) for identity activation and C = 1/2 (y - a)^2
  std::mt19937_64 gen(4);
  CounterRng rng(1, 3);
  DenseParams d("fc", 3, 1, Activation::Identity, Initializer::XavierUniform, rng, 1);
  const std::vector<double> a_prev = {0.3, -1.2, 0.7};
  const double y = 0.9;
  Tape t;
  const Var out = dense_forward(d, t.constant(Tensor(Shape{1, 3}, a_prev)));
  const double a = out.item();
  t.backward(loss_quadratic(out, t.constant(Tensor::scalar(y))));
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(d.weight.grad[k], a_prev[k] * (a - y), 1e-15);
  EXPECT_NEAR(d.bias.grad[0], a - y, 1e-15);
}

TEST(Gru, ZeroFixedPoint) {
  CounterRng rng(0, 1);
  GruParams g("gru", 2, 3, rng, 0);
  for (Parameter* p : g.parameters()) p->value.fill(0.0);
  Tape t;
  const Var h = gru_step(g, t.constant(Tensor(Shape{1, 2}, {0.4, -0.7})),
                         t.constant(Tensor(Shape{1, 3})));
  for (double v : h.value().vec()) EXPECT_EQ(v, 0.0);
}

TEST(Gru, ScalarHandOracle) {
  CounterRng rng(0, 1);
  GruParams g("gru", 1, 1, rng, 0);
  for (Parameter* p : {&g.w_z, &g.w_r, &g.w_h, &g.u_z, &g.u_r, &g.u_h}) p->value.fill(1.0);
  for (Parameter* p : {&g.b_z, &g.b_r, &g.b_h}) p->value.fill(0.0);
  const double h = 0.5, x = 0.0;
  const double z = sig(x + h), r = sig(x + h);
  const double cand = std::tanh(x + r * h);
  const double expect = (1 - z) * h + z * cand;
  for (auto step : {gru_step, gru_step_composed}) {
    Tape t;
    const Var out = step(g, t.constant(Tensor::scalar(x)), t.constant(Tensor::scalar(h)));
    EXPECT_NEAR(out.item(), expect, 1e-15);
  }
}

TEST(Gru, PropertyContraction) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-0.999, 0.999), big(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    GruParams g = random_gru(3, 5, trial);
    for (Parameter* p : g.parameters())
      for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] = big(gen);
    Tensor x(Shape{2, 3}), h(Shape{2, 5});
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = big(gen);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = u(gen);
    Tape t;
    for (double v : gru_step(g, t.constant(x), t.constant(h)).value().vec()) {
      ASSERT_LE(std::abs(v), 1.0);
    }
  }
}

TEST(Gru, FusedCellMatchesComposed) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t in = 2 + seed % 4, hidden = 1 + seed % 8;
    GruParams g = random_gru(in, hidden, seed);
    std::mt19937_64 gen(seed + 100);
    std::uniform_real_distribution<double> u(-1, 1);
    Tensor xs(Shape{5, in});
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = u(gen);
    Tensor target(Shape{5, hidden});
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = u(gen);

    auto run = [&](auto step) {
      for (Parameter* p : g.parameters()) p->zero_grad();
      Tape t;
      const Var x = t.constant(xs);
      Var h = t.constant(Tensor(Shape{1, hidden}));
      std::vector<Var> states;
      for (std::size_t r = 0; r < 5; ++r) {
        h = step(g, slice_rows(x, r, 1), h);
        states.push_back(h);
      }
      const Var loss = loss_mae(stack_rows(states), t.constant(target));
      t.backward(loss);
      std::vector<double> out = {loss.item()};
      for (const Var& s : states) out.insert(out.end(), s.value().vec().begin(), s.value().vec().end());
      std::vector<std::vector<double>> grads;
      for (Parameter* p : g.parameters()) grads.push_back(p->grad.vec());
      return std::make_pair(out, grads);
    };
    const auto fused = run(gru_step);
    const auto composed = run(gru_step_composed);
    ASSERT_EQ(fused.first.size(), composed.first.size());
    for (std::size_t i = 0; i < fused.first.size(); ++i)
      EXPECT_NEAR(fused.first[i], composed.first[i], 1e-14);
    for (std::size_t k = 0; k < fused.second.size(); ++k)
      for (std::size_t i = 0; i < fused.second[k].size(); ++i)
        EXPECT_NEAR(fused.second[k][i], composed.second[k][i],
                    1e-13 * std::max(1.0, std::abs(composed.second[k][i])));
  }
}

// --- losses -----------------------------------------------------------------

namespace {
double loss_value(Var (*f)(Var, Var), std::vector<double> F, std::vector<double> A) {
  Tape t;
  const std::size_t n = F.size();
  return f(t.constant(Tensor(Shape{n}, F)), t.constant(Tensor(Shape{n}, A))).item();
}
double ssmape_value(std::vector<double> F, std::vector<double> A, double eps) {
  Tape t;
  const std::size_t n = F.size();
  return loss_ssmape(t.constant(Tensor(Shape{n}, F)), t.constant(Tensor(Shape{n}, A)), eps)
      .item();
}
}  // namespace

TEST(Loss, Examples) {
  EXPECT_EQ(loss_value(loss_mae, {1.5, 2}, {1.5, 2}), 0.0);
  EXPECT_EQ(loss_value(loss_mae, {2}, {1}), 1.0);
  EXPECT_EQ(loss_value(loss_mae, {0, 4}, {1, 1}), 2.0);
  EXPECT_EQ(loss_value(loss_smape, {3, -2}, {3, -2}), 0.0);
  EXPECT_NEAR(loss_value(loss_smape, {2}, {1}), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(loss_value(loss_smape, {1}, {-1}), 2.0);
  EXPECT_EQ(ssmape_value({0}, {0}, 0.1), 0.0);
  EXPECT_NEAR(ssmape_value({0.1}, {0}, 0.1), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(ssmape_value({2}, {1}, 0.1), 2.0 / 3.1, 1e-12);
  EXPECT_EQ(kind_of([] { loss_value(loss_smape, {0, 1}, {0, 2}); }),
            ErrorKind::DivisionByZeroTerm);
  EXPECT_EQ(kind_of([] { loss_value(loss_mae, {0, 1}, {0}); }), ErrorKind::ShapeMismatch);
}

TEST(Loss, L2Penalty) {
  auto pen = [](std::vector<double> r, double beta) {
    Tape t;
    return l2_activation_penalty(t.constant(Tensor(Shape{r.size()}, r)), beta).item();
  };
  EXPECT_EQ(pen({0, 0, 0}, 1.0), 0.0);
  EXPECT_EQ(pen({1, 2}, 1.0), 2.5);
  EXPECT_EQ(pen({4, -7}, 0.0), 0.0);
  // shrinking every output strictly lowers the penalty
  EXPECT_LT(pen({0.5, 1.0}, 1e-4), pen({1, 2}, 1e-4));
}

TEST(Loss, PropertySmapeRangeAndSsmapeBound) {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 10000; ++i) {
    const double f = u(gen), a = u(gen);
    const double term = loss_value(loss_smape, {f}, {a});
    ASSERT_GE(term, 0.0);
    ASSERT_LE(term, 2.0);
    ASSERT_LE(ssmape_value({f}, {a}, 0.1), term);
  }
}

TEST(Loss, GradientsMatchFiniteDifferences) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    Parameter f = random_param("f", Shape{6}, gen, -2, 2);
    Tensor a(Shape{6});
    std::uniform_real_distribution<double> u(-2, 2);
    for (std::size_t i = 0; i < 6; ++i) a[i] = u(gen);
    std::vector<Parameter*> ps = {&f};
    for (int which = 0; which < 4; ++which) {
      const auto r = check_gradients(ps, [&](Tape& t) {
        const Var vf = t.param(f), va = t.constant(a);
        switch (which) {
          case 0: return loss_mae(vf, va);
          case 1: return loss_ssmape(vf, va, 0.1);
          case 2: return loss_quadratic(vf, va);
          default: return loss_smape(vf, va);
        }
      });
      EXPECT_LT(r.max_rel_error, 1e-6) << "loss " << which;
    }
  }
}

TEST(Loss, SsmapeSubgradientAtOrigin) {
  Parameter f("f", Tensor(Shape{1}, {0.0}));
  Tape t;
  t.backward(loss_ssmape(t.param(f), t.constant(Tensor(Shape{1}, {0.0})), 0.1));
  EXPECT_EQ(f.grad[0], 0.0);
}

TEST(ZeroInit, FirstGradientIsLive) {
  // zero FC, upstream [1, 2], target 3, identity: dC/dw = a_k (0 - y) = [-3, -6]
  CounterRng rng(0, 3);
  DenseParams d("fc", 2, 1, Activation::Identity, Initializer::Zero, rng, 0);
  Tape t;
  const Var out = dense_forward(d, t.constant(Tensor(Shape{1, 2}, {1, 2})));
  t.backward(loss_quadratic(out, t.constant(Tensor::scalar(3))));
  EXPECT_EQ(d.weight.grad.vec(), (std::vector<double>{-3, -6}));
  EXPECT_EQ(d.bias.grad.vec(), (std::vector<double>{-3}));
  sgd_step(d.parameters(), 0.1);
  EXPECT_DOUBLE_EQ(d.weight.value[0], 0.3);
  EXPECT_DOUBLE_EQ(d.weight.value[1], 0.6);
}

TEST(ZeroInit, ViabilityCondition) {
  EXPECT_EQ(activation_derivative_at_zero(Activation::Identity), 1.0);
  EXPECT_EQ(activation_derivative_at_zero(Activation::Tanh), 1.0);
  EXPECT_EQ(activation_derivative_at_zero(Activation::Sigmoid), 0.25);
}

// --- initializers -----------------------------------------------------------

TEST(Init, Limits) {
  EXPECT_DOUBLE_EQ(xavier_normal_stddev(Shape{1, 1}), 1.0);
  EXPECT_NEAR(xavier_normal_stddev(Shape{4, 2}), std::sqrt(1.0 / 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(xavier_uniform_limit(Shape{4, 2}), 1.0);
  EXPECT_DOUBLE_EQ(he_normal_stddev(Shape{2, 5}), 1.0);
  EXPECT_DOUBLE_EQ(he_normal_stddev(Shape{8, 5}), 0.5);
  EXPECT_DOUBLE_EQ(he_uniform_limit(Shape{6, 3}), 1.0);
  CounterRng rng(0);
  EXPECT_EQ(kind_of([&] { init_xavier_uniform(Shape{5}, rng); }), ErrorKind::BadShape);
  EXPECT_EQ(kind_of([&] { init_he_normal(Shape{5}, rng); }), ErrorKind::BadShape);
}

TEST(Init, ZeroAndIdentity) {
  EXPECT_EQ(init_zero(Shape{3, 2}).vec(), std::vector<double>(6, 0.0));
  EXPECT_EQ(init_identity(Shape{3, 3}).vec(), (std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 1}));
  EXPECT_EQ(init_identity(Shape{2, 4}).vec(), (std::vector<double>{1, 0, 0, 0, 0, 1, 0, 0}));
  EXPECT_EQ(init_identity(Shape{1, 1}).vec(), (std::vector<double>{1}));
  CounterRng rng(0, 3);
  DenseParams d("fc", 4, 1, Activation::Identity, Initializer::Identity, rng, 0);
  EXPECT_EQ(d.bias.value.vec(), (std::vector<double>{0}));
}

TEST(Init, SeedDeterminism) {
  CounterRng a(5, 3), b(5, 3), c(6, 3);
  const Tensor ta = init_xavier_uniform(Shape{8, 8}, a);
  EXPECT_EQ(ta, init_xavier_uniform(Shape{8, 8}, b));
  EXPECT_NE(ta, init_xavier_uniform(Shape{8, 8}, c));
}

// --- optimizer --------------------------------------------------------------

TEST(Sgd, Examples) {
  Parameter p("p", Tensor(Shape{1}, {1.0}));
  std::vector<Parameter*> ps = {&p};
  EXPECT_EQ(kind_of([&] { sgd_step(ps, 0.1); }), ErrorKind::StaleGradient);
  auto step_with_grad = [&](double g) {
    Tape t;
    t.backward(scale(sum(t.param(p)), g));
    sgd_step(ps, 0.1);
  };
  step_with_grad(0.0);
  EXPECT_EQ(p.value[0], 1.0);
  step_with_grad(2.0);
  EXPECT_DOUBLE_EQ(p.value[0], 0.8);
  step_with_grad(2.0);
  step_with_grad(2.0);
  EXPECT_NEAR(p.value[0], 0.8 - 2 * 0.1 * 2.0, 1e-15);
  EXPECT_EQ(kind_of([&] { sgd_step(ps, 0.1); }), ErrorKind::StaleGradient);
}

TEST(Asgd, RunningMean) {
  Parameter p("p", Tensor(Shape{1}, {1.0}));
  std::vector<Parameter*> ps = {&p};
  EXPECT_FALSE(asgd_ready(ps));
  EXPECT_EQ(kind_of([&] { AsgdSwap s(ps); }), ErrorKind::NoAverageAvailable);
  asgd_accumulate(p);
  EXPECT_EQ((*p.asgd_avg)[0], 1.0);
  {
    AsgdSwap s(ps);
    EXPECT_EQ(p.value[0], 1.0);
  }
  for (double v : {2.0, 3.0, 4.0}) {
    p.value[0] = v;
    asgd_accumulate(p);
  }
  EXPECT_EQ((*p.asgd_avg)[0], 2.5);
  EXPECT_EQ(p.asgd_count, 4u);
  {
    AsgdSwap s(ps);
    EXPECT_EQ(p.value[0], 2.5);
  }
  EXPECT_EQ(p.value[0], 4.0);
}

TEST(Asgd, TwoSnapshots) {
  Parameter p("p", Tensor(Shape{1}, {1.0}));
  asgd_accumulate(p);
  p.value[0] = 3.0;
  asgd_accumulate(p);
  EXPECT_EQ((*p.asgd_avg)[0], 2.0);
}
