#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "cdmm/glm.hpp"
#include "cdmm/partition.hpp"

using namespace cdmm;

namespace {

const PrimeField& big_field() {
  static const PrimeField f = find_field_for_orders({1}, u64{1} << 61);
  return f;
}

Matrix direct_at_b(const PrimeField& f, const Matrix& a, const Matrix& b) { return multiply(f, transpose(a), b); }

GlmConfig quiet_config(GlmLoss loss, std::size_t iterations) {
  GlmConfig c;
  c.loss = loss;
  c.iterations = iterations;
  c.coding = TwoPhaseParams{2, 2, 1, 1, 0};
  return c;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST(Codec, RoundTripAndRange) {
  const FixedPointCodec c(big_field(), 16);
  for (double v : {0.0, 1.0, -1.0, 0.5, -3.25, 1234.0078125}) EXPECT_DOUBLE_EQ(c.decode(c.encode(v)), v);
  EXPECT_NEAR(c.decode(c.encode(0.1)), 0.1, 1.0 / 65536);
  const PrimeField& f = big_field();
  EXPECT_DOUBLE_EQ(c.decode(f.mul(c.encode(1.5), c.encode(-2.0)), 2), -3.0);
  EXPECT_THROW(c.encode(std::ldexp(1.0, 50)), Error);
  EXPECT_THROW(c.encode(NAN), Error);
}

TEST(Session, TrivialSetupKeepsA) {
  const PrimeField& f = big_field();
  Rng rng(1);
  const Matrix a = random_matrix(f, 3, 4, rng);
  const CodedSession s(f, a, TwoPhaseParams{1, 1, 1, 0, 1}, 5);
  ASSERT_EQ(s.workers(), 1u);
  EXPECT_EQ(s.shares()[0], a);
  EXPECT_EQ(s.keys(0).s1, row_times(f, s.keys(0).r1, a));
}

TEST(Session, KeysMatchCachedShares) {
  const PrimeField& f = big_field();
  Rng rng(2);
  const Matrix a = random_matrix(f, 8, 6, rng);
  const CodedSession s(f, a, TwoPhaseParams{2, 3, 1, 2, 0}, 6);
  for (std::size_t w = 0; w < s.workers(); ++w) {
    const CheckKeys& k = s.keys(w);
    EXPECT_EQ(k.r1.size(), 4u);
    EXPECT_EQ(k.r2.size(), 2u);
    EXPECT_EQ(k.s1, row_times(f, k.r1, s.shares()[w]));
    EXPECT_EQ(k.s2, row_times(f, k.r2, transpose(s.shares()[w])));
  }
  EXPECT_EQ(s.a_encodings(), s.workers());
  EXPECT_EQ(s.storage_per_worker(), 8u * 6 / (2 * 3));
}

TEST(Session, BothPhasesMatchDirectProducts) {
  const PrimeField& f = big_field();
  Rng rng(3);
  for (std::size_t k1 : {1, 2, 3})
    for (std::size_t m : {1, 2, 3})
      for (std::size_t x : {0, 1, 2})
        for (std::size_t s_blocks : {1, 2}) {
          const Matrix a = random_matrix(f, 6, 7, rng);  // 7 columns force padding when m > 1
          const CodedSession s(f, a, TwoPhaseParams{k1, m, s_blocks, x, 0}, 9);
          const Matrix u = random_matrix(f, 7, 2, rng), v = random_matrix(f, 6, 2, rng);
          PhaseOptions opt;
          opt.seed = 11;
          ASSERT_EQ(s.phase1(u, opt), multiply(f, a, u));
          ASSERT_EQ(s.phase2(v, opt), direct_at_b(f, a, v));
          EXPECT_EQ(s.phase1(Matrix(7, 1, 0), opt), Matrix(6, 1, 0));
          EXPECT_EQ(s.phase2(Matrix(6, 1, 0), opt), Matrix(7, 1, 0));
        }
}

TEST(Session, ByzantineFlaggedAndExcluded) {
  const PrimeField& f = big_field();
  Rng rng(4);
  const Matrix a = random_matrix(f, 8, 8, rng);
  TwoPhaseParams p{2, 2, 1, 1, 0};
  p.N = phase_threshold(p) + 2;
  const CodedSession s(f, a, p, 3);
  const Matrix u = random_matrix(f, 8, 1, rng), v = random_matrix(f, 8, 1, rng);
  PhaseOptions opt;
  opt.byzantine = {0, 4};
  opt.seed = 5;
  PhaseReport r;
  EXPECT_EQ(s.phase1(u, opt, &r), multiply(f, a, u));
  EXPECT_EQ(r.flagged, (std::vector<std::size_t>{0, 4}));
  EXPECT_EQ(r.responses_used, phase_threshold(p));
  EXPECT_EQ(s.phase2(v, opt, &r), direct_at_b(f, a, v));
  EXPECT_EQ(r.flagged.size(), 2u);
  opt.stragglers = {1};
  try {
    s.phase1(u, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::undecodable);
  }
  opt.verify = false;
  opt.stragglers.clear();
  EXPECT_NE(s.phase1(u, opt), multiply(f, a, u));
}

TEST(Session, FreivaldsSoundAndComplete) {
  const PrimeField f = find_field_for_orders({1}, u64{1} << 20);
  Rng rng(5);
  const Matrix a = random_matrix(f, 4, 4, rng);
  TwoPhaseParams p{2, 2, 1, 1, 0};
  const std::size_t need = phase_threshold(p);
  p.N = need + 1;
  const CodedSession s(f, a, p, 8);
  std::size_t false_accepts = 0, honest_rejects = 0;
  const std::size_t trials = 10000;
  for (std::size_t t = 0; t < trials; ++t) {
    const Matrix u = random_matrix(f, 4, 1, rng);
    PhaseOptions opt;
    opt.byzantine = {t % need};  // a worker the master actually waits for
    opt.seed = t;
    PhaseReport r;
    try {
      if (s.phase1(u, opt, &r) != multiply(f, a, u)) ++false_accepts;
    } catch (const Error&) {
      ++false_accepts;
    }
    false_accepts += r.flagged.empty();
    honest_rejects += r.flagged.size() > 1;
  }
  EXPECT_LE(static_cast<double>(false_accepts) / trials, 2.0 / static_cast<double>(f.modulus()));
  EXPECT_EQ(false_accepts, 0u);
  EXPECT_EQ(honest_rejects, 0u);
}

TEST(TransposeReuse, HoldsAcrossTheGrid) {
  const PrimeField f(257);
  Rng rng(6);
  for (std::size_t k1 = 1; k1 <= 3; ++k1)
    for (std::size_t m = 1; m <= 3; ++m)
      for (std::size_t x = 0; x <= 2; ++x) {
        const TwoPhaseParams p{k1, m, 1, x, 0};
        const Matrix a = random_matrix(f, 2 * k1, 2 * m, rng);
        std::vector<Matrix> noise;
        for (std::size_t t = 0; t < x; ++t) noise.push_back(random_matrix(f, 2, 2, rng));
        EXPECT_TRUE(transpose_reuse_check(f, phase1_layout(p), phase2_layout(p), a, noise, {1, 2, 3, 4, 5}))
            << k1 << m << x;
      }
}

TEST(TransposeReuse, MismatchedParametersFail) {
  const PrimeField f(257);
  Rng rng(7);
  const Matrix a = random_matrix(f, 4, 4, rng);
  const std::vector<Matrix> noise{random_matrix(f, 2, 2, rng)};
  const TwoPhaseParams p{2, 2, 1, 1, 0};
  EXPECT_TRUE(transpose_reuse_check(f, phase1_layout(p), phase2_layout(p), a, noise, {1, 2, 3, 4, 5}));
  const TwoPhaseParams q{2, 2, 1, 2, 0};
  EXPECT_FALSE(transpose_reuse_check(f, phase1_layout(p), phase2_layout(q), a, noise, {1, 2, 3}));
  const TwoPhaseParams r{4, 1, 1, 1, 0};
  EXPECT_FALSE(transpose_reuse_check(f, phase1_layout(p), phase2_layout(r), a, noise, {1, 2, 3}));
  // Same shapes, different exponents: the first orientation for A^T.
  EXPECT_FALSE(transpose_reuse_check(f, phase1_layout(p), phase1_layout(p), a, noise, {2, 3}));
}

TEST(Gradient, LinearAtZeroIsScaledXTy) {
  const Dataset d = make_synthetic_dataset(12, 4, GlmLoss::linear, 3);
  const GlmConfig cfg = quiet_config(GlmLoss::linear, 1);
  const PrimeField& f = big_field();
  const FixedPointCodec codec(f, 16);
  Matrix a(d.rows, d.cols);
  for (std::size_t i = 0; i < d.x.size(); ++i) a.data()[i] = codec.encode(d.x[i]);
  const CodedSession s(f, a, cfg.coding, 1);
  const GlmModel model{&d, &s, &codec, GlmLoss::linear};
  const auto g = glm_gradient(model, std::vector<double>(d.cols, 0.0), PhaseOptions{});
  for (std::size_t j = 0; j < d.cols; ++j) {
    double expect = 0;
    for (std::size_t i = 0; i < d.rows; ++i) expect -= d.at(i, j) * d.y[i];
    EXPECT_NEAR(g[j], expect / d.rows, 1e-12);
  }
}

TEST(Gradient, LogisticMatchesFloatingPoint) {
  const Dataset d = make_synthetic_dataset(20, 5, GlmLoss::logistic, 4);
  const PrimeField& f = big_field();
  const FixedPointCodec codec(f, 16);
  Matrix a(d.rows, d.cols);
  for (std::size_t i = 0; i < d.x.size(); ++i) a.data()[i] = codec.encode(d.x[i]);
  const CodedSession s(f, a, TwoPhaseParams{2, 2, 1, 1, 0}, 1);
  const GlmModel model{&d, &s, &codec, GlmLoss::logistic};
  const std::vector<double> w{0.3, -0.7, 1.1, 0.05, -0.2};
  const auto g = glm_gradient(model, w, PhaseOptions{});
  const double tol = std::ldexp(1.0, -16 + 2) * d.cols;
  for (std::size_t j = 0; j < d.cols; ++j) {
    double expect = 0;
    for (std::size_t i = 0; i < d.rows; ++i) {
      double u = 0;
      for (std::size_t k = 0; k < d.cols; ++k) u += d.at(i, k) * w[k];
      expect += d.at(i, j) * loss_derivative(GlmLoss::logistic, u, d.y[i]);
    }
    EXPECT_NEAR(g[j], expect / d.rows, tol);
  }
}

TEST(Gradient, OverflowDetected) {
  const Dataset d = make_synthetic_dataset(4, 2, GlmLoss::linear, 5);
  const PrimeField& f = big_field();
  const FixedPointCodec codec(f, 16);
  Matrix a(d.rows, d.cols);
  for (std::size_t i = 0; i < d.x.size(); ++i) a.data()[i] = codec.encode(d.x[i]);
  const CodedSession s(f, a, TwoPhaseParams{1, 1, 1, 0, 0}, 1);
  const GlmModel model{&d, &s, &codec, GlmLoss::linear};
  try {
    glm_gradient(model, {std::ldexp(1.0, 44), std::ldexp(1.0, 44)}, PhaseOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::codec_overflow);
  }
}

TEST(Training, ZeroIterationsLeavesWeights) {
  const Dataset d = make_synthetic_dataset(6, 3, GlmLoss::linear, 6);
  const GlmTrace t = glm_train(d, quiet_config(GlmLoss::linear, 0));
  ASSERT_EQ(t.weights.size(), 1u);
  EXPECT_EQ(t.weights[0], std::vector<double>(3, 0.0));
  EXPECT_TRUE(t.loss.empty());
}

TEST(Training, LinearResidualShrinksEveryStep) {
  Dataset d = make_synthetic_dataset(10, 3, GlmLoss::linear, 7);
  // Consistent system: labels from an exact planted model on the codec grid.
  const std::vector<double> planted{0.5, -1.25, 0.75};
  for (std::size_t i = 0; i < d.rows; ++i) {
    d.y[i] = 0;
    for (std::size_t j = 0; j < d.cols; ++j) d.y[i] += d.at(i, j) * planted[j];
    d.y[i] = std::nearbyint(d.y[i] * 65536) / 65536;
  }
  const GlmTrace t = glm_train(d, quiet_config(GlmLoss::linear, 200));
  auto residual = [&](const std::vector<double>& w) {
    double r = 0;
    for (std::size_t i = 0; i < d.rows; ++i) {
      double u = -d.y[i];
      for (std::size_t j = 0; j < d.cols; ++j) u += d.at(i, j) * w[j];
      r += u * u;
    }
    return std::sqrt(r);
  };
  for (std::size_t k = 1; k < t.weights.size(); ++k) {
    const double prev = residual(t.weights[k - 1]), cur = residual(t.weights[k]);
    if (prev < 1e-3) break;  // converged to the quantization floor
    EXPECT_LT(cur, prev) << k;
  }
  EXPECT_LT(residual(t.weights.back()), residual(t.weights.front()));
  const GlmTrace ref = glm_train_reference(d, quiet_config(GlmLoss::linear, 200));
  EXPECT_LT(max_diff(t.weights.back(), ref.weights.back()), std::ldexp(1.0, -14));
}

TEST(Training, LogisticAccuracyEqualsReference) {
  const Dataset d = make_synthetic_dataset(20, 5, GlmLoss::logistic, 8);
  GlmConfig cfg = quiet_config(GlmLoss::logistic, 60);
  cfg.byzantine = {1};
  cfg.stragglers = {3};
  const GlmTrace coded = glm_train(d, cfg), ref = glm_train_reference(d, cfg);
  EXPECT_EQ(coded.flagged, 2 * cfg.iterations);  // one per phase
  auto accuracy = [&](const std::vector<double>& w) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < d.rows; ++i) {
      double u = 0;
      for (std::size_t j = 0; j < d.cols; ++j) u += d.at(i, j) * w[j];
      hits += (u > 0) == (d.y[i] > 0.5);
    }
    return hits;
  };
  EXPECT_EQ(accuracy(coded.weights.back()), accuracy(ref.weights.back()));
  for (std::size_t k = 0; k < coded.weights.size(); ++k)
    EXPECT_LT(max_diff(coded.weights[k], ref.weights[k]), std::ldexp(1.0, -14));
  for (std::size_t k = 1; k < coded.loss.size(); ++k) EXPECT_LE(coded.loss[k], coded.loss[k - 1] + 1e-9);
}

TEST(Complexity, WorkerMultiplyCostFallsWithRowBlocks) {
  const PrimeField& f = big_field();
  Rng rng(9);
  const Matrix a = random_matrix(f, 64, 16, rng);
  const Matrix u = random_matrix(f, 16, 1, rng);
  std::vector<u64> macs;
  for (std::size_t k1 : {1, 2, 4}) {
    const CodedSession s(f, a, TwoPhaseParams{k1, 2, 1, 1, 0}, 1);
    PhaseReport r;
    s.phase1(u, PhaseOptions{}, &r);
    macs.push_back(r.max_worker_macs);
    EXPECT_EQ(s.storage_per_worker(), 64u * 16 / (k1 * 2));
  }
  for (std::size_t i = 1; i < macs.size(); ++i) {
    const double ratio = static_cast<double>(macs[i]) / static_cast<double>(macs[i - 1]);
    EXPECT_GT(ratio, 0.4);
    EXPECT_LT(ratio, 0.6);
  }
}

TEST(Config, ParsesDemoKeys) {
  const GlmConfig c = glm_config_from(Config::parse("loss=linear\niterations=7\nK1=2\nbyzantine=\nstragglers=0,2\n"));
  EXPECT_EQ(c.loss, GlmLoss::linear);
  EXPECT_EQ(c.iterations, 7u);
  EXPECT_EQ(c.coding.K1, 2u);
  EXPECT_TRUE(c.byzantine.empty());
  EXPECT_EQ(c.stragglers, (std::set<std::size_t>{0, 2}));
  EXPECT_THROW(glm_config_from(Config::parse("lr=1\n")), Error);
  EXPECT_THROW(glm_config_from(Config::parse("loss=hinge\n")), Error);
}

TEST(Dataset, CsvRoundTrip) {
  const Dataset d = make_synthetic_dataset(5, 3, GlmLoss::logistic, 10);
  const auto path = std::filesystem::temp_directory_path() / "cdmm_dataset_roundtrip.csv";
  write_dataset_csv(path.string(), d);
  const Dataset back = read_dataset_csv(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(back.rows, d.rows);
  EXPECT_EQ(back.x, d.x);
  EXPECT_EQ(back.y, d.y);
  EXPECT_THROW(read_dataset_csv("/nonexistent/cdmm.csv"), Error);
}
