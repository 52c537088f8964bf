#include <atomic>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "dcs/error.h"
#include "dcs/experiments.h"

namespace dcs {
namespace {

using nlohmann::json;

TEST(Metrics, PsnrIsLogOfInverseMse) {
  for (double mse : {1.0, 0.1, 1e-4, 3.7e-2}) {
    EXPECT_NEAR(Psnr(mse), 10.0 * std::log10(1.0 / mse), 1e-12);
  }
  EXPECT_EQ(Psnr(0.0), std::numeric_limits<double>::infinity());
}

TEST(Metrics, MeanOverEveryEntry) {
  Vector a(2), b(2), c(2), d(2);
  a << 1.0, 0.0;
  b << 0.0, 2.0;
  c << 1.0, 1.0;
  d << 0.0, 2.0;
  EXPECT_DOUBLE_EQ(MeanSquaredError({a, b}, {c, d}), 0.25);
  EXPECT_DOUBLE_EQ(SummedError({a, b}, {c, d}), 1.0);
  EXPECT_THROW(MeanSquaredError({a}, {c, d}), DimensionError);
}

TEST(Metrics, ExactRecoveryNeedsMatchingSupport) {
  Vector t(3), close(3), spurious(3);
  t << 1.0, 0.0, -0.5;
  close << 1.0 + 1e-7, 0.0, -0.5;
  spurious << 1.0, 1e-4, -0.5;
  EXPECT_TRUE(ComputeMetrics({t}, {close}).exact_recovery);
  EXPECT_FALSE(ComputeMetrics({t}, {spurious}).exact_recovery);
  EXPECT_EQ(ComputeMetrics({t}, {t}).mse, 0.0);
}

TEST(Perturbations, ShapesBoundsAndReproducibility) {
  PerturbationModel model;
  model.noise_amplitude = 0.3;
  model.disturbance_stddev = 1.0;
  const Perturbations a = DrawPerturbations(model, 4, 3, 5, 8);
  ASSERT_EQ(a.disturbances.size(), 5u);
  ASSERT_EQ(a.noises.size(), 6u);
  for (const Vector& e : a.noises) {
    EXPECT_EQ(e.size(), 3);
    EXPECT_LE(e.lpNorm<Eigen::Infinity>(), 0.3);
  }
  for (const Vector& d : a.disturbances) EXPECT_EQ(d.size(), 4);
  const Perturbations b = DrawPerturbations(model, 4, 3, 5, 8);
  EXPECT_EQ(a.noises[2], b.noises[2]);
  EXPECT_EQ(a.disturbances[4], b.disturbances[4]);
}

TEST(Radius, NoiseOnlyIsUniformRms) {
  const SystemModel sys = SystemModel::Create(Matrix::Zero(4, 4), Matrix::Ones(4, 5),
                                              Matrix::Identity(3, 4));
  PerturbationModel model;
  model.noise_amplitude = 0.6;
  EXPECT_NEAR(ExpectedRadius(sys, 5, model), 0.6 * std::sqrt(3.0 / 3.0), 1e-12);
}

TEST(Radius, DisturbanceAccumulatesThroughRecurrence) {
  const double a = 0.5, sd = 0.2;
  const int n = 3, horizon = 4;
  const SystemModel sys = SystemModel::Create(a * Matrix::Identity(n, n), Matrix::Ones(n, 4),
                                              Matrix::Identity(n, n));
  PerturbationModel model;
  model.disturbance_stddev = sd;
  const double geometric = (1.0 - std::pow(a, 2 * horizon)) / (1.0 - a * a);
  EXPECT_NEAR(ExpectedRadius(sys, horizon, model), sd * std::sqrt(n * geometric), 1e-12);
}

TEST(ParallelFor, VisitsEveryIndexAndRethrows) {
  for (int threads : {1, 3}) {
    std::vector<int> hits(17, 0);
    ParallelFor(17, threads, [&](int i) { ++hits[i]; });
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(ParallelFor(5, threads,
                             [](int i) {
                               if (i == 3) throw ContractError("boom");
                             }),
                 ContractError);
  }
}

TEST(Summary, GroupsByLevelInOrder) {
  const std::vector<json> records = {{{"level", 2.0}, {"x", 1.0}},
                                     {{"level", 1.0}, {"x", 4.0}},
                                     {{"level", 2.0}, {"x", 3.0}}};
  const LevelSummary s = SummarizeByLevel(records, "level", "x");
  EXPECT_EQ(s.levels, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(s.means, (std::vector<double>{4.0, 2.0}));
}

TEST(Synthetic, GlyphAndMovieStayInUnitRange) {
  const Matrix glyph = SyntheticGlyph(68, 16);
  EXPECT_GE(glyph.minCoeff(), 0.0);
  EXPECT_LE(glyph.maxCoeff(), 1.0);
  EXPECT_GT((glyph.array() > 0.0).count(), 0);
  const std::vector<Matrix> movie = SyntheticMovie(10, 5);
  ASSERT_EQ(movie.size(), 5u);
  for (const Matrix& f : movie) {
    EXPECT_EQ(f.rows(), 10);
    EXPECT_GE(f.minCoeff(), 0.0);
    EXPECT_LE(f.maxCoeff(), 1.0);
  }
  EXPECT_NE(movie[0], movie[4]);
}

Matrix SparseImage(int rows, int cols) {
  Matrix img = Matrix::Zero(rows, cols);
  for (int k = 0; k < cols; ++k) {
    img((3 * k) % rows, k) = 0.8;
    img((7 * k + 5) % rows, k) = 0.4;
  }
  return img;
}

TEST(Example1, InvertibleOutputRecoversImageBothWays) {
  GaussianOptions opts;
  opts.a_scale = 1.0 / std::sqrt(10.0);
  const SystemModel sys = GaussianSystem(10, 20, 10, 3, opts).sys;
  const Matrix img = SparseImage(20, 5);
  const ExperimentResult one = Example1Digit(img, sys, RecoveryStrategy::kOneStep);
  const ExperimentResult seq = Example1Digit(img, sys, RecoveryStrategy::kSequential);
  EXPECT_LT(one.aggregates["max_abs_error"].get<double>(), 1e-5);
  EXPECT_LT(seq.aggregates["max_abs_error"].get<double>(), 1e-5);
  EXPECT_LT((one.images.at("recovered") - seq.images.at("recovered")).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_THROW(Example1Digit(SparseImage(19, 5), sys, RecoveryStrategy::kOneStep), DimensionError);
}

TEST(Example2, SweepIsReproducibleAndRecordsSeeds) {
  Example2SweepConfig config;
  config.n = 6;
  config.m = 12;
  config.p = 6;
  config.horizon = 3;
  config.s = 1;
  config.trials = 2;
  config.levels = {0.2, 0.6};
  const ExperimentResult a = Example2Sweep(config);
  const ExperimentResult b = Example2Sweep(config);
  ASSERT_EQ(a.records.size(), 4u);
  EXPECT_EQ(ToJson(a).dump(), ToJson(b).dump());
  for (const json& r : a.records) EXPECT_TRUE(r.contains("seed"));
  config.trials = 0;
  EXPECT_THROW(Example2Sweep(config), ContractError);
}

TEST(Example2, MovieReportsDesignAndBothRuns) {
  Example2MovieConfig config;
  config.side = 4;
  config.n = 8;
  config.p = 8;
  config.frames = 5;
  const ExperimentResult r = Example2Movie(config);
  EXPECT_EQ(r.records.size(), 5u);
  EXPECT_TRUE(r.aggregates["static"].contains("psnr"));
  EXPECT_TRUE(r.aggregates["designed"].contains("psnr"));
  EXPECT_EQ(r.aggregates["design"]["scale"], r.aggregates["design"]["designed_scale"]);
  config.fixed_scale = 0.5;
  EXPECT_EQ(Example2Movie(config).aggregates["design"]["scale"].get<double>(), 0.5);
  config.frames = 1;
  EXPECT_THROW(Example2Movie(config), ContractError);
}

TEST(Example3, RequiresTwentyTrials) {
  Example3Config config;
  config.trials = 5;
  EXPECT_THROW(Example3Neuronal(config), ContractError);
  EXPECT_THROW(ParseNeuronalSweep("bogus"), FormatError);
  EXPECT_EQ(ParseNeuronalSweep(ToString(NeuronalSweep::kSparsity)), NeuronalSweep::kSparsity);
}

}  // namespace
}  // namespace dcs
