#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "cdmm/partition.hpp"
#include "cdmm/simulator.hpp"

using namespace cdmm;

namespace {

SchemeParams make(SchemeKind kind, std::size_t k1, std::size_t k2, std::size_t m, std::size_t x = 0,
                  std::size_t n = 0) {
  SchemeParams p;
  p.kind = kind;
  p.K1 = k1;
  p.K2 = k2;
  p.m = m;
  p.X = x;
  p.N = n;
  return p;
}

SchemeParams lrc_example() {
  SchemeParams p = make(SchemeKind::LRC, 1, 1, 6, 0, 15);
  p.r = 3;
  p.delta = 3;
  return p;
}

struct Job {
  PrimeField field;
  Matrix a, b, direct;
};

Job job(const SchemeParams& p, std::size_t rows, std::size_t inner, std::size_t cols, u64 seed) {
  const std::size_t n = p.N ? p.N : worker_count(p);
  const PrimeField f = select_field(p, n);
  Rng rng(seed);
  Matrix a = random_matrix(f, rows, inner, rng), b = random_matrix(f, inner, cols, rng);
  Matrix c = multiply(f, a, b);
  return {f, std::move(a), std::move(b), std::move(c)};
}

}  // namespace

TEST(RunJob, EntangledGroupsDecodeAfterEightArrivals) {
  const SchemeParams p = make(SchemeKind::EP, 2, 2, 2, 0, 10);
  const Job j = job(p, 4, 4, 4, 1);
  SimConfig sim;
  sim.arrival_order = {0, 5, 1, 6, 2, 7, 3, 8, 4, 9};
  const SimReport r = run_job(p, j.a, j.b, sim);
  ASSERT_TRUE(r.success());
  EXPECT_EQ(r.path, DecodePath::grouped);
  EXPECT_EQ(r.responses_used, 8u);
  EXPECT_EQ(r.decoded, j.direct);
}

TEST(RunJob, EntangledFallsBackToInterpolation) {
  const SchemeParams p = make(SchemeKind::EP, 2, 2, 2, 0, 10);
  const Job j = job(p, 4, 4, 4, 2);
  SimConfig sim;
  sim.arrival_order = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};  // pairs complete only from worker 5 on
  const SimReport r = run_job(p, j.a, j.b, sim);
  ASSERT_TRUE(r.success());
  EXPECT_EQ(r.responses_used, 9u);
  EXPECT_EQ(r.decoded, j.direct);
}

TEST(RunJob, LocalGroupStragglersCostTheWorstThreshold) {
  const SchemeParams p = lrc_example();
  const LrcLayout g = layout_lrc(p).second;
  const Job j = job(p, 6, 6, 6, 3);
  SimConfig sim;
  sim.stragglers = {g.groups[0][0], g.groups[0][1]};
  for (std::size_t k = 1; k < g.groups.size(); ++k)
    sim.arrival_order.insert(sim.arrival_order.end(), g.groups[k].begin(), g.groups[k].end());
  sim.arrival_order.insert(sim.arrival_order.end(), g.groups[0].begin(), g.groups[0].end());
  const SimReport r = run_job(p, j.a, j.b, sim);
  ASSERT_TRUE(r.success());
  EXPECT_EQ(r.responses_used, 13u);
  EXPECT_EQ(r.path, DecodePath::lrc);
  EXPECT_EQ(r.decoded, j.direct);
}

TEST(RunJob, LocalRepairNeedsOnlyNine) {
  const SchemeParams p = lrc_example();
  const LrcLayout g = layout_lrc(p).second;
  const Job j = job(p, 6, 6, 6, 4);
  SimConfig sim;
  for (const auto& group : g.groups) sim.arrival_order.insert(sim.arrival_order.end(), group.begin() + 2, group.end());
  for (const auto& group : g.groups) sim.arrival_order.insert(sim.arrival_order.end(), group.begin(), group.begin() + 2);
  const SimReport r = run_job(p, j.a, j.b, sim);
  ASSERT_TRUE(r.success());
  EXPECT_EQ(r.responses_used, 9u);
  EXPECT_EQ(r.decoded, j.direct);
}

TEST(RunJob, DftCannotToleratePassiveStragglers) {
  const SchemeParams p = make(SchemeKind::DFT, 1, 1, 4, 0, 4);
  const Job j = job(p, 4, 4, 4, 5);
  SimConfig sim;
  sim.stragglers = {2};
  const SimReport r = run_job(p, j.a, j.b, sim);
  EXPECT_EQ(r.status, ErrorCode::undecodable);
  sim.stragglers.clear();
  const SimReport ok = run_job(p, j.a, j.b, sim);
  ASSERT_TRUE(ok.success());
  EXPECT_EQ(ok.path, DecodePath::dft);
  EXPECT_EQ(ok.decoded, j.direct);
}

TEST(RunJob, SecureModuloPathUsesSixteenRoots) {
  const SchemeParams p = make(SchemeKind::SEP, 2, 2, 2, 2, 17);
  const Job j = job(p, 4, 4, 4, 6);
  SimConfig sim;
  sim.stragglers = {16};
  const SimReport r = run_job(p, j.a, j.b, sim);
  ASSERT_TRUE(r.success());
  EXPECT_EQ(r.path, DecodePath::modulo);
  EXPECT_EQ(r.responses_used, 16u);
  EXPECT_EQ(r.decoded, j.direct);
}

TEST(RunJob, UnevenShapesArePadded) {
  const SchemeParams p = make(SchemeKind::SEP, 2, 3, 2, 1);
  const Job j = job(p, 5, 3, 7, 7);
  SimConfig sim;
  sim.shuffle_arrivals = true;
  sim.seed = 4;
  const SimReport r = run_job(p, j.a, j.b, sim);
  ASSERT_TRUE(r.success());
  EXPECT_EQ(r.decoded, j.direct);
}

TEST(RunJob, SameSeedSameReport) {
  const SchemeParams p = make(SchemeKind::TSEP, 2, 2, 2, 1);
  const Job j = job(p, 4, 4, 4, 8);
  SimConfig sim;
  sim.shuffle_arrivals = true;
  sim.byzantine = {1};
  sim.verify = true;
  sim.seed = 77;
  const SimReport a = run_job(p, j.a, j.b, sim), b = run_job(p, j.a, j.b, sim);
  EXPECT_EQ(sim_report_csv(p, a, false), sim_report_csv(p, b, false));
  EXPECT_EQ(a.decoded, b.decoded);
  EXPECT_EQ(a.decoded, j.direct);
}

TEST(RunJob, VerificationFiltersByzantineResponses) {
  const SchemeParams p = make(SchemeKind::SEP, 2, 2, 2, 2, 18);
  const Job j = job(p, 4, 4, 4, 9);
  SimConfig sim;
  sim.byzantine = {0};
  sim.verify = true;
  const SimReport checked = run_job(p, j.a, j.b, sim);
  ASSERT_TRUE(checked.success());
  EXPECT_EQ(checked.decoded, j.direct);
  EXPECT_EQ(checked.byzantine_flagged, (std::vector<std::size_t>{0}));
  EXPECT_EQ(checked.responses_used, 17u);  // the lost root forces full interpolation

  sim.verify = false;
  const SimReport unchecked = run_job(p, j.a, j.b, sim);
  ASSERT_TRUE(unchecked.success());
  EXPECT_NE(unchecked.decoded, j.direct);
  EXPECT_TRUE(unchecked.byzantine_flagged.empty());
}

TEST(RunJob, RejectsInconsistentConfigurations) {
  const SchemeParams p = make(SchemeKind::EP, 2, 2, 2, 0, 10);
  const Job j = job(p, 4, 4, 4, 10);
  SimConfig sim;
  sim.stragglers = {1};
  sim.byzantine = {1};
  EXPECT_THROW(run_job(p, j.a, j.b, sim), Error);
  sim.byzantine = {10};
  sim.stragglers.clear();
  EXPECT_THROW(run_job(p, j.a, j.b, sim), Error);
  sim.byzantine.clear();
  Matrix big = j.a;
  big(0, 0) = j.field.modulus();
  try {
    run_job(p, big, j.b, sim);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::field_mismatch);
  }
}

TEST(Freivalds, RejectsEveryCorruptionOverManyTrials) {
  const PrimeField f = find_field_for_orders({1}, u64{1} << 20);
  Rng rng(11);
  std::size_t accepted = 0;
  for (int t = 0; t < 2000; ++t) {
    const Matrix a = random_matrix(f, 3, 3, rng), b = random_matrix(f, 3, 3, rng);
    Matrix c = multiply(f, a, b);
    ASSERT_TRUE(freivalds_check(f, a, b, c, rng));
    c = add(f, c, random_nonzero_matrix(f, 3, 3, rng));
    accepted += freivalds_check(f, a, b, c, rng);
  }
  EXPECT_EQ(accepted, 0u);
}

TEST(Points, RootsThenSmallestUnusedElements) {
  const SchemeParams p = make(SchemeKind::SEP, 2, 2, 2, 2, 19);
  const PrimeField f = select_field(p, 19);
  EXPECT_EQ((f.modulus() - 1) % 16, 0u);
  const PointPlan plan = plan_points(f, p, 19);
  EXPECT_EQ(plan.root_count, 16u);
  std::set<u64> roots(plan.points.begin(), plan.points.begin() + 16);
  for (u64 x : roots) EXPECT_EQ(f.pow(x, 16), 1u);
  u64 expect = 1;
  for (std::size_t w = 16; w < 19; ++w) {
    while (roots.count(expect)) ++expect;
    EXPECT_EQ(plan.points[w], expect);
    ++expect;
  }
  const PointPlan plain = plan_points(f, make(SchemeKind::POLY, 2, 2, 1, 0, 5), 5);
  EXPECT_EQ(plain.points, (std::vector<u64>{1, 2, 3, 4, 5}));
}

TEST(Measure, FrozenThresholdsForWorkedExamples) {
  const ThresholdMeasurement ep = measure_thresholds(make(SchemeKind::EP, 2, 2, 2, 0, 10));
  EXPECT_EQ(ep.best, 8u);
  EXPECT_EQ(ep.worst, 9u);
  EXPECT_TRUE(ep.exact);
  EXPECT_TRUE(ep.confirmed);
  const ThresholdMeasurement l = measure_thresholds(lrc_example());
  EXPECT_EQ(l.best, 9u);
  EXPECT_EQ(l.worst, 13u);
  const ThresholdMeasurement sep = measure_thresholds(make(SchemeKind::SEP, 2, 2, 2, 2, 17));
  EXPECT_EQ(sep.mode, MeasureMode::orbit);
  EXPECT_EQ(sep.best, 16u);
  EXPECT_EQ(sep.worst, 17u);
}

TEST(Measure, OrbitMatchesExhaustive) {
  for (const SchemeParams& p : {make(SchemeKind::EP, 2, 2, 2, 0, 10), make(SchemeKind::EP, 1, 2, 3, 0, 12),
                                make(SchemeKind::SEP, 1, 2, 2, 1, 11), make(SchemeKind::PS, 2, 1, 2, 1, 12),
                                make(SchemeKind::TSEP, 2, 1, 2, 1, 10), lrc_example()}) {
    const ThresholdMeasurement e = measure_thresholds(p, MeasureMode::exhaustive);
    const ThresholdMeasurement o = measure_thresholds(p, MeasureMode::orbit);
    EXPECT_EQ(e.best, o.best) << params_to_config(p);
    EXPECT_EQ(e.worst, o.worst) << params_to_config(p);
    EXPECT_EQ(e.best, theoretical_thresholds(p).best) << params_to_config(p);
    EXPECT_EQ(e.worst, theoretical_thresholds(p).worst) << params_to_config(p);
  }
}

TEST(Measure, SamplingReportsBounds) {
  const ThresholdMeasurement s = measure_thresholds(make(SchemeKind::EP, 2, 2, 2, 0, 10), MeasureMode::sampling, 3, 50);
  EXPECT_FALSE(s.exact);
  EXPECT_LE(s.best, 10u);
  EXPECT_GE(s.best, 8u);
}

TEST(Grid, PresetSizesAndEmptyGrid) {
  EXPECT_EQ(expand_grid(Config::parse("preset=table1\n")).size(),
            std::size_t{9} + 27 + 3 * 27 * 2);  // POLY has m = 1 only; secure kinds per X
  EXPECT_TRUE(expand_grid(Config::parse("kinds=\n")).empty());
  const std::string csv = comparison_csv(emit_comparison_table({}));
  EXPECT_EQ(csv, "kind,K1,K2,m,X,r,delta,N,theoretical_best,theoretical_worst,measured_best,measured_worst,mode,match\n");
  EXPECT_THROW(expand_grid(Config::parse("preset=nope\n")), Error);
  EXPECT_THROW(expand_grid(Config::parse("kinds=EP\ncolour=red\n")), Error);
}

TEST(Grid, MeasuredEqualsTheoreticalOnSmallGrid) {
  const auto grid = expand_grid(Config::parse("kinds=POLY,MATDOT,EP,SEP,PS,TSEP,DFT,LRC\nK1=1,2\nK2=1,2\nm=1,2\nX=1\nlrc=1:2,3:2\nlrc_m=2\n"));
  ASSERT_FALSE(grid.empty());
  const auto rows = emit_comparison_table(grid);
  for (const auto& row : rows) EXPECT_TRUE(row.matches()) << params_to_config(row.params);
  EXPECT_EQ(comparison_csv(rows).find(",false\n"), std::string::npos);
}
