// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "cdmm/glm.hpp"
#include "cdmm/partition.hpp"
#include "cdmm/security.hpp"
#include "cdmm/simulator.hpp"
#include "cdmm/worked_examples.hpp"

using namespace cdmm;

namespace {

// Pinned limits.
constexpr double kExample1Seconds = 1.0;
constexpr double kExample3Seconds = 10.0;
constexpr double kExample4Seconds = 60.0;
constexpr double kGlmSeconds = 30.0;
constexpr std::size_t kPathInstances = 500;
constexpr std::size_t kFreivaldsTrials = 10000;
constexpr u64 kFreivaldsMinModulus = u64{1} << 20;
const double kGlmTolerance = std::ldexp(1.0, -14);
constexpr double kMacRatioLow = 0.4, kMacRatioHigh = 0.6;

struct Outcome {
  bool passed = false;
  std::string detail;
};

SchemeParams make(SchemeKind kind, std::size_t k1, std::size_t k2, std::size_t m, std::size_t x, std::size_t n = 0) {
  SchemeParams p;
  p.kind = kind;
  p.K1 = k1;
  p.K2 = k2;
  p.m = m;
  p.X = x;
  p.N = n;
  return p;
}

// limit <= 0: no runtime bound.
Outcome example(ExampleCheck (*fn)(u64), double limit) {
  const ExampleCheck c = fn(1);
  char buf[160];
  if (limit > 0)
    std::snprintf(buf, sizeof buf, "%s responses=%zu %.3fs (limit %.0fs)", c.detail.c_str(), c.responses, c.seconds,
                  limit);
  else
    std::snprintf(buf, sizeof buf, "%s responses=%zu %.3fs", c.detail.c_str(), c.responses, c.seconds);
  return {c.passed && (limit <= 0 || c.seconds < limit), buf};
}

Outcome threshold_table() {
  const auto rows = emit_comparison_table(expand_grid(Config::parse("preset=acceptance\n")));
  std::size_t matched = 0;
  std::string first_bad;
  for (const auto& r : rows) {
    if (r.matches())
      ++matched;
    else if (first_bad.empty())
      first_bad = " first mismatch: " + params_to_config(r.params);
  }
  return {matched == rows.size() && !rows.empty(),
          std::to_string(matched) + "/" + std::to_string(rows.size()) + " rows equal" + first_bad};
}

Outcome path_equivalence() {
  Rng rng(2024);
  std::size_t instances = 0, mismatches = 0, comparisons = 0;
  while (instances < kPathInstances) {
    for (SchemeKind kind : {SchemeKind::EP, SchemeKind::SEP, SchemeKind::PS, SchemeKind::TSEP})
      for (std::size_t k1 = 1; k1 <= 3; ++k1)
        for (std::size_t k2 = 1; k2 <= 3; ++k2)
          for (std::size_t m = 1; m <= 3; ++m)
            for (std::size_t x = 0; x <= 2; ++x) {
              if ((kind == SchemeKind::EP) != (x == 0)) continue;
              SchemeParams p = make(kind, k1, k2, m, x);
              p.N = kind == SchemeKind::EP ? 2 * k1 * k2 * m : worker_count(p);
              try {
                validate_params(p);
              } catch (const Error&) {
                continue;
              }
              const PrimeField f = select_field(p, p.N);
              const PointPlan plan = plan_points(f, p, p.N);
              const DecodeContext ctx = make_decode_context(f, p);
              const ExponentLayout& l = ctx.layout;
              // Entries up to 8 x 8 overall.
              const std::size_t br = 1 + rng() % (8 / std::max(k1, m)), bi = 1 + rng() % (8 / m),
                                bc = 1 + rng() % (8 / std::max(k2, m));
              const Matrix a = random_matrix(f, br * k1, bi * m, rng), b = random_matrix(f, bi * m, bc * k2, rng);
              const PartitionSpec spec{a.rows(), a.cols(), b.cols(), k1, m, k2};
              const BlockGrid ab = partition_a(a, spec), bb = partition_b(b, spec);
              std::vector<Matrix> na, nb;
              for (std::size_t t = 0; t < x; ++t) {
                na.push_back(random_matrix(f, br, bi, rng));
                nb.push_back(random_matrix(f, bi, bc, rng));
              }
              ResponseSet rs;
              for (std::size_t w = 0; w < p.N; ++w) {
                const Shares s = encode_share(f, l, ab, bb, na, nb, plan.points[w]);
                rs.push_back(make_response(w, plan.points[w], multiply(f, s.a, s.b)));
              }
              const Matrix direct = multiply(f, a, b);
              std::vector<DecodePath> paths = ctx.paths;
              for (DecodePath path : paths) {
                BlockGrid out;
                ++comparisons;
                if (try_decode_path(ctx, path, rs, out) != ErrorCode::ok || assemble_c(out) != direct) ++mismatches;
              }
              ++instances;
            }
  }
  return {mismatches == 0 && instances >= kPathInstances,
          std::to_string(instances) + " instances, " + std::to_string(comparisons) + " path decodes, " +
              std::to_string(mismatches) + " mismatches"};
}

Outcome security() {
  std::size_t subsets = 0, singular = 0;
  for (SchemeKind kind : {SchemeKind::SEP, SchemeKind::PS, SchemeKind::TSEP})
    for (std::size_t k1 = 1; k1 <= 3; ++k1)
      for (std::size_t k2 = 1; k2 <= 3; ++k2)
        for (std::size_t m = 1; m <= 3; ++m)
          for (std::size_t x = 1; x <= 2; ++x) {
            SchemeParams p = make(kind, k1, k2, m, x);
            const std::size_t worst = theoretical_thresholds(p).worst;
            for (std::size_t n = worst; n <= worst + 2; ++n) {
              p.N = n;
              const PrimeField f = select_field(p, n);
              const PointPlan plan = plan_points(f, p, n);
              const ExponentLayout l = make_layout(p);
              for (const auto& s : index_subsets(n, x)) {
                ++subsets;
                singular += !noise_map_invertible(f, l, plan.points, s);
              }
            }
          }
  std::size_t audits = 0, wrong = 0;
  const std::vector<u64> small_primes{5, 7, 11, 13, 17, 19, 23, 29, 31};
  for (SchemeKind kind : {SchemeKind::SEP, SchemeKind::PS, SchemeKind::TSEP})
    for (std::size_t x = 1; x <= 2; ++x)
      for (u64 prime : small_primes) {
        const SchemeParams p = make(kind, 1, 1, 1, x);
        const std::size_t n = theoretical_thresholds(p).worst;
        if (prime <= n) continue;  // needs n distinct nonzero points
        ++audits;
        wrong += !exhaustive_security_audit(p, n, prime).passed();
      }
  for (SchemeKind kind : {SchemeKind::POLY, SchemeKind::MATDOT, SchemeKind::EP})
    for (u64 prime : small_primes) {
      ++audits;
      wrong += exhaustive_security_audit(make(kind, 1, 1, 1, 0), 2, prime).passed();
    }
  return {singular == 0 && wrong == 0,
          std::to_string(subsets) + " colluding subsets, " + std::to_string(singular) + " singular; " +
              std::to_string(audits) + " audits, " + std::to_string(wrong) + " wrong verdicts"};
}

Outcome freivalds() {
  const PrimeField f = find_field_for_orders({1}, kFreivaldsMinModulus);
  Rng rng(99);
  std::size_t corrupt_accepted = 0, honest_accepted = 0;
  for (std::size_t t = 0; t < kFreivaldsTrials; ++t) {
    const Matrix a = random_matrix(f, 4, 3, rng), b = random_matrix(f, 3, 2, rng);
    const Matrix c = multiply(f, a, b);
    honest_accepted += freivalds_check(f, a, b, c, rng);
    corrupt_accepted += freivalds_check(f, a, b, add(f, c, random_nonzero_matrix(f, 4, 2, rng)), rng);
  }
  // One Byzantine worker, wherever it sits, is absorbed by one extra worker.
  std::size_t jobs = 0, failed_jobs = 0;
  for (const SchemeParams& base : {make(SchemeKind::POLY, 2, 2, 1, 0), make(SchemeKind::MATDOT, 1, 1, 3, 0),
                                   make(SchemeKind::EP, 2, 2, 2, 0), make(SchemeKind::SEP, 2, 2, 2, 2),
                                   make(SchemeKind::PS, 2, 1, 2, 1), make(SchemeKind::TSEP, 2, 3, 2, 1)}) {
    SchemeParams p = base;
    p.N = theoretical_thresholds(p).worst + 1;
    const PrimeField pf = select_field(p, p.N);
    Rng mr(jobs + 1);
    const Matrix a = random_matrix(pf, 6, 6, mr), b = random_matrix(pf, 6, 6, mr), c = multiply(pf, a, b);
    for (std::size_t w = 0; w < p.N; ++w) {
      SimConfig sim;
      sim.byzantine = {w};
      sim.verify = true;
      sim.seed = w;
      const SimReport r = run_job(p, a, b, sim);
      ++jobs;
      const bool flagged_ok = r.byzantine_flagged.empty() || r.byzantine_flagged == std::vector<std::size_t>{w};
      if (!r.success() || r.decoded != c || !flagged_ok) ++failed_jobs;
    }
  }
  const bool ok = corrupt_accepted == 0 && honest_accepted == kFreivaldsTrials && failed_jobs == 0;
  return {ok, "p=" + std::to_string(f.modulus()) + ", corrupt accepted " + std::to_string(corrupt_accepted) + "/" +
                  std::to_string(kFreivaldsTrials) + ", honest accepted " + std::to_string(honest_accepted) + "/" +
                  std::to_string(kFreivaldsTrials) + ", " + std::to_string(jobs - failed_jobs) + "/" +
                  std::to_string(jobs) + " jobs at N = worst + 1 with one Byzantine worker"};
}

Outcome glm() {
  const auto start = std::chrono::steady_clock::now();
  const GlmConfig cfg = glm_config_from(Config::parse("loss=logistic\niterations=100\nseed=1\n"));
  const Dataset d = make_synthetic_dataset(200, 10, GlmLoss::logistic, cfg.seed);
  const GlmTrace coded = glm_train(d, cfg), ref = glm_train_reference(d, cfg);
  double worst = 0;
  for (std::size_t t = 0; t < coded.weights.size(); ++t)
    for (std::size_t j = 0; j < d.cols; ++j)
      worst = std::max(worst, std::fabs(coded.weights[t][j] - ref.weights[t][j]));

  const PrimeField f = glm_field(cfg);
  const FixedPointCodec codec(f, cfg.frac_bits);
  Matrix a(d.rows, d.cols);
  for (std::size_t i = 0; i < d.x.size(); ++i) a.data()[i] = codec.encode(d.x[i]);
  const CodedSession session(f, a, cfg.coding, cfg.seed);
  const bool reuse = transpose_reuse_check(f, session.layout1(), session.layout2(), a, session.a_noise(),
                                           session.points()) &&
                     session.a_encodings() == session.workers();

  Rng rng(5);
  const Matrix big = random_matrix(f, 256, 32, rng), u = random_matrix(f, 32, 1, rng);
  std::vector<u64> macs;
  for (std::size_t k1 : {1, 2, 4}) {
    const CodedSession s(f, big, TwoPhaseParams{k1, cfg.coding.m, 1, cfg.coding.X, 0}, 1);
    PhaseReport r;
    s.phase1(u, PhaseOptions{}, &r);
    macs.push_back(r.max_worker_macs);
  }
  bool trend = true;
  for (std::size_t i = 1; i < macs.size(); ++i) {
    const double ratio = static_cast<double>(macs[i]) / static_cast<double>(macs[i - 1]);
    trend = trend && ratio > kMacRatioLow && ratio < kMacRatioHigh;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "max weight diff %.3e (tol %.3e), flagged %zu, transpose reuse %s, worker MACs %llu/%llu/%llu, %.2fs "
                "(limit %.0fs)",
                worst, kGlmTolerance, coded.flagged, reuse ? "yes" : "no", static_cast<unsigned long long>(macs[0]),
                static_cast<unsigned long long>(macs[1]), static_cast<unsigned long long>(macs[2]), seconds,
                kGlmSeconds);
  return {worst <= kGlmTolerance && reuse && trend && coded.flagged > 0 && seconds < kGlmSeconds, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"secure entangled modulo decode", [] { return example(example_sep_modulo, kExample1Seconds); }},
      {"transposed secure decode", [] { return example(example_tsep, 0); }},
      {"entangled grouped decode", [] { return example(example_ep_grouped, kExample3Seconds); }},
      {"local repair decode", [] { return example(example_lrc, kExample4Seconds); }},
      {"threshold table", threshold_table},
      {"decode path equivalence", path_equivalence},
      {"security audit", security},
      {"Freivalds verification", freivalds},
      {"coded GLM training", glm},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu %s: %s [%.2fs]\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), s);
    std::fflush(stdout);
    failures += !o.passed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
