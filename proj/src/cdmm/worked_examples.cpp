#include "cdmm/worked_examples.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "cdmm/partition.hpp"

namespace cdmm {
namespace {

struct Run {
  PrimeField field;
  ExponentLayout layout;
  std::vector<u64> points;
  ResponseSet responses;  // one per point
  BlockGrid expected;
};

Run make_run(const SchemeParams& params, std::size_t n, u64 seed) {
  SchemeParams p = params;
  p.N = n;
  const PrimeField f = select_field(p, n);
  Run run{f, make_layout(p), plan_points(f, p, n).points, {}, {}};
  Rng rng(seed);
  const ExponentLayout& l = run.layout;
  BlockGrid a(l.K1(), l.m()), b(l.m(), l.K2());
  for (auto& blk : a) blk = random_matrix(f, 2, 3, rng);
  for (auto& blk : b) blk = random_matrix(f, 3, 2, rng);
  std::vector<Matrix> na, nb;
  for (std::size_t t = 0; t < l.X(); ++t) {
    na.push_back(random_matrix(f, 2, 3, rng));
    nb.push_back(random_matrix(f, 3, 2, rng));
  }
  run.expected = block_product(f, a, b);
  for (std::size_t w = 0; w < n; ++w) {
    const Shares s = encode_share(f, l, a, b, na, nb, run.points[w]);
    run.responses.push_back(make_response(w, run.points[w], multiply(f, s.a, s.b)));
  }
  return run;
}

ResponseSet pick(const Run& run, const std::vector<std::size_t>& workers) {
  ResponseSet out;
  for (std::size_t w : workers) out.push_back(run.responses[w]);
  return out;
}

std::vector<std::size_t> range(std::size_t from, std::size_t to) {
  std::vector<std::size_t> v;
  for (std::size_t i = from; i < to; ++i) v.push_back(i);
  return v;
}

class Checker {
 public:
  explicit Checker(std::string name) : start_(std::chrono::steady_clock::now()) { result_.name = std::move(name); }
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  ExampleCheck finish(std::size_t responses) {
    result_.passed = failures_.empty();
    result_.responses = responses;
    std::ostringstream d;
    for (std::size_t i = 0; i < failures_.size(); ++i) d << (i ? "; " : "") << failures_[i];
    result_.detail = failures_.empty() ? "ok" : d.str();
    result_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return result_;
  }

 private:
  ExampleCheck result_;
  std::vector<std::string> failures_;
  std::chrono::steady_clock::time_point start_;
};

template <class Fn>
bool succeeds(Fn&& fn) {
  try {
    return fn();
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

ExampleCheck example_sep_modulo(u64 seed) {
  Checker c("sep_modulo_16_roots");
  SchemeParams p;
  p.kind = SchemeKind::SEP;
  p.K1 = p.K2 = p.m = 2;
  p.X = 2;
  p.orientation = Orientation::first;
  const Run run = make_run(p, 17, seed);
  c.expect(run.layout.modulo_order == 16, "modulo order is not 16");
  c.expect(succeeds([&] { return decode_modulo(run.field, run.layout, pick(run, range(0, 16)), 16) == run.expected; }),
           "modulo decode from 16 roots");
  BlockGrid out;
  c.expect(try_decode_modulo(run.field, run.layout, pick(run, range(0, 15)), 16, 1, out) != ErrorCode::ok,
           "15 roots must not decode");
  c.expect(succeeds([&] { return decode_full(run.field, run.layout, run.responses) == run.expected; }),
           "full decode from 17 points");
  return c.finish(16);
}

ExampleCheck example_tsep(u64 seed) {
  Checker c("tsep_17_roots");
  SchemeParams p;
  p.kind = SchemeKind::TSEP;
  p.K1 = p.m = 2;
  p.K2 = 3;
  p.X = 1;
  p.orientation = Orientation::second;
  const Run run = make_run(p, 21, seed);
  std::vector<std::int64_t> degrees(run.layout.c_exponent.begin(), run.layout.c_exponent.end());
  std::sort(degrees.begin(), degrees.end());
  c.expect(degrees == std::vector<std::int64_t>{3, 4, 5, 10, 11, 12}, "needed degrees differ from {3,4,5,10,11,12}");
  c.expect(run.layout.product_degree == 19, "product degree is not 19");
  c.expect(run.layout.modulo_order == 17, "modulo order is not 17");
  c.expect(succeeds([&] { return decode_modulo(run.field, run.layout, pick(run, range(0, 17)), 17) == run.expected; }),
           "modulo decode from 17 roots");
  for (std::size_t skip = 0; skip < 21; ++skip) {
    std::vector<std::size_t> subset;
    for (std::size_t w = 0; w < 21; ++w)
      if (w != skip) subset.push_back(w);
    c.expect(succeeds([&] { return decode_full(run.field, run.layout, pick(run, subset)) == run.expected; }),
             "full decode without worker " + std::to_string(skip));
  }
  return c.finish(17);
}

ExampleCheck example_ep_grouped(u64 seed) {
  Checker c("ep_grouped_10_roots");
  SchemeParams p;
  p.kind = SchemeKind::EP;
  p.K1 = p.K2 = p.m = 2;
  const Run run = make_run(p, 10, seed);
  // Pairs {w, w + 5} share x^2.
  c.expect(succeeds([&] {
             return decode_grouped(run.field, run.layout, pick(run, {0, 5, 1, 6, 2, 7, 3, 8}), 2) == run.expected;
           }),
           "grouped decode from 4 complete pairs");
  BlockGrid out;
  c.expect(try_decode_grouped(run.field, run.layout, pick(run, {0, 5, 1, 6, 2, 7, 3, 9}), 2, out) != ErrorCode::ok,
           "3 complete pairs must not decode by grouping");
  for (std::size_t skip = 0; skip < 10; ++skip) {
    std::vector<std::size_t> subset;
    for (std::size_t w = 0; w < 10; ++w)
      if (w != skip) subset.push_back(w);
    c.expect(succeeds([&] { return decode_full(run.field, run.layout, pick(run, subset)) == run.expected; }),
             "full decode without worker " + std::to_string(skip));
  }
  p.N = 10;
  const ThresholdMeasurement m = measure_thresholds(p, MeasureMode::exhaustive, seed);
  c.expect(m.best == 8 && m.worst == 9 && m.confirmed,
           "enumeration gave " + std::to_string(m.best) + "~" + std::to_string(m.worst));
  return c.finish(8);
}

ExampleCheck example_lrc(u64 seed) {
  Checker c("lrc_local_groups");
  SchemeParams p;
  p.kind = SchemeKind::LRC;
  p.m = 6;
  p.r = 3;
  p.delta = 3;
  p.N = 15;
  const PrimeField f = select_field(p, 15);
  const DecodeContext ctx = make_decode_context(f, p);
  const Run run = make_run(p, 15, seed);
  const LrcLayout& lrc = *ctx.lrc;
  c.expect(lrc.groups.size() == 3, "expected 3 local groups");
  std::vector<std::size_t> three_each, short_group;
  for (std::size_t g = 0; g < lrc.groups.size(); ++g) {
    for (std::size_t i = 0; i < 3 && i < lrc.groups[g].size(); ++i) {
      three_each.push_back(lrc.groups[g][lrc.groups[g].size() - 1 - i]);
      if (g != 0 || i < 2) short_group.push_back(lrc.groups[g][i]);
    }
  }
  // A short group keeps every other group complete.
  for (std::size_t g = 1; g < lrc.groups.size(); ++g)
    for (std::size_t i = 3; i < lrc.groups[g].size(); ++i) short_group.push_back(lrc.groups[g][i]);
  const Matrix expected = assemble(run.expected);
  c.expect(succeeds([&] { return decode_lrc(f, ctx.layout, lrc, pick(run, three_each)) == expected; }),
           "local repair from 3 responses per group");
  c.expect(try_decode_any(ctx, pick(run, short_group)).status != ErrorCode::ok,
           "a group with 2 responses must not decode");
  const ThresholdMeasurement m = measure_thresholds(p, MeasureMode::exhaustive, seed);
  c.expect(m.best == 9 && m.worst == 13 && m.confirmed && m.subsets_checked > 0,
           "enumeration gave " + std::to_string(m.best) + "~" + std::to_string(m.worst));
  return c.finish(9);
}

std::vector<ExampleCheck> run_worked_examples(u64 seed) {
  return {example_sep_modulo(seed), example_tsep(seed), example_ep_grouped(seed), example_lrc(seed)};
}

std::string worked_examples_csv(const std::vector<ExampleCheck>& checks, bool include_timing) {
  std::ostringstream out;
  out << "example,passed,responses,detail" << (include_timing ? ",seconds" : "") << '\n';
  for (const auto& c : checks) {
    out << c.name << ',' << (c.passed ? "true" : "false") << ',' << c.responses << ',' << c.detail;
    if (include_timing) out << ',' << c.seconds;
    out << '\n';
  }
  return out.str();
}

}  // namespace cdmm
