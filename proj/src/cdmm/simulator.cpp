#include "cdmm/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "cdmm/partition.hpp"

namespace cdmm {
namespace {

bool uses_roots(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::SEP:
    case SchemeKind::PS:
    case SchemeKind::TSEP:
    case SchemeKind::EP:
    case SchemeKind::LRC:
    case SchemeKind::DFT: return true;
    default: return false;
  }
}

SchemeParams with_workers(const SchemeParams& params, std::size_t n) {
  SchemeParams p = params;
  p.N = n;
  return p;
}

// Independent deterministic streams derived from one seed.
Rng stream(u64 seed, u64 salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  return Rng(seq);
}

enum Salt : u64 { kNoise = 1, kArrival = 2, kVerify = 3, kCorrupt = 1000, kInstance = 4 };

}  // namespace

std::size_t required_root_order(const SchemeParams& params, std::size_t n_workers) {
  switch (params.kind) {
    case SchemeKind::SEP:
    case SchemeKind::PS:
    case SchemeKind::TSEP:
    case SchemeKind::LRC: return make_layout(with_workers(params, 0)).modulo_order;
    case SchemeKind::EP: return std::max<std::size_t>(params.m, params.m * (n_workers / params.m));
    case SchemeKind::DFT: return params.m;
    default: return 1;
  }
}

PrimeField select_field(const SchemeParams& params, std::size_t n_workers, u64 min_modulus) {
  const std::size_t order = required_root_order(params, n_workers);
  if (params.modulus != 0) {
    PrimeField f(params.modulus);
    if ((f.modulus() - 1) % order != 0) {
      fail(ErrorCode::order_not_supported, "modulus does not support roots of order " + std::to_string(order));
    }
    if (f.modulus() <= n_workers + 1) fail(ErrorCode::bad_params, "modulus too small for distinct nonzero points");
    return f;
  }
  return find_field_for_orders({order}, std::max<u64>(min_modulus, n_workers + 2));
}

PointPlan plan_points(const PrimeField& f, const SchemeParams& params, std::size_t n) {
  PointPlan plan;
  if (!uses_roots(params.kind)) {
    for (std::size_t i = 0; i < n; ++i) plan.points.push_back(i + 1);
    return plan;
  }
  const std::size_t order = required_root_order(params, n);
  const u64 zeta = root_of_unity(f, order);
  plan.root_order = order;
  plan.root_count = std::min(n, order);
  std::unordered_set<u64> used;
  u64 x = 1;
  for (std::size_t w = 0; w < plan.root_count; ++w) {
    plan.points.push_back(x);
    used.insert(x);
    x = f.mul(x, zeta);
  }
  // All roots are reserved, even those beyond N, so extras never alias a coset.
  for (std::size_t w = plan.root_count; w < order; ++w) {
    used.insert(x);
    x = f.mul(x, zeta);
  }
  for (u64 v = 1; plan.points.size() < n; ++v) {
    if (!used.count(v)) plan.points.push_back(v);
  }
  return plan;
}

std::vector<Cell> symmetry_cells(const SchemeParams& params, const PointPlan& plan) {
  const std::size_t n = plan.points.size();
  std::vector<Cell> cells;
  auto add_extras = [&](std::size_t from) {
    if (from >= n) return;
    Cell c;
    c.cls = 1;
    for (std::size_t w = from; w < n; ++w) c.workers.push_back(w);
    cells.push_back(std::move(c));
  };
  switch (params.kind) {
    case SchemeKind::SEP:
    case SchemeKind::PS:
    case SchemeKind::TSEP: {
      Cell roots;
      for (std::size_t w = 0; w < plan.root_count; ++w) roots.workers.push_back(w);
      if (!roots.workers.empty()) cells.push_back(std::move(roots));
      add_extras(plan.root_count);
      break;
    }
    case SchemeKind::EP:
    case SchemeKind::LRC: {
      // Cosets of x -> x^g are the residue classes of the worker index mod L.
      const std::size_t groups =
          params.kind == SchemeKind::EP ? plan.root_count / params.m : make_lrc_layout(params)->group_count;
      for (std::size_t g = 0; g < groups; ++g) {
        Cell c;
        for (std::size_t w = g; w < plan.root_count; w += groups) c.workers.push_back(w);
        cells.push_back(std::move(c));
      }
      add_extras(plan.root_count);
      break;
    }
    default: {
      Cell all;
      for (std::size_t w = 0; w < n; ++w) all.workers.push_back(w);
      cells.push_back(std::move(all));
    }
  }
  return cells;
}

bool freivalds_check(const PrimeField& f, const Matrix& a_share, const Matrix& b_share,
                     const Matrix& product, Rng& rng) {
  std::vector<u64> r(a_share.rows());
  for (u64& v : r) v = random_element(f, rng);
  return row_times(f, r, product) == row_times(f, row_times(f, r, a_share), b_share);
}

SimReport run_job(const SchemeParams& params, const Matrix& a_in, const Matrix& b_in, const SimConfig& sim) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = sim.N != 0 ? sim.N : worker_count(params);
  const SchemeParams p = with_workers(params, n);
  validate_params(p);
  for (std::size_t w : sim.stragglers)
    if (w >= n) fail(ErrorCode::invalid_argument, "straggler id out of range");
  for (std::size_t w : sim.byzantine) {
    if (w >= n) fail(ErrorCode::invalid_argument, "byzantine id out of range");
    if (sim.stragglers.count(w)) fail(ErrorCode::invalid_argument, "a worker cannot be both straggler and byzantine");
  }
  if (a_in.cols() != b_in.rows()) fail(ErrorCode::shape_mismatch, "A columns differ from B rows");

  const PrimeField f = select_field(p, n);
  for (u64 v : a_in) if (v >= f.modulus()) fail(ErrorCode::field_mismatch, "A entry not reduced modulo p");
  for (u64 v : b_in) if (v >= f.modulus()) fail(ErrorCode::field_mismatch, "B entry not reduced modulo p");

  std::vector<u64> points;
  if (!sim.explicit_points.empty()) {
    points = sim.explicit_points;
    if (points.size() != n) fail(ErrorCode::invalid_argument, "explicit point count differs from N");
    std::vector<u64> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) fail(ErrorCode::duplicate_points, "explicit points repeat");
    for (u64& x : points) {
      if (x >= f.modulus()) fail(ErrorCode::invalid_argument, "explicit point not reduced modulo p");
      if (x == 0 && p.X > 0) fail(ErrorCode::invalid_argument, "secure schemes reject the point 0");
    }
  } else {
    points = plan_points(f, p, n).points;
  }

  std::vector<std::size_t> order = sim.arrival_order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (sim.shuffle_arrivals) {
      Rng rng = stream(sim.seed, kArrival);
      std::shuffle(order.begin(), order.end(), rng);
    }
  } else {
    std::vector<std::size_t> check = order;
    std::sort(check.begin(), check.end());
    for (std::size_t i = 0; i < check.size(); ++i)
      if (check[i] != i || check.size() != n) fail(ErrorCode::invalid_argument, "arrival order is not a permutation of the workers");
  }

  const Matrix a = pad_to_multiple(a_in, p.K1, p.m);
  const Matrix b = pad_to_multiple(b_in, p.m, p.K2);
  const PartitionSpec spec{a.rows(), a.cols(), b.cols(), p.K1, p.m, p.K2};
  const BlockGrid blocks_a = partition_a(a, spec);
  const BlockGrid blocks_b = partition_b(b, spec);
  const DecodeContext ctx = make_decode_context(f, p);

  Rng noise_rng = stream(sim.seed, kNoise);
  std::vector<Matrix> noise_a, noise_b;
  for (std::size_t t = 0; t < ctx.layout.X(); ++t) {
    noise_a.push_back(random_matrix(f, blocks_a(0, 0).rows(), blocks_a(0, 0).cols(), noise_rng));
    noise_b.push_back(random_matrix(f, blocks_b(0, 0).rows(), blocks_b(0, 0).cols(), noise_rng));
  }
  Rng verify_rng = stream(sim.seed, kVerify);
  const std::size_t min_responses = theoretical_thresholds(p).best;

  SimReport report;
  report.modulus = f.modulus();
  report.n_workers = n;
  ResponseSet accepted;
  for (std::size_t w : order) {
    ++report.arrivals_processed;
    if (sim.stragglers.count(w)) continue;
    const Shares shares = encode_share(f, ctx.layout, blocks_a, blocks_b, noise_a, noise_b, points[w]);
    Matrix product = multiply(f, shares.a, shares.b);
    if (sim.byzantine.count(w)) {
      Rng corrupt = stream(sim.seed, kCorrupt + w);
      product = add(f, product, random_nonzero_matrix(f, product.rows(), product.cols(), corrupt));
    }
    if (sim.verify && !freivalds_check(f, shares.a, shares.b, product, verify_rng)) {
      report.byzantine_flagged.push_back(w);
      continue;
    }
    accepted.push_back(make_response(w, points[w], std::move(product)));
    if (accepted.size() < min_responses) continue;
    DecodeAttempt attempt = try_decode_any(ctx, accepted);
    if (attempt.status == ErrorCode::ok) {
      report.status = ErrorCode::ok;
      report.path = attempt.path;
      report.responses_used = accepted.size();
      report.decoded = crop(assemble(attempt.blocks), a_in.rows(), b_in.cols());
      report.blocks = std::move(attempt.blocks);
      break;
    }
  }
  if (!report.success()) report.responses_used = accepted.size();
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string sim_report_csv(const SchemeParams& params, const SimReport& report, bool include_timing) {
  std::ostringstream out;
  out << "key,value\n";
  out << "kind," << to_string(params.kind) << '\n';
  out << "N," << report.n_workers << '\n';
  out << "modulus," << report.modulus << '\n';
  out << "status," << to_string(report.status) << '\n';
  out << "decode_path," << (report.success() ? to_string(report.path) : "none") << '\n';
  out << "responses_used," << report.responses_used << '\n';
  out << "arrivals_processed," << report.arrivals_processed << '\n';
  out << "byzantine_flagged,";
  for (std::size_t i = 0; i < report.byzantine_flagged.size(); ++i) out << (i ? ";" : "") << report.byzantine_flagged[i];
  out << '\n';
  if (include_timing) out << "wall_clock_seconds," << std::fixed << std::setprecision(6) << report.wall_clock_seconds << '\n';
  return out.str();
}

const char* to_string(MeasureMode mode) {
  switch (mode) {
    case MeasureMode::automatic: return "auto";
    case MeasureMode::exhaustive: return "exhaustive";
    case MeasureMode::orbit: return "orbit";
    case MeasureMode::sampling: return "sampling";
  }
  return "?";
}

MeasureMode parse_measure_mode(const std::string& name) {
  for (MeasureMode m : {MeasureMode::automatic, MeasureMode::exhaustive, MeasureMode::orbit, MeasureMode::sampling})
    if (name == to_string(m)) return m;
  fail(ErrorCode::config_parse_error, "unknown measurement mode '" + name + "'");
}

namespace {

struct Instance {
  ResponseSet responses;  // indexed by worker
  BlockGrid expected;
};

Instance build_instance(const DecodeContext& ctx, const PointPlan& plan, u64 seed) {
  const PrimeField& f = ctx.field;
  const ExponentLayout& l = ctx.layout;
  Rng rng = stream(seed, kInstance);
  constexpr std::size_t kBlock = 2;
  BlockGrid a(l.K1(), l.m()), b(l.m(), l.K2());
  for (auto& blk : a) blk = random_matrix(f, kBlock, kBlock, rng);
  for (auto& blk : b) blk = random_matrix(f, kBlock, kBlock, rng);
  std::vector<Matrix> na, nb;
  for (std::size_t t = 0; t < l.X(); ++t) {
    na.push_back(random_matrix(f, kBlock, kBlock, rng));
    nb.push_back(random_matrix(f, kBlock, kBlock, rng));
  }
  Instance inst;
  inst.expected = block_product(f, a, b);
  for (std::size_t w = 0; w < plan.points.size(); ++w) {
    const Shares s = encode_share(f, l, a, b, na, nb, plan.points[w]);
    inst.responses.push_back(make_response(w, plan.points[w], multiply(f, s.a, s.b)));
  }
  return inst;
}

bool decodes(const DecodeContext& ctx, const Instance& inst, const std::vector<std::size_t>& subset) {
  ResponseSet rs;
  rs.reserve(subset.size());
  for (std::size_t w : subset) rs.push_back(inst.responses[w]);
  const DecodeAttempt attempt = try_decode_any(ctx, rs);
  return attempt.status == ErrorCode::ok && attempt.blocks == inst.expected;
}

// Non-increasing count vectors of length `cells` with entries <= cap.
void non_increasing(std::size_t cells, std::size_t cap, std::vector<std::size_t>& cur,
                    std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == cells) {
    out.push_back(cur);
    return;
  }
  const std::size_t hi = cur.empty() ? cap : cur.back();
  for (std::size_t v = 0; v <= hi; ++v) {
    cur.push_back(v);
    non_increasing(cells, cap, cur, out);
    cur.pop_back();
  }
}

// Representative subsets, one per orbit of the decoders' symmetry group.
std::vector<std::vector<std::size_t>> orbit_representatives(const std::vector<Cell>& cells) {
  // Cells sharing class and size form one block of interchangeable cells.
  std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < cells.size(); ++i) blocks[{cells[i].cls, cells[i].workers.size()}].push_back(i);
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::vector<std::size_t>>>> choices;
  for (const auto& [key, members] : blocks) {
    std::vector<std::vector<std::size_t>> vecs;
    std::vector<std::size_t> cur;
    non_increasing(members.size(), key.second, cur, vecs);
    choices.emplace_back(members, std::move(vecs));
  }
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> subset;
  std::function<void(std::size_t)> rec = [&](std::size_t bi) {
    if (bi == choices.size()) {
      std::vector<std::size_t> s = subset;
      std::sort(s.begin(), s.end());
      out.push_back(std::move(s));
      return;
    }
    const auto& [members, vecs] = choices[bi];
    for (const auto& counts : vecs) {
      const std::size_t mark = subset.size();
      for (std::size_t c = 0; c < members.size(); ++c) {
        const auto& ws = cells[members[c]].workers;
        subset.insert(subset.end(), ws.begin(), ws.begin() + static_cast<long>(counts[c]));
      }
      rec(bi + 1);
      subset.resize(mark);
    }
  };
  rec(0);
  return out;
}

}  // namespace

ThresholdMeasurement measure_thresholds(const SchemeParams& params, MeasureMode mode, u64 seed,
                                        std::size_t sampling_trials) {
  const std::size_t n = worker_count(params);
  const SchemeParams p = with_workers(params, n);
  validate_params(p);
  const PrimeField f = select_field(p, n);
  const PointPlan plan = plan_points(f, p, n);
  const DecodeContext ctx = make_decode_context(f, p);
  const Instance inst = build_instance(ctx, plan, seed);

  if (mode == MeasureMode::automatic) mode = n <= kExhaustiveLimit ? MeasureMode::exhaustive : MeasureMode::orbit;
  ThresholdMeasurement out;
  out.mode = mode;
  out.n_workers = n;
  out.exact = mode != MeasureMode::sampling;

  std::size_t best = n + 1;
  long max_fail = -1;
  auto consider = [&](const std::vector<std::size_t>& subset) {
    ++out.subsets_checked;
    const bool ok = decodes(ctx, inst, subset);
    if (ok && subset.size() < best) {
      best = subset.size();
      out.best_witness = subset;
    }
    if (!ok && static_cast<long>(subset.size()) > max_fail) {
      max_fail = static_cast<long>(subset.size());
      out.worst_failure = subset;
    }
  };

  if (mode == MeasureMode::exhaustive) {
    if (n > 24) fail(ErrorCode::too_large, "exhaustive enumeration limited to 24 workers");
    std::vector<std::size_t> subset;
    for (u64 mask = 0; mask < (u64{1} << n); ++mask) {
      subset.clear();
      for (std::size_t w = 0; w < n; ++w)
        if (mask >> w & 1) subset.push_back(w);
      consider(subset);
    }
  } else if (mode == MeasureMode::orbit) {
    for (const auto& subset : orbit_representatives(symmetry_cells(p, plan))) consider(subset);
  } else {
    Rng rng = stream(seed, kArrival);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    consider({});
    for (std::size_t size = 1; size <= n; ++size) {
      for (std::size_t t = 0; t < sampling_trials; ++t) {
        std::shuffle(all.begin(), all.end(), rng);
        std::vector<std::size_t> subset(all.begin(), all.begin() + static_cast<long>(size));
        std::sort(subset.begin(), subset.end());
        consider(subset);
      }
    }
  }

  out.best = best <= n ? best : 0;
  out.worst = static_cast<std::size_t>(max_fail + 1);
  const Instance second = build_instance(ctx, plan, seed + 1);
  out.confirmed = out.best != 0 && decodes(ctx, second, out.best_witness) &&
                  (max_fail < 0 || !decodes(ctx, second, out.worst_failure));
  return out;
}

std::vector<SchemeParams> expand_grid(const Config& grid) {
  static const std::vector<std::string> known = {"preset", "kinds", "K1", "K2", "m", "X",
                                                 "lrc", "lrc_m", "mode", "seed"};
  for (const auto& [key, value] : grid.values())
    if (std::find(known.begin(), known.end(), key) == known.end())
      fail(ErrorCode::config_parse_error, "unknown grid key '" + key + "'");

  Config g;
  const std::string preset = grid.get_or("preset", "");
  if (preset == "table1" || preset == "acceptance") {
    g.set("kinds", "POLY,EP,SEP,PS,TSEP");
  }
  if (preset == "table2") g.set("kinds", "DFT,MATDOT,LRC,LRC_SECURE");
  if (preset == "acceptance") g.set("kinds", "POLY,EP,SEP,PS,TSEP,DFT,MATDOT,LRC,LRC_SECURE");
  if (!preset.empty()) {
    if (preset != "table1" && preset != "table2" && preset != "acceptance")
      fail(ErrorCode::config_parse_error, "unknown preset '" + preset + "'");
    g.set("K1", "1,2,3");
    g.set("K2", "1,2,3");
    g.set("m", "1,2,3");
    g.set("X", "1,2");
    g.set("lrc", "1:2,3:2,3:3");
    g.set("lrc_m", "2,3,6");
  }
  for (const auto& [key, value] : grid.values())
    if (key != "preset") g.set(key, value);

  auto list = [&](const std::string& key, std::int64_t fallback) {
    std::vector<std::size_t> out;
    if (!g.has(key)) return std::vector<std::size_t>{static_cast<std::size_t>(fallback)};
    for (std::int64_t v : g.get_int_list(key)) {
      if (v < 0) fail(ErrorCode::config_parse_error, key + " values must be non-negative");
      out.push_back(static_cast<std::size_t>(v));
    }
    return out;
  };
  const auto k1s = list("K1", 1), k2s = list("K2", 1), ms = list("m", 1), xs = list("X", 1);
  const auto lrc_ms = list("lrc_m", 2);
  std::vector<std::pair<std::size_t, std::size_t>> lrc_pairs;
  for (const auto& item : g.get_list("lrc")) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) fail(ErrorCode::config_parse_error, "lrc entries are r:delta");
    lrc_pairs.emplace_back(static_cast<std::size_t>(parse_int(item.substr(0, colon), "lrc r")),
                           static_cast<std::size_t>(parse_int(item.substr(colon + 1), "lrc delta")));
  }

  std::vector<SchemeParams> out;
  std::set<std::string> seen;
  auto push = [&](const SchemeParams& p) {
    try {
      validate_params(p);
    } catch (const Error&) {
      return;
    }
    if (seen.insert(params_to_config(p)).second) out.push_back(p);
  };
  for (const auto& name : g.get_list("kinds")) {
    const SchemeKind kind = parse_kind(name);
    SchemeParams p;
    p.kind = kind;
    switch (kind) {
      case SchemeKind::LRC:
      case SchemeKind::LRC_SECURE:
        for (auto [r, d] : lrc_pairs)
          for (std::size_t m : lrc_ms) {
            p.r = r;
            p.delta = d;
            p.m = m;
            if (kind == SchemeKind::LRC) {
              p.X = 0;
              push(p);
            } else {
              for (std::size_t x : xs) {
                p.X = x;
                push(p);
              }
            }
          }
        break;
      default: {
        const bool secure = kind == SchemeKind::SEP || kind == SchemeKind::PS || kind == SchemeKind::TSEP;
        for (std::size_t k1 : k1s)
          for (std::size_t k2 : k2s)
            for (std::size_t m : ms)
              for (std::size_t x : secure ? xs : std::vector<std::size_t>{0}) {
                p.K1 = k1;
                p.K2 = k2;
                p.m = m;
                p.X = x;
                push(p);
              }
      }
    }
  }
  return out;
}

std::vector<ComparisonRow> emit_comparison_table(const std::vector<SchemeParams>& grid, MeasureMode mode, u64 seed) {
  std::vector<ComparisonRow> rows;
  for (const SchemeParams& p : grid) {
    ComparisonRow row;
    row.params = p;
    row.params.N = worker_count(p);
    row.theoretical = theoretical_thresholds(p);
    row.measured = measure_thresholds(p, mode, seed);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "kind,K1,K2,m,X,r,delta,N,theoretical_best,theoretical_worst,measured_best,measured_worst,mode,match\n";
  for (const auto& row : rows) {
    const auto& p = row.params;
    out << to_string(p.kind) << ',' << p.K1 << ',' << p.K2 << ',' << p.m << ',' << p.X << ',' << p.r << ','
        << p.delta << ',' << p.N << ',' << row.theoretical.best << ',' << row.theoretical.worst << ','
        << row.measured.best << ',' << row.measured.worst << ',' << to_string(row.measured.mode) << ','
        << (row.matches() ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string comparison_text(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(11) << "kind" << std::right << std::setw(4) << "K1" << std::setw(4) << "K2"
      << std::setw(4) << "m" << std::setw(4) << "X" << std::setw(4) << "r" << std::setw(6) << "delta"
      << std::setw(5) << "N" << std::setw(13) << "theoretical" << std::setw(11) << "measured" << std::setw(12)
      << "mode" << std::setw(7) << "match" << '\n';
  for (const auto& row : rows) {
    const auto& p = row.params;
    const std::string theo = std::to_string(row.theoretical.best) + " ~ " + std::to_string(row.theoretical.worst);
    const std::string meas = std::to_string(row.measured.best) + " ~ " + std::to_string(row.measured.worst);
    out << std::left << std::setw(11) << to_string(p.kind) << std::right << std::setw(4) << p.K1 << std::setw(4)
        << p.K2 << std::setw(4) << p.m << std::setw(4) << p.X << std::setw(4) << p.r << std::setw(6) << p.delta
        << std::setw(5) << p.N << std::setw(13) << theo << std::setw(11) << meas << std::setw(12)
        << to_string(row.measured.mode) << std::setw(7) << (row.matches() ? "yes" : "NO") << '\n';
  }
  return out.str();
}

}  // namespace cdmm
