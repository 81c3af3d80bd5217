#include "cdmm/glm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cdmm/partition.hpp"

namespace cdmm {
namespace {

Rng stream(u64 seed, u64 salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  return Rng(seq);
}

u64 magnitude(const PrimeField& f, u64 v) {
  const std::int64_t s = f.to_signed(v);
  return static_cast<u64>(s < 0 ? -s : s);
}

std::vector<Matrix> fresh_noise(const PrimeField& f, std::size_t count, std::size_t rows, std::size_t cols,
                                Rng& rng) {
  std::vector<Matrix> out;
  for (std::size_t t = 0; t < count; ++t) out.push_back(random_matrix(f, rows, cols, rng));
  return out;
}

// Runs one coded phase: encode the right factor, let every non-straggling
// worker multiply, verify, and decode once enough responses pass.
template <class WorkerFn, class VerifyFn>
BlockGrid run_phase(const PrimeField& f, const ExponentLayout& layout, const std::vector<u64>& points,
                    const BlockGrid& blocks, std::size_t noise_count, const PhaseOptions& opt,
                    WorkerFn&& work, VerifyFn&& verify, PhaseReport* report) {
  Rng noise_rng = stream(opt.seed, 1);
  const auto noise = fresh_noise(f, noise_count, blocks(0, 0).rows(), blocks(0, 0).cols(), noise_rng);
  const std::size_t need = static_cast<std::size_t>(layout.product_degree + 1);
  PhaseReport local;
  ResponseSet accepted;
  for (std::size_t w = 0; w < points.size() && accepted.size() < need; ++w) {
    if (opt.stragglers.count(w)) continue;
    const Matrix share = encode_b(f, layout, blocks, noise, points[w]);
    WorkCounter counter;
    Matrix product = work(w, share, counter);
    local.max_worker_macs = std::max(local.max_worker_macs, counter.macs);
    if (opt.byzantine.count(w)) {
      Rng corrupt = stream(opt.seed, 1000 + w);
      product = add(f, product, random_nonzero_matrix(f, product.rows(), product.cols(), corrupt));
    }
    if (opt.verify && !verify(w, share, product)) {
      local.flagged.push_back(w);
      continue;
    }
    accepted.push_back(make_response(w, points[w], std::move(product)));
  }
  local.responses_used = accepted.size();
  if (report) *report = local;
  if (accepted.size() < need) fail(ErrorCode::undecodable, "too few verified responses for the phase threshold");
  return decode_full(f, layout, accepted);
}

}  // namespace

FixedPointCodec::FixedPointCodec(const PrimeField& f, unsigned frac_bits)
    : field_(f), bits_(frac_bits), scale_(std::ldexp(1.0, static_cast<int>(frac_bits))) {
  if (frac_bits == 0 || frac_bits > 30) fail(ErrorCode::invalid_argument, "fraction bits must be in 1..30");
}

u64 FixedPointCodec::encode(double v) const {
  if (!std::isfinite(v)) fail(ErrorCode::codec_overflow, "cannot encode a non-finite value");
  const double scaled = std::nearbyint(v * scale_);
  if (std::fabs(scaled) >= static_cast<double>(half_modulus())) fail(ErrorCode::codec_overflow, "value exceeds codec range");
  return field_.from_int(static_cast<std::int64_t>(scaled));
}

double FixedPointCodec::decode(u64 v, unsigned levels) const {
  return static_cast<double>(field_.to_signed(v)) / std::pow(scale_, static_cast<double>(levels));
}

ExponentLayout phase1_layout(const TwoPhaseParams& p) { return entangled_layout(p.K1, p.s, p.m, p.X, false); }
ExponentLayout phase2_layout(const TwoPhaseParams& p) { return entangled_layout(p.m, p.s, p.K1, p.X, true); }
std::size_t phase_threshold(const TwoPhaseParams& p) {
  return static_cast<std::size_t>(std::max(phase1_layout(p).product_degree, phase2_layout(p).product_degree) + 1);
}

CodedSession::CodedSession(const PrimeField& f, const Matrix& a, const TwoPhaseParams& params, u64 seed)
    : field_(f), params_(params), rows_(a.rows()), cols_(a.cols()) {
  if (params.K1 == 0 || params.m == 0 || params.s == 0) fail(ErrorCode::bad_params, "block counts must be positive");
  layout1_ = phase1_layout(params);
  layout2_ = phase2_layout(params);
  const std::size_t need = phase_threshold(params);
  const std::size_t n = params.N != 0 ? params.N : need + 1;
  if (n < need) fail(ErrorCode::bad_params, "N is below the phase threshold");
  params_.N = n;
  if (f.modulus() <= n + 1) fail(ErrorCode::bad_params, "modulus too small for N distinct points");
  for (std::size_t i = 0; i < n; ++i) points_.push_back(i + 1);

  const Matrix padded = pad_to_multiple(a, params.K1, params.m);
  padded_rows_ = padded.rows();
  padded_cols_ = padded.cols();
  const PartitionSpec spec{padded_rows_, padded_cols_, 0, params.K1, params.m, 1};
  const BlockGrid blocks = partition_a(padded, spec);
  Rng rng = stream(seed, 7);
  noise_ = fresh_noise(f, params.X, blocks(0, 0).rows(), blocks(0, 0).cols(), rng);
  for (u64 x : points_) {
    shares_.push_back(encode_a(f, layout1_, blocks, noise_, x));
    ++a_encodings_;
    CheckKeys k;
    for (std::size_t i = 0; i < shares_.back().rows(); ++i) k.r1.push_back(random_element(f, rng));
    for (std::size_t i = 0; i < shares_.back().cols(); ++i) k.r2.push_back(random_element(f, rng));
    k.s1 = row_times(f, k.r1, shares_.back());
    k.s2 = row_times_transpose(f, k.r2, shares_.back());
    keys_.push_back(std::move(k));
  }
}

Matrix CodedSession::phase1(const Matrix& u, const PhaseOptions& opt, PhaseReport* report) const {
  if (u.rows() != cols_ && u.rows() != padded_cols_) fail(ErrorCode::shape_mismatch, "U rows differ from A columns");
  const Matrix padded = pad_to_multiple(u, 1, params_.s);
  Matrix full(padded_cols_, padded.cols(), 0);
  for (std::size_t i = 0; i < padded.rows(); ++i)
    for (std::size_t j = 0; j < padded.cols(); ++j) full(i, j) = padded(i, j);
  const BlockGrid blocks = partition_b(full, PartitionSpec{0, padded_cols_, full.cols(), params_.K1, params_.m, params_.s});
  const BlockGrid out = run_phase(
      field_, layout1_, points_, blocks, params_.X, opt,
      [&](std::size_t w, const Matrix& share, WorkCounter& c) { return multiply(field_, shares_[w], share, &c); },
      [&](std::size_t w, const Matrix& share, const Matrix& product) {
        return row_times(field_, keys_[w].r1, product) == row_times(field_, keys_[w].s1, share);
      },
      report);
  return crop(assemble(out), rows_, u.cols());
}

Matrix CodedSession::phase2(const Matrix& v, const PhaseOptions& opt, PhaseReport* report) const {
  if (v.rows() != rows_ && v.rows() != padded_rows_) fail(ErrorCode::shape_mismatch, "V rows differ from A rows");
  const Matrix padded = pad_to_multiple(v, 1, params_.s);
  Matrix full(padded_rows_, padded.cols(), 0);
  for (std::size_t i = 0; i < padded.rows(); ++i)
    for (std::size_t j = 0; j < padded.cols(); ++j) full(i, j) = padded(i, j);
  // V plays the right factor of A^T V: K1 block rows, s block columns.
  const BlockGrid blocks = partition_b(full, PartitionSpec{0, padded_rows_, full.cols(), params_.m, params_.K1, params_.s});
  const BlockGrid out = run_phase(
      field_, layout2_, points_, blocks, params_.X, opt,
      [&](std::size_t w, const Matrix& share, WorkCounter& c) { return multiply_at_b(field_, shares_[w], share, &c); },
      [&](std::size_t w, const Matrix& share, const Matrix& product) {
        return row_times(field_, keys_[w].r2, product) == row_times(field_, keys_[w].s2, share);
      },
      report);
  return crop(assemble(out), cols_, v.cols());
}

bool transpose_reuse_check(const PrimeField& f, const ExponentLayout& a_layout, const ExponentLayout& at_layout,
                           const Matrix& a, const std::vector<Matrix>& noise, const std::vector<u64>& points) {
  if (at_layout.K1() != a_layout.m() || at_layout.m() != a_layout.K1() || at_layout.X() != a_layout.X() ||
      noise.size() != a_layout.X()) {
    return false;
  }
  if (a.rows() % a_layout.K1() != 0 || a.cols() % a_layout.m() != 0) return false;
  const BlockGrid blocks = partition_a(a, PartitionSpec{a.rows(), a.cols(), 0, a_layout.K1(), a_layout.m(), 1});
  const Matrix at = transpose(a);
  const BlockGrid t_blocks = partition_a(at, PartitionSpec{at.rows(), at.cols(), 0, at_layout.K1(), at_layout.m(), 1});
  std::vector<Matrix> t_noise;
  for (const Matrix& r : noise) t_noise.push_back(transpose(r));
  for (u64 x : points) {
    const Matrix share = encode_a(f, a_layout, blocks, noise, x);
    if (transpose(share) != encode_a(f, at_layout, t_blocks, t_noise, x)) return false;
  }
  return true;
}

const char* to_string(GlmLoss loss) { return loss == GlmLoss::linear ? "linear" : "logistic"; }

GlmLoss parse_loss(const std::string& name) {
  if (name == "linear") return GlmLoss::linear;
  if (name == "logistic") return GlmLoss::logistic;
  fail(ErrorCode::config_parse_error, "unknown loss '" + name + "'");
}

double loss_value(GlmLoss loss, double u, double y) {
  if (loss == GlmLoss::linear) return 0.5 * (u - y) * (u - y);
  // log(1 + e^u) - y u, evaluated stably.
  return (u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u))) - y * u;
}

double loss_derivative(GlmLoss loss, double u, double y) {
  if (loss == GlmLoss::linear) return u - y;
  const double sigma = u >= 0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
  return sigma - y;
}

Dataset make_synthetic_dataset(std::size_t rows, std::size_t cols, GlmLoss loss, u64 seed) {
  Rng rng = stream(seed, 11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double grid = std::ldexp(1.0, 16);
  Dataset d;
  d.rows = rows;
  d.cols = cols;
  std::vector<double> planted(cols);
  for (double& w : planted) w = normal(rng);
  for (std::size_t i = 0; i < rows * cols; ++i) d.x.push_back(std::nearbyint(uni(rng) * grid) / grid);
  for (std::size_t i = 0; i < rows; ++i) {
    double u = 0;
    for (std::size_t j = 0; j < cols; ++j) u += d.at(i, j) * planted[j];
    if (loss == GlmLoss::logistic) {
      const double prob = loss_derivative(GlmLoss::logistic, u, 0.0);
      d.y.push_back(std::uniform_real_distribution<double>(0.0, 1.0)(rng) < prob ? 1.0 : 0.0);
    } else {
      d.y.push_back(std::nearbyint((u + 0.1 * normal(rng)) * grid) / grid);
    }
  }
  return d;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open dataset " + path);
  Dataset d;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> vals;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) vals.push_back(parse_double(cell, "dataset entry"));
    if (vals.size() < 2) fail(ErrorCode::io_error, "dataset rows need features and a label");
    if (d.rows == 0) d.cols = vals.size() - 1;
    if (vals.size() - 1 != d.cols) fail(ErrorCode::io_error, "dataset rows differ in width");
    d.x.insert(d.x.end(), vals.begin(), vals.end() - 1);
    d.y.push_back(vals.back());
    ++d.rows;
  }
  if (d.rows == 0) fail(ErrorCode::io_error, "dataset is empty");
  return d;
}

void write_dataset_csv(const std::string& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write dataset " + path);
  char buf[64];
  for (std::size_t i = 0; i < d.rows; ++i) {
    for (std::size_t j = 0; j < d.cols; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", d.at(i, j));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", d.y[i]);
    out << buf << '\n';
  }
}

GlmConfig glm_config_from(const Config& cfg) {
  static const std::vector<std::string> known = {"loss", "iterations", "step", "frac_bits", "K1", "m", "X",
                                                 "N", "seed", "modulus", "byzantine", "stragglers",
                                                 "rows", "cols", "dataset"};
  for (const auto& [key, value] : cfg.values())
    if (std::find(known.begin(), known.end(), key) == known.end())
      fail(ErrorCode::config_parse_error, "unknown glm key '" + key + "'");
  GlmConfig c;
  c.loss = parse_loss(cfg.get_or("loss", "logistic"));
  c.iterations = cfg.get_uint("iterations", 100);
  c.step = cfg.get_double("step", 0.5);
  c.frac_bits = static_cast<unsigned>(cfg.get_uint("frac_bits", 16));
  c.coding.K1 = cfg.get_uint("K1", 4);
  c.coding.m = cfg.get_uint("m", 2);
  c.coding.X = cfg.get_uint("X", 1);
  c.coding.N = cfg.get_uint("N", 0);
  c.seed = cfg.get_uint("seed", 1);
  const std::string modulus = cfg.get_or("modulus", "auto");
  c.modulus = modulus == "auto" ? 0 : static_cast<u64>(parse_int(modulus, "modulus"));
  // Demo defaults: worker 1 is Byzantine and worker 3 straggles.
  auto ids = [&](const std::string& key, std::set<std::size_t> fallback) {
    if (!cfg.has(key)) return fallback;
    std::set<std::size_t> out;
    for (auto v : cfg.get_int_list(key)) {
      if (v < 0) fail(ErrorCode::config_parse_error, key + " ids must be non-negative");
      out.insert(static_cast<std::size_t>(v));
    }
    return out;
  };
  c.byzantine = ids("byzantine", {1});
  c.stragglers = ids("stragglers", {3});
  if (c.step <= 0) fail(ErrorCode::config_parse_error, "step must be positive");
  return c;
}

std::vector<double> glm_gradient(const GlmModel& model, const std::vector<double>& w, const PhaseOptions& opt,
                                 double* loss_out, std::size_t* flagged) {
  const Dataset& d = *model.data;
  const FixedPointCodec& codec = *model.codec;
  const PrimeField& f = codec.field();
  if (w.size() != d.cols) fail(ErrorCode::shape_mismatch, "model length differs from feature count");

  Matrix u(d.cols, 1);
  for (std::size_t j = 0; j < d.cols; ++j) u(j, 0) = codec.encode(w[j]);
  std::vector<u64> x_mag(d.rows * d.cols);
  for (std::size_t i = 0; i < d.rows * d.cols; ++i) x_mag[i] = magnitude(f, codec.encode(d.x[i]));
  for (std::size_t i = 0; i < d.rows; ++i) {
    u128 bound = 0;
    for (std::size_t j = 0; j < d.cols; ++j) bound += static_cast<u128>(x_mag[i * d.cols + j]) * magnitude(f, u(j, 0));
    if (bound > codec.half_modulus()) fail(ErrorCode::codec_overflow, "X w exceeds the codec range");
  }

  PhaseOptions first = opt, second = opt;
  first.seed = opt.seed * 2;
  second.seed = opt.seed * 2 + 1;
  PhaseReport r1, r2;
  const Matrix xw = model.session->phase1(u, first, &r1);

  Matrix v(d.rows, 1);
  double total_loss = 0;
  for (std::size_t i = 0; i < d.rows; ++i) {
    const double ui = codec.decode(xw(i, 0), 2);
    total_loss += loss_value(model.loss, ui, d.y[i]);
    v(i, 0) = codec.encode(loss_derivative(model.loss, ui, d.y[i]));
  }
  for (std::size_t j = 0; j < d.cols; ++j) {
    u128 bound = 0;
    for (std::size_t i = 0; i < d.rows; ++i) bound += static_cast<u128>(x_mag[i * d.cols + j]) * magnitude(f, v(i, 0));
    if (bound > codec.half_modulus()) fail(ErrorCode::codec_overflow, "X^T f' exceeds the codec range");
  }
  const Matrix xtv = model.session->phase2(v, second, &r2);
  if (loss_out) *loss_out = total_loss / static_cast<double>(d.rows);
  if (flagged) *flagged += r1.flagged.size() + r2.flagged.size();

  std::vector<double> grad(d.cols);
  for (std::size_t j = 0; j < d.cols; ++j) grad[j] = codec.decode(xtv(j, 0), 2) / static_cast<double>(d.rows);
  return grad;
}

PrimeField glm_field(const GlmConfig& cfg) {
  if (cfg.modulus != 0) return PrimeField(cfg.modulus);
  return find_field_for_orders({1}, u64{1} << 61);
}

GlmTrace glm_train(const Dataset& d, const GlmConfig& cfg) {
  const PrimeField f = glm_field(cfg);
  const FixedPointCodec codec(f, cfg.frac_bits);
  Matrix a(d.rows, d.cols);
  for (std::size_t i = 0; i < d.rows * d.cols; ++i) a.data()[i] = codec.encode(d.x[i]);
  TwoPhaseParams coding = cfg.coding;
  if (coding.N == 0) {
    // One spare worker per straggler or Byzantine worker, at least one.
    coding.N = phase_threshold(coding) + std::max<std::size_t>(1, cfg.stragglers.size() + cfg.byzantine.size());
  }
  const CodedSession session(f, a, coding, cfg.seed);
  const GlmModel model{&d, &session, &codec, cfg.loss};

  GlmTrace trace;
  std::vector<double> w(d.cols, 0.0);
  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    trace.weights.push_back(w);
    PhaseOptions opt;
    opt.stragglers = cfg.stragglers;
    opt.byzantine = cfg.byzantine;
    opt.seed = cfg.seed * 1000003 + t;
    double loss = 0;
    const auto grad = glm_gradient(model, w, opt, &loss, &trace.flagged);
    trace.loss.push_back(loss);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= cfg.step * grad[j];
  }
  trace.weights.push_back(w);
  return trace;
}

GlmTrace glm_train_reference(const Dataset& d, const GlmConfig& cfg) {
  GlmTrace trace;
  std::vector<double> w(d.cols, 0.0);
  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    trace.weights.push_back(w);
    std::vector<double> grad(d.cols, 0.0);
    double loss = 0;
    for (std::size_t i = 0; i < d.rows; ++i) {
      double u = 0;
      for (std::size_t j = 0; j < d.cols; ++j) u += d.at(i, j) * w[j];
      loss += loss_value(cfg.loss, u, d.y[i]);
      const double g = loss_derivative(cfg.loss, u, d.y[i]);
      for (std::size_t j = 0; j < d.cols; ++j) grad[j] += d.at(i, j) * g;
    }
    trace.loss.push_back(loss / static_cast<double>(d.rows));
    for (std::size_t j = 0; j < d.cols; ++j) w[j] -= cfg.step * grad[j] / static_cast<double>(d.rows);
  }
  trace.weights.push_back(w);
  return trace;
}

std::string loss_trace_csv(const GlmTrace& coded, const GlmTrace& reference) {
  std::ostringstream out;
  out << "iteration,loss,reference_loss,max_weight_diff\n";
  char buf[160];
  for (std::size_t t = 0; t < coded.loss.size(); ++t) {
    double diff = 0;
    if (t < reference.weights.size()) {
      for (std::size_t j = 0; j < coded.weights[t].size(); ++j)
        diff = std::max(diff, std::fabs(coded.weights[t][j] - reference.weights[t][j]));
    }
    const double ref = t < reference.loss.size() ? reference.loss[t] : 0.0;
    std::snprintf(buf, sizeof buf, "%zu,%.12f,%.12f,%.3e\n", t, coded.loss[t], ref, diff);
    out << buf;
  }
  return out.str();
}

}  // namespace cdmm
