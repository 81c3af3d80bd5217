#pragma once

#include <set>
#include <string>
#include <vector>

#include "cdmm/decoding.hpp"

namespace cdmm {

/// Signed fixed point with `frac_bits` fraction bits embedded in F_p.
class FixedPointCodec {
 public:
  FixedPointCodec(const PrimeField& f, unsigned frac_bits);

  u64 encode(double v) const;
  /// Real value of a field element carrying `levels` multiplications of scale.
  double decode(u64 v, unsigned levels = 1) const;
  double scale() const { return scale_; }
  unsigned frac_bits() const { return bits_; }
  /// Largest |integer| that may appear after one multiplication level.
  u64 half_modulus() const { return field_.modulus() / 2; }
  const PrimeField& field() const { return field_; }

 private:
  PrimeField field_;
  unsigned bits_;
  double scale_;
};

/// Block counts for the two-phase workload: A is K1 x m blocks, the right
/// factor U is m x s blocks and the left factor V is K1 x s blocks.
struct TwoPhaseParams {
  std::size_t K1 = 1;
  std::size_t m = 1;
  std::size_t s = 1;
  std::size_t X = 0;
  std::size_t N = 0;  // 0: threshold plus one
};

struct CheckKeys {
  std::vector<u64> r1;  // length a/K1
  std::vector<u64> r2;  // length b/m
  std::vector<u64> s1;  // r1 * A_i
  std::vector<u64> s2;  // r2 * A_i^T
};

struct PhaseOptions {
  std::set<std::size_t> stragglers;
  std::set<std::size_t> byzantine;
  bool verify = true;
  u64 seed = 0;
};

struct PhaseReport {
  std::vector<std::size_t> flagged;
  std::size_t responses_used = 0;
  u64 max_worker_macs = 0;
};

/// Layout for A*U (row-ordered) and for A^T*V (column-ordered, reusing the
/// encoded A shares transposed).
ExponentLayout phase1_layout(const TwoPhaseParams& p);
ExponentLayout phase2_layout(const TwoPhaseParams& p);
/// Responses needed by the more demanding of the two phases.
std::size_t phase_threshold(const TwoPhaseParams& p);

/// Encodes A once per worker, keeps the shares and Freivalds keys, and
/// serves both multiplication phases from that single cached copy.
class CodedSession {
 public:
  CodedSession(const PrimeField& f, const Matrix& a, const TwoPhaseParams& params, u64 seed);

  /// A * U, verified and decoded. Throws undecodable if too few responses pass.
  Matrix phase1(const Matrix& u, const PhaseOptions& opt, PhaseReport* report = nullptr) const;
  /// A^T * V from the same cached shares.
  Matrix phase2(const Matrix& v, const PhaseOptions& opt, PhaseReport* report = nullptr) const;

  const PrimeField& field() const { return field_; }
  std::size_t workers() const { return points_.size(); }
  const std::vector<u64>& points() const { return points_; }
  const std::vector<Matrix>& shares() const { return shares_; }
  const CheckKeys& keys(std::size_t worker) const { return keys_.at(worker); }
  const std::vector<Matrix>& a_noise() const { return noise_; }
  /// Number of encoded copies of A ever materialized (one per worker).
  std::size_t a_encodings() const { return a_encodings_; }
  std::size_t storage_per_worker() const { return shares_.empty() ? 0 : shares_[0].size(); }
  const ExponentLayout& layout1() const { return layout1_; }
  const ExponentLayout& layout2() const { return layout2_; }

 private:
  PrimeField field_;
  TwoPhaseParams params_;
  std::size_t rows_ = 0, cols_ = 0;  // original A shape
  std::size_t padded_rows_ = 0, padded_cols_ = 0;
  ExponentLayout layout1_, layout2_;
  std::vector<u64> points_;
  std::vector<Matrix> noise_;
  std::vector<Matrix> shares_;
  std::vector<CheckKeys> keys_;
  std::size_t a_encodings_ = 0;
};

/// Whether the transposed row-ordered share of A equals the column-ordered
/// encoding of A^T with transposed noise at every point.
bool transpose_reuse_check(const PrimeField& f, const ExponentLayout& a_layout,
                           const ExponentLayout& at_layout, const Matrix& a,
                           const std::vector<Matrix>& noise, const std::vector<u64>& points);

enum class GlmLoss { linear, logistic };
const char* to_string(GlmLoss loss);
GlmLoss parse_loss(const std::string& name);

struct Dataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> x;  // row-major features
  std::vector<double> y;

  double at(std::size_t i, std::size_t j) const { return x[i * cols + j]; }
};

/// Uniform(-1, 1) features on the 2^-16 grid; labels from a planted model.
Dataset make_synthetic_dataset(std::size_t rows, std::size_t cols, GlmLoss loss, u64 seed);
Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const Dataset& d);

struct GlmConfig {
  GlmLoss loss = GlmLoss::logistic;
  std::size_t iterations = 100;
  double step = 0.5;
  unsigned frac_bits = 16;
  TwoPhaseParams coding;  // N = 0: threshold plus one spare per faulty worker
  std::set<std::size_t> stragglers;
  std::set<std::size_t> byzantine;
  u64 seed = 1;
  u64 modulus = 0;  // 0: smallest prime >= 2^61
};

GlmConfig glm_config_from(const Config& cfg);

struct GlmTrace {
  std::vector<std::vector<double>> weights;  // weights[t] before update t; size iterations + 1
  std::vector<double> loss;                  // loss at weights[t], t < iterations
  std::size_t flagged = 0;                   // Byzantine responses rejected over the run
};

double loss_value(GlmLoss loss, double u, double y);
double loss_derivative(GlmLoss loss, double u, double y);

struct GlmModel {
  const Dataset* data = nullptr;
  const CodedSession* session = nullptr;
  const FixedPointCodec* codec = nullptr;
  GlmLoss loss = GlmLoss::logistic;
};

/// (1/M) X^T f'(w) through the two coded phases.
std::vector<double> glm_gradient(const GlmModel& model, const std::vector<double>& w,
                                 const PhaseOptions& opt, double* loss_out = nullptr,
                                 std::size_t* flagged = nullptr);
GlmTrace glm_train(const Dataset& d, const GlmConfig& cfg);
/// Same iteration in plain double precision.
GlmTrace glm_train_reference(const Dataset& d, const GlmConfig& cfg);
PrimeField glm_field(const GlmConfig& cfg);

std::string loss_trace_csv(const GlmTrace& coded, const GlmTrace& reference);

}  // namespace cdmm
