#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gouda/adapter.hpp"
#include "gouda/embedding.hpp"
#include "gouda/mining.hpp"
#include "gouda/synthetic.hpp"

namespace gouda {

/// One training example: the anchor, a second augmentation of the anchor,
/// the mined positive and the mined negative. All are raw backbone
/// embeddings; the adapter is applied inside the losses.
struct Quadruple {
  Vector anchor;
  Vector augmented;
  Vector positive;
  Vector negative;
};

using TripletBatch = std::vector<Quadruple>;

struct LossConfig {
  double margin = 0.2;
  double gouda_weight = 1.0;  // 0 reproduces the "without view-triplet loss" ablation
  double ssl_weight = 1.0;    // 0 reproduces the "without self-supervision" ablation

  void validate() const;
};

/// sum_i [d(Wa, Wp) - d(Wa, Wn) + m]_+
double gouda_loss(const TripletBatch& batch, const LinearAdapter& adapter, const LossConfig& cfg);
/// sum_i [d(Wa, W a~) - d(Wa, Wn) + m]_+
double ssl_loss(const TripletBatch& batch, const LinearAdapter& adapter, const LossConfig& cfg);
/// gouda_weight * gouda_loss + ssl_weight * ssl_loss.
double total_loss(const TripletBatch& batch, const LinearAdapter& adapter, const LossConfig& cfg);

/// Analytic dW of total_loss. A hinge whose argument is exactly zero
/// contributes nothing.
Matrix loss_gradient(const TripletBatch& batch, const LinearAdapter& adapter, const LossConfig& cfg);

struct AdamParams {
  double lr = 1e-5;
  double weight_decay = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

struct AdamState {
  AdamParams params;
  Matrix first_moment;
  Matrix second_moment;
  std::size_t step = 0;

  static AdamState zeros(Eigen::Index rows, Eigen::Index cols, const AdamParams& params);
};

/// Adam with L2 weight decay folded into the gradient before the moment
/// updates (g' = g + wd * W), bias-corrected. Throws "diverged" on a
/// non-finite gradient.
void adam_step(AdamState& state, Matrix& weights, const Matrix& grad);

/// Per-sample number of similar-view samples (< similar_threshold degrees)
/// among the sample's k cosine nearest neighbours, self excluded.
std::vector<std::size_t> similar_neighbor_counts(const Matrix& embeddings, std::span<const ViewAngle> views,
                                                 std::size_t k, double similar_threshold, AngleMode mode);

/// Mean of similar_neighbor_counts; lies in [0, k]. Lower means views are
/// better mixed within neighbourhoods.
double stopping_criterion(const Matrix& embeddings, std::span<const ViewAngle> views, std::size_t k,
                          double similar_threshold, AngleMode mode);

struct Checkpoint {
  LinearAdapter adapter;
  double sc = 0.0;
  std::size_t iteration = 0;
  std::size_t stage = 0;  // 0 = before training
};

struct StageTrace {
  double q = 0.0;
  std::size_t n_valid = 0;
  std::size_t n_selected = 0;
  std::size_t iterations = 0;
  std::optional<double> correct_triplet_rate;  // over selected triplets, when labels exist
  std::optional<double> valid_correct_rate;    // over all valid triplets, when labels exist
  std::optional<std::string> warning;
  std::vector<Triplet> selected;               // indices into the training records
};

struct CheckpointSummary {
  std::size_t iteration = 0;
  std::size_t stage = 0;
  double sc = 0.0;
};

struct TrainingTrace {
  std::vector<StageTrace> stages;
  std::vector<double> loss;
  std::vector<CheckpointSummary> checkpoints;
  CheckpointSummary chosen;
};

struct AdaptOptions {
  MiningConfig mining;
  CurriculumSchedule schedule;
  LossConfig loss;
  AdamParams adam;
  AugmentPolicy augment;
  std::size_t sc_k = 5;
  std::size_t checkpoint_every = 200;
  std::uint64_t seed = 7;
  // Keep only identity-correct triplets (needs labels). Upper-bound baseline.
  bool oracle_filter = false;

  void validate() const;
};

struct AdaptResult {
  LinearAdapter adapter;  // checkpoint with minimal stopping criterion
  TrainingTrace trace;
};

struct DataSplit {
  std::vector<GaitRecord> train;
  std::vector<GaitRecord> validation;
};

/// Holds out the last `fraction` of identities (order of first appearance)
/// for validation, at least one. Without labels the last fraction of records
/// is held out instead.
DataSplit split_validation(std::span<const GaitRecord> records, double fraction = 0.1);

/// Curriculum adaptation. Each stage re-mines triplets on the current
/// adapter's training embeddings, keeps the top q%, and trains for
/// stage_iterations() Adam steps on batches drawn uniformly with replacement.
/// Checkpoints are scored on the validation set every checkpoint_every
/// iterations, at each stage boundary, and once before training.
///
/// Throws "no valid triplets; check thresholds" if the first stage selects
/// nothing. Later empty stages are skipped with a warning in the trace.
AdaptResult adapt(std::span<const GaitRecord> train, std::span<const GaitRecord> validation,
                  const AdaptOptions& options);

}  // namespace gouda
