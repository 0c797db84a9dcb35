#include "gouda/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "gouda/error.hpp"
#include "gouda/evaluation.hpp"

namespace gouda {
namespace {

constexpr std::uint64_t kTrainingStream = 11;

struct Projected {
  Vector value;
  double norm;
};

Projected project(const LinearAdapter& adapter, const Vector& x) {
  Vector y = adapter.weights * x;
  const double norm = y.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error("adapter collapsed embedding");
  return {std::move(y), norm};
}

double cosine_of(const Projected& u, const Projected& v) { return u.value.dot(v.value) / (u.norm * v.norm); }

// d(1 - cos(u, v)) / du
Vector distance_grad(const Projected& u, const Projected& v) {
  const double cos = cosine_of(u, v);
  return -(v.value / (u.norm * v.norm) - cos * u.value / (u.norm * u.norm));
}

struct QuadTerms {
  double gouda = 0.0;
  double ssl = 0.0;
};

QuadTerms hinge_terms(const Quadruple& q, const LinearAdapter& adapter, double margin) {
  const Projected a = project(adapter, q.anchor);
  const Projected aug = project(adapter, q.augmented);
  const Projected p = project(adapter, q.positive);
  const Projected n = project(adapter, q.negative);
  const double d_an = 1.0 - cosine_of(a, n);
  return {std::max(0.0, (1.0 - cosine_of(a, p)) - d_an + margin),
          std::max(0.0, (1.0 - cosine_of(a, aug)) - d_an + margin)};
}

void check_batch(const TripletBatch& batch, const LinearAdapter& adapter) {
  const Eigen::Index dim = adapter.dim();
  if (adapter.weights.cols() != dim) throw Error("adapter weights must be square");
  for (const auto& q : batch) {
    if (q.anchor.size() != dim || q.augmented.size() != dim || q.positive.size() != dim ||
        q.negative.size() != dim) {
      throw Error("batch embedding dimension does not match adapter");
    }
  }
}

}  // namespace

Matrix apply_adapter(const LinearAdapter& adapter, const Matrix& embeddings) {
  if (embeddings.cols() != adapter.weights.cols()) throw Error("apply_adapter: dimension mismatch");
  Matrix out = embeddings * adapter.weights.transpose();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw Error("adapter collapsed embedding");
  }
  return out;
}

void LossConfig::validate() const {
  if (!(margin >= 0.0)) throw ConfigError("loss.margin must be >= 0");
  if (!(gouda_weight >= 0.0)) throw ConfigError("loss.gouda_weight must be >= 0");
  if (!(ssl_weight >= 0.0)) throw ConfigError("loss.ssl_weight must be >= 0");
}

double gouda_loss(const TripletBatch& batch, const LinearAdapter& adapter, const LossConfig& cfg) {
  check_batch(batch, adapter);
  double sum = 0.0;
  for (const auto& q : batch) sum += hinge_terms(q, adapter, cfg.margin).gouda;
  return sum;
}

double ssl_loss(const TripletBatch& batch, const LinearAdapter& adapter, const LossConfig& cfg) {
  check_batch(batch, adapter);
  double sum = 0.0;
  for (const auto& q : batch) sum += hinge_terms(q, adapter, cfg.margin).ssl;
  return sum;
}

double total_loss(const TripletBatch& batch, const LinearAdapter& adapter, const LossConfig& cfg) {
  check_batch(batch, adapter);
  double gouda = 0.0;
  double ssl = 0.0;
  for (const auto& q : batch) {
    const QuadTerms t = hinge_terms(q, adapter, cfg.margin);
    gouda += t.gouda;
    ssl += t.ssl;
  }
  return cfg.gouda_weight * gouda + cfg.ssl_weight * ssl;
}

Matrix loss_gradient(const TripletBatch& batch, const LinearAdapter& adapter, const LossConfig& cfg) {
  check_batch(batch, adapter);
  Matrix grad = Matrix::Zero(adapter.dim(), adapter.dim());
  for (const auto& q : batch) {
    const Projected a = project(adapter, q.anchor);
    const Projected aug = project(adapter, q.augmented);
    const Projected p = project(adapter, q.positive);
    const Projected n = project(adapter, q.negative);
    const double d_an = 1.0 - cosine_of(a, n);

    // Accumulates weight * (dD(a, x) - dD(a, n)) for an active hinge.
    auto accumulate = [&](const Projected& x, const Vector& x_raw, double weight) {
      const double hinge = (1.0 - cosine_of(a, x)) - d_an + cfg.margin;
      if (!(hinge > 0.0) || weight == 0.0) return;
      const Vector ga = distance_grad(a, x) - distance_grad(a, n);
      grad.noalias() += weight * ga * q.anchor.transpose();
      grad.noalias() += weight * distance_grad(x, a) * x_raw.transpose();
      grad.noalias() -= weight * distance_grad(n, a) * q.negative.transpose();
    };
    accumulate(p, q.positive, cfg.gouda_weight);
    accumulate(aug, q.augmented, cfg.ssl_weight);
  }
  return grad;
}

void AdamParams::validate() const {
  if (!(lr >= 0.0)) throw ConfigError("optim.lr must be >= 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("optim.weight_decay must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("optim.beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("optim.beta2 must lie in [0, 1)");
  if (!(eps > 0.0)) throw ConfigError("optim.eps must be > 0");
}

AdamState AdamState::zeros(Eigen::Index rows, Eigen::Index cols, const AdamParams& params) {
  return {params, Matrix::Zero(rows, cols), Matrix::Zero(rows, cols), 0};
}

void adam_step(AdamState& state, Matrix& weights, const Matrix& grad) {
  if (grad.rows() != weights.rows() || grad.cols() != weights.cols() ||
      state.first_moment.rows() != weights.rows() || state.first_moment.cols() != weights.cols()) {
    throw Error("adam_step: shape mismatch");
  }
  if (!grad.allFinite()) throw Error("diverged");
  const AdamParams& hp = state.params;
  const Matrix g = grad + hp.weight_decay * weights;
  state.first_moment = hp.beta1 * state.first_moment + (1.0 - hp.beta1) * g;
  state.second_moment = hp.beta2 * state.second_moment + (1.0 - hp.beta2) * g.cwiseProduct(g);
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(hp.beta1, t);
  const double bias2 = 1.0 - std::pow(hp.beta2, t);
  weights.array() -= hp.lr * (state.first_moment.array() / bias1) /
                     ((state.second_moment.array() / bias2).sqrt() + hp.eps);
}

std::vector<std::size_t> similar_neighbor_counts(const Matrix& embeddings, std::span<const ViewAngle> views,
                                                 std::size_t k, double similar_threshold, AngleMode mode) {
  const auto n = static_cast<std::size_t>(embeddings.rows());
  if (views.size() != n) throw Error("stopping criterion: views and embeddings disagree in size");
  if (n == 0 || k > n - 1) throw Error("stopping criterion: K must be at most N_val - 1");
  const DistanceMatrix d = distance_matrix(embeddings);
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t j : knn(d, a, k)) {
      if (circular_view_distance(views[a], views[j], mode) < similar_threshold) ++counts[a];
    }
  }
  return counts;
}

double stopping_criterion(const Matrix& embeddings, std::span<const ViewAngle> views, std::size_t k,
                          double similar_threshold, AngleMode mode) {
  const auto counts = similar_neighbor_counts(embeddings, views, k, similar_threshold, mode);
  double sum = 0.0;
  for (std::size_t c : counts) sum += static_cast<double>(c);
  return sum / static_cast<double>(counts.size());
}

void AdaptOptions::validate() const {
  mining.validate();
  schedule.validate();
  loss.validate();
  adam.validate();
  if (sc_k < 1) throw ConfigError("sc.k must be >= 1");
  if (checkpoint_every < 1) throw ConfigError("sc.checkpoint_every must be >= 1");
  if (!(augment.min_fraction > 0.0 && augment.min_fraction <= 1.0)) {
    throw ConfigError("adapt.augment_min_fraction must lie in (0, 1]");
  }
}

DataSplit split_validation(std::span<const GaitRecord> records, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("validation fraction must lie in (0, 1)");
  DataSplit out;
  const bool labeled = std::all_of(records.begin(), records.end(), [](const GaitRecord& r) { return r.identity.has_value(); });
  if (labeled) {
    std::map<std::string, std::size_t> order;
    for (const auto& r : records) order.emplace(*r.identity, order.size());
    const std::size_t n_ids = order.size();
    if (n_ids < 2) throw Error("validation split needs at least two identities");
    auto held = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n_ids)));
    held = std::clamp<std::size_t>(held, 1, n_ids - 1);
    for (const auto& r : records) {
      (order.at(*r.identity) >= n_ids - held ? out.validation : out.train).push_back(r);
    }
  } else {
    if (records.size() < 2) throw Error("validation split needs at least two records");
    auto held = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(records.size())));
    held = std::clamp<std::size_t>(held, 1, records.size() - 1);
    out.train.assign(records.begin(), records.end() - static_cast<std::ptrdiff_t>(held));
    out.validation.assign(records.end() - static_cast<std::ptrdiff_t>(held), records.end());
  }
  return out;
}

AdaptResult adapt(std::span<const GaitRecord> train, std::span<const GaitRecord> validation,
                  const AdaptOptions& options) {
  options.validate();
  if (train.empty()) throw Error("adapt: empty training set");
  if (validation.empty()) throw Error("adapt: empty validation set");
  for (const auto& r : train) {
    validate_record(r);
    if (!r.frames) throw Error("adapt: record '" + r.record_id + "' has no frames; augmentation requires frame latents");
  }

  const Matrix train_emb = stack_embeddings(train);
  const Matrix val_emb = stack_embeddings(validation);
  if (val_emb.cols() != train_emb.cols()) throw Error("adapt: validation dimension differs from training");
  std::vector<ViewAngle> train_views;
  for (const auto& r : train) train_views.push_back(r.view);
  std::vector<ViewAngle> val_views;
  for (const auto& r : validation) val_views.push_back(r.view);

  std::optional<std::vector<std::string>> labels;
  if (std::all_of(train.begin(), train.end(), [](const GaitRecord& r) { return r.identity.has_value(); })) {
    labels = identity_labels(train);
  }
  if (options.oracle_filter && !labels) throw Error("adapt: oracle filtering requires identity labels");

  const Eigen::Index dim = train_emb.cols();
  LinearAdapter adapter = LinearAdapter::identity(dim);
  AdamState adam = AdamState::zeros(dim, dim, options.adam);
  Rng rng(options.seed, {kTrainingStream});

  std::vector<Checkpoint> checkpoints;
  TrainingTrace trace;
  auto take_checkpoint = [&](std::size_t iteration, std::size_t stage) {
    if (!checkpoints.empty() && checkpoints.back().iteration == iteration) return;
    const double sc = stopping_criterion(apply_adapter(adapter, val_emb), val_views, options.sc_k,
                                         options.mining.similar_threshold, options.mining.angle_mode);
    checkpoints.push_back({adapter, sc, iteration, stage});
    trace.checkpoints.push_back({iteration, stage, sc});
  };

  std::size_t iteration = 0;
  take_checkpoint(0, 0);
  const auto& stages = options.schedule.stage_q_percent;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const std::size_t stage = s + 1;
    const DistanceMatrix d = distance_matrix(apply_adapter(adapter, train_emb));
    std::vector<Triplet> valid = select_triplets(d, train_views, options.mining);
    if (options.oracle_filter) valid = oracle_filter(valid, *labels);
    std::vector<Triplet> selected = top_q(valid, stages[s]);

    StageTrace st;
    st.q = stages[s];
    st.n_valid = valid.size();
    st.n_selected = selected.size();
    st.iterations = stage_iterations(selected.size(), options.schedule);
    if (labels) {
      st.correct_triplet_rate = correctness_rates(selected, *labels).triplet_rate;
      st.valid_correct_rate = correctness_rates(valid, *labels).triplet_rate;
    }
    if (selected.empty()) {
      if (s == 0) {
        std::ostringstream msg;
        msg << "no valid triplets; check thresholds (similar_threshold=" << options.mining.similar_threshold
            << ", cross_threshold=" << options.mining.cross_threshold << ", margin=" << options.mining.margin << ")";
        throw Error(msg.str());
      }
      st.warning = "stage " + std::to_string(stage) + " selected no triplets; skipped";
      trace.stages.push_back(std::move(st));
      continue;
    }

    for (std::size_t it = 0; it < st.iterations; ++it) {
      TripletBatch batch;
      batch.reserve(options.schedule.batch_triplets);
      for (std::size_t b = 0; b < options.schedule.batch_triplets; ++b) {
        const Triplet& t = selected[rng.uniform_index(0, selected.size() - 1)];
        auto [anchor, augmented] = augment(train[t.anchor], rng, options.augment);
        batch.push_back({std::move(anchor), std::move(augmented),
                         train_emb.row(static_cast<Eigen::Index>(t.positive)).transpose(),
                         train_emb.row(static_cast<Eigen::Index>(t.negative)).transpose()});
      }
      trace.loss.push_back(total_loss(batch, adapter, options.loss));
      adam_step(adam, adapter.weights, loss_gradient(batch, adapter, options.loss));
      ++iteration;
      if (iteration % options.checkpoint_every == 0) take_checkpoint(iteration, stage);
    }
    take_checkpoint(iteration, stage);
    st.selected = std::move(selected);
    trace.stages.push_back(std::move(st));
  }

  const auto best = std::min_element(checkpoints.begin(), checkpoints.end(),
                                     [](const Checkpoint& x, const Checkpoint& y) { return x.sc < y.sc; });
  trace.chosen = {best->iteration, best->stage, best->sc};
  return {best->adapter, std::move(trace)};
}

}  // namespace gouda
