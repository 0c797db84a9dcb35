#include "gouda/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "gouda/error.hpp"

namespace gouda {
namespace {

std::optional<double> percent(std::size_t hits, std::size_t total) {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

const std::string& label_at(std::span<const std::string> labels, std::size_t index) {
  if (index >= labels.size()) throw Error("missing identity label for index " + std::to_string(index));
  return labels[index];
}

Rank1Report rank1_impl(std::span<const GaitRecord> records, const Matrix& embeddings) {
  const std::vector<std::string> labels = identity_labels(records);

  std::set<double> view_set;
  for (const auto& r : records) view_set.insert(r.view.degrees());
  if (view_set.size() < 2) throw Error("rank1_cross_view: need at least two views");
  Rank1Report report;
  report.views.assign(view_set.begin(), view_set.end());
  const std::size_t nv = report.views.size();
  auto view_index = [&](const GaitRecord& r) {
    return static_cast<std::size_t>(std::lower_bound(report.views.begin(), report.views.end(), r.view.degrees()) -
                                    report.views.begin());
  };

  // gallery[v] lists record indices; probes carry their view index.
  std::vector<std::vector<std::size_t>> gallery(nv);
  std::vector<std::pair<std::size_t, std::size_t>> probes;
  std::set<std::pair<std::string, std::size_t>> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::size_t v = view_index(records[i]);
    if (seen.emplace(labels[i], v).second) {
      gallery[v].push_back(i);
    } else {
      probes.emplace_back(i, v);
    }
  }

  Vector norms = embeddings.rowwise().norm();
  std::vector<std::vector<std::size_t>> hits(nv, std::vector<std::size_t>(nv, 0));
  std::vector<std::size_t> probe_count(nv, 0);
  for (const auto& [pi, pv] : probes) {
    ++probe_count[pv];
    for (std::size_t gv = 0; gv < nv; ++gv) {
      double best = 0.0;
      std::size_t best_index = 0;
      bool found = false;
      for (std::size_t gi : gallery[gv]) {
        const double dist = 1.0 - embeddings.row(static_cast<Eigen::Index>(pi)).dot(embeddings.row(static_cast<Eigen::Index>(gi))) /
                                      (norms(static_cast<Eigen::Index>(pi)) * norms(static_cast<Eigen::Index>(gi)));
        if (!found || dist < best) {
          best = dist;
          best_index = gi;
          found = true;
        }
      }
      if (found && labels[best_index] == labels[pi]) ++hits[pv][gv];
    }
  }

  report.per_pair.assign(nv, std::vector<std::optional<double>>(nv));
  double cross_sum = 0.0;
  double same_sum = 0.0;
  std::size_t cross_n = 0;
  std::size_t same_n = 0;
  for (std::size_t a = 0; a < nv; ++a) {
    for (std::size_t b = 0; b < nv; ++b) {
      if (probe_count[a] == 0 || gallery[b].empty()) continue;
      const double value = *percent(hits[a][b], probe_count[a]);
      report.per_pair[a][b] = value;
      if (a == b) {
        same_sum += value;
        ++same_n;
      } else {
        cross_sum += value;
        ++cross_n;
      }
    }
  }
  if (cross_n > 0) report.overall_cross_view = cross_sum / static_cast<double>(cross_n);
  if (same_n > 0) report.identical_view_mean = same_sum / static_cast<double>(same_n);
  return report;
}

}  // namespace

std::vector<std::string> identity_labels(std::span<const GaitRecord> records) {
  std::vector<std::string> labels;
  labels.reserve(records.size());
  for (const auto& r : records) {
    if (!r.identity) throw Error("missing identity label for record '" + r.record_id + "'");
    labels.push_back(*r.identity);
  }
  return labels;
}

Rank1Report rank1_cross_view(std::span<const GaitRecord> records) {
  return rank1_impl(records, stack_embeddings(records));
}

Rank1Report rank1_cross_view(std::span<const GaitRecord> records, const LinearAdapter& adapter) {
  return rank1_impl(records, apply_adapter(adapter, stack_embeddings(records)));
}

CorrectnessRates correctness_rates(std::span<const Triplet> triplets, std::span<const std::string> labels) {
  std::size_t pos = 0;
  std::size_t neg = 0;
  std::size_t both = 0;
  for (const auto& t : triplets) {
    const auto& la = label_at(labels, t.anchor);
    const bool p_ok = la == label_at(labels, t.positive);
    const bool n_ok = la != label_at(labels, t.negative);
    pos += p_ok;
    neg += n_ok;
    both += p_ok && n_ok;
  }
  return {triplets.size(), percent(both, triplets.size()), percent(pos, triplets.size()),
          percent(neg, triplets.size())};
}

CorrectnessReport triplet_correctness(std::span<const Triplet> triplets, std::span<const std::string> labels,
                                      std::span<const std::size_t> stages) {
  if (!stages.empty() && stages.size() != triplets.size()) {
    throw Error("triplet_correctness: stage tags must match triplets");
  }
  CorrectnessReport report;
  report.overall = correctness_rates(triplets, labels);
  if (stages.empty()) return report;
  std::map<std::size_t, std::vector<Triplet>> by_stage;
  for (std::size_t i = 0; i < triplets.size(); ++i) by_stage[stages[i]].push_back(triplets[i]);
  for (const auto& [stage, group] : by_stage) report.per_stage.push_back({stage, correctness_rates(group, labels)});
  return report;
}

std::vector<Triplet> oracle_filter(std::span<const Triplet> triplets, std::span<const std::string> labels) {
  std::vector<Triplet> out;
  for (const auto& t : triplets) {
    const auto& la = label_at(labels, t.anchor);
    if (la == label_at(labels, t.positive) && la != label_at(labels, t.negative)) out.push_back(t);
  }
  return out;
}

LinearAdapter supervised_adapt(std::span<const GaitRecord> records, const SupervisedOptions& options) {
  options.adam.validate();
  if (options.batch_triplets < 1) throw ConfigError("supervised batch must be >= 1");
  const std::vector<std::string> labels = identity_labels(records);
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  if (members.size() < 2) throw Error("supervised triplets require >=2 identities");

  std::vector<std::size_t> anchors;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (members[labels[i]].size() >= 2) anchors.push_back(i);
  }
  if (anchors.empty()) throw Error("supervised triplets require an identity with >=2 records");

  const Matrix emb = stack_embeddings(records);
  LinearAdapter adapter = LinearAdapter::identity(emb.cols());
  if (options.iterations == 0) return adapter;

  AdamState adam = AdamState::zeros(emb.cols(), emb.cols(), options.adam);
  const LossConfig loss{options.margin, 1.0, 0.0};
  Rng rng(options.seed, {23});
  auto row = [&](std::size_t i) -> Vector { return emb.row(static_cast<Eigen::Index>(i)).transpose(); };
  const std::size_t n = labels.size();
  for (std::size_t it = 0; it < options.iterations; ++it) {
    TripletBatch batch;
    batch.reserve(options.batch_triplets);
    for (std::size_t b = 0; b < options.batch_triplets; ++b) {
      const std::size_t a = anchors[rng.uniform_index(0, anchors.size() - 1)];
      const auto& same = members[labels[a]];
      std::size_t p = a;
      while (p == a) p = same[rng.uniform_index(0, same.size() - 1)];
      const std::size_t others = n - same.size();
      // The k-th record (in index order) whose label differs from the anchor's.
      std::size_t k = rng.uniform_index(0, others - 1);
      std::size_t neg = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == labels[a]) continue;
        if (k-- == 0) {
          neg = i;
          break;
        }
      }
      batch.push_back({row(a), row(a), row(p), row(neg)});
    }
    adam_step(adam, adapter.weights, loss_gradient(batch, adapter, loss));
  }
  return adapter;
}

ViewConfusion positive_view_confusion(std::span<const Triplet> triplets, std::span<const ViewAngle> views,
                                      double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 360.0)) throw Error("positive_view_confusion: bin width must lie in (0, 360]");
  const auto bins = static_cast<std::size_t>(std::ceil(360.0 / bin_width));
  auto bin_of = [&](std::size_t index) {
    if (index >= views.size()) throw Error("positive_view_confusion: triplet index out of range");
    return std::min(static_cast<std::size_t>(views[index].degrees() / bin_width), bins - 1);
  };
  std::vector<std::vector<double>> counts(bins, std::vector<double>(bins, 0.0));
  std::vector<std::size_t> totals(bins, 0);
  for (const auto& t : triplets) {
    const std::size_t row = bin_of(t.anchor);
    counts[row][bin_of(t.positive)] += 1.0;
    ++totals[row];
  }
  ViewConfusion out;
  out.bin_width = bin_width;
  out.rows.resize(bins);
  for (std::size_t r = 0; r < bins; ++r) {
    if (totals[r] == 0) continue;
    for (double& c : counts[r]) c /= static_cast<double>(totals[r]);
    out.rows[r] = std::move(counts[r]);
  }
  return out;
}

NeighborhoodHistogram view_neighborhood_histogram(std::span<const GaitRecord> records, const LinearAdapter& adapter,
                                                  std::size_t k, double similar_threshold, AngleMode mode) {
  std::vector<ViewAngle> views;
  for (const auto& r : records) views.push_back(r.view);
  const Matrix emb = apply_adapter(adapter, stack_embeddings(records));
  const auto per_record = similar_neighbor_counts(emb, views, k, similar_threshold, mode);
  NeighborhoodHistogram out;
  out.counts.assign(k + 1, 0);
  double sum = 0.0;
  for (std::size_t c : per_record) {
    ++out.counts[c];
    sum += static_cast<double>(c);
  }
  out.sc = sum / static_cast<double>(per_record.size());
  return out;
}

}  // namespace gouda
