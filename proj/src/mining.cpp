#include "gouda/mining.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gouda/error.hpp"

namespace gouda {

void MiningConfig::validate() const {
  if (!(similar_threshold > 0.0)) throw ConfigError("mining.similar_threshold must be > 0");
  if (!(similar_threshold <= cross_threshold)) {
    throw ConfigError("mining.similar_threshold must not exceed mining.cross_threshold");
  }
  if (!(margin >= 0.0)) throw ConfigError("mining.margin must be >= 0");
}

void CurriculumSchedule::validate() const {
  if (stage_q_percent.empty()) throw ConfigError("schedule.q must list at least one stage");
  double previous = 0.0;
  for (double q : stage_q_percent) {
    if (!(q > 0.0 && q <= 100.0)) throw ConfigError("schedule.q entries must lie in (0, 100]");
    // Repeated values are allowed so the "no curriculum" ablation (100 at
    // every stage) is expressible.
    if (q < previous) throw ConfigError("schedule.q must be non-decreasing");
    previous = q;
  }
  if (stage_q_percent.back() != 100.0) throw ConfigError("schedule.q must end at 100");
  if (replay_factor < 1) throw ConfigError("schedule.replay must be >= 1");
  if (batch_triplets < 1) throw ConfigError("schedule.batch must be >= 1");
}

ViewPartition partition_views(std::size_t anchor, std::span<const ViewAngle> views,
                              const MiningConfig& cfg) {
  if (anchor >= views.size()) throw Error("partition_views: anchor index out of range");
  ViewPartition out;
  for (std::size_t j = 0; j < views.size(); ++j) {
    if (j == anchor) continue;
    const double dist = circular_view_distance(views[anchor], views[j], cfg.angle_mode);
    if (dist < cfg.similar_threshold) {
      out.similar.push_back(j);
    } else if (dist > cfg.cross_threshold) {
      out.cross.push_back(j);
    }
  }
  return out;
}

std::vector<Triplet> select_triplets(const DistanceMatrix& d, std::span<const ViewAngle> views,
                                     const MiningConfig& cfg) {
  if (views.size() != d.size()) throw Error("select_triplets: views and distance matrix disagree in size");
  std::vector<Triplet> out;
  for (std::size_t a = 0; a < d.size(); ++a) {
    const ViewPartition part = partition_views(a, views, cfg);
    if (part.cross.empty() || part.similar.empty()) continue;

    std::size_t p = part.cross.front();
    for (std::size_t j : part.cross) {
      if (d(a, j) < d(a, p)) p = j;
    }
    const double bound = d(a, p) + cfg.margin;

    bool found = false;
    std::size_t n = 0;
    double nearest_similar = d(a, part.similar.front());
    for (std::size_t j : part.similar) {
      nearest_similar = std::min(nearest_similar, d(a, j));
      if (d(a, j) < bound && (!found || d(a, j) > d(a, n))) {
        n = j;
        found = true;
      }
    }
    if (!found) continue;
    if (!(nearest_similar < d(a, n))) continue;
    out.push_back(Triplet{a, p, n, 1.0 - d(a, p)});
  }
  return out;
}

std::vector<Triplet> top_q(std::span<const Triplet> valid, double q_percent) {
  if (!(q_percent > 0.0 && q_percent <= 100.0)) throw Error("top_q: q must lie in (0, 100]");
  std::vector<Triplet> sorted(valid.begin(), valid.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& x, const Triplet& y) {
    if (x.confidence != y.confidence) return x.confidence > y.confidence;
    return x.anchor < y.anchor;
  });
  const auto keep = static_cast<std::size_t>(std::ceil(q_percent * static_cast<double>(valid.size()) / 100.0));
  sorted.resize(std::min(keep, sorted.size()));
  return sorted;
}

std::size_t stage_iterations(std::size_t n_selected, const CurriculumSchedule& schedule) {
  const std::size_t seen = schedule.replay_factor * n_selected;
  return (seen + schedule.batch_triplets - 1) / schedule.batch_triplets;
}

}  // namespace gouda
