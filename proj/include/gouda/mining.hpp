#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gouda/embedding.hpp"
#include "gouda/geometry.hpp"

namespace gouda {

/// View thresholds and selection margin for view-based triplet mining.
struct MiningConfig {
  double similar_threshold = 10.0;  // degrees; strictly-below is "similar view"
  double cross_threshold = 20.0;    // degrees; strictly-above is "cross view"
  double margin = 0.2;              // negative must satisfy D[a][n] < D[a][p] + margin
  AngleMode angle_mode = AngleMode::Full;

  void validate() const;
};

struct Triplet {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  double confidence = 0.0;  // 1 - D[anchor][positive]

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Easy-to-hard schedule: stage s keeps the top stage_q_percent[s] of the
/// valid triplets ranked by confidence.
struct CurriculumSchedule {
  std::vector<double> stage_q_percent{10.0, 25.0, 50.0, 100.0};
  std::size_t replay_factor = 10;
  std::size_t batch_triplets = 32;

  void validate() const;
};

struct ViewPartition {
  std::vector<std::size_t> similar;
  std::vector<std::size_t> cross;
};

/// Splits every other sample into similar-view (< similar_threshold) and
/// cross-view (> cross_threshold) sets relative to `anchor`. Samples in the
/// band between the thresholds belong to neither. Both lists are ascending.
ViewPartition partition_views(std::size_t anchor, std::span<const ViewAngle> views,
                              const MiningConfig& cfg);

/// All valid triplets, at most one per anchor, ordered by anchor index.
///
/// For each anchor the positive is the nearest cross-view sample and the
/// negative is the farthest similar-view sample still closer than
/// D[a][p] + margin. The triplet is kept only if some similar-view sample is
/// strictly closer to the anchor than the negative. Anchors failing any step
/// are skipped. Ties go to the lowest index.
std::vector<Triplet> select_triplets(const DistanceMatrix& d, std::span<const ViewAngle> views,
                                     const MiningConfig& cfg);

/// The ceil(q% * |valid|) most confident triplets, ordered by descending
/// confidence, ties by ascending anchor.
std::vector<Triplet> top_q(std::span<const Triplet> valid, double q_percent);

/// Iterations needed for each selected triplet to be seen replay_factor times
/// on average: ceil(replay_factor * n_selected / batch_triplets).
std::size_t stage_iterations(std::size_t n_selected, const CurriculumSchedule& schedule);

}  // namespace gouda
