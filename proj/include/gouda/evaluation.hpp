#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gouda/adaptation.hpp"
#include "gouda/adapter.hpp"
#include "gouda/embedding.hpp"
#include "gouda/mining.hpp"

namespace gouda {

/// Cross-view Rank-1 with gallery = first record per (identity, view) and
/// every other record as a probe. per_pair[i][j] is the hit percentage for
/// probes of views[i] against the gallery of views[j]; absent when the pair
/// has no probes or no gallery.
struct Rank1Report {
  std::vector<double> views;
  std::vector<std::vector<std::optional<double>>> per_pair;
  std::optional<double> overall_cross_view;   // mean over present pairs with i != j
  std::optional<double> identical_view_mean;  // mean over present diagonal pairs
};

Rank1Report rank1_cross_view(std::span<const GaitRecord> records);
Rank1Report rank1_cross_view(std::span<const GaitRecord> records, const LinearAdapter& adapter);

/// Identity labels of every record. Throws if any record is unlabeled.
std::vector<std::string> identity_labels(std::span<const GaitRecord> records);

/// Percentages over a triplet set; absent when the set is empty.
struct CorrectnessRates {
  std::size_t count = 0;
  std::optional<double> triplet_rate;   // l_a == l_p != l_n
  std::optional<double> positive_rate;  // l_a == l_p
  std::optional<double> negative_rate;  // l_a != l_n
};

struct StageCorrectness {
  std::size_t stage = 0;
  CorrectnessRates rates;
};

struct CorrectnessReport {
  CorrectnessRates overall;
  std::vector<StageCorrectness> per_stage;  // ascending stage, only stages seen
};

CorrectnessRates correctness_rates(std::span<const Triplet> triplets, std::span<const std::string> labels);

/// `stages`, when non-empty, tags each triplet with its curriculum stage.
CorrectnessReport triplet_correctness(std::span<const Triplet> triplets, std::span<const std::string> labels,
                                      std::span<const std::size_t> stages = {});

/// Keeps triplets with l_a == l_p != l_n, preserving order.
std::vector<Triplet> oracle_filter(std::span<const Triplet> triplets, std::span<const std::string> labels);

struct SupervisedOptions {
  AdamParams adam;
  double margin = 0.2;
  std::size_t iterations = 2000;
  std::size_t batch_triplets = 32;
  std::uint64_t seed = 7;
};

/// Upper-bound baseline: plain triplet loss on label-correct triplets drawn
/// uniformly (anchor, another record of the same identity, a record of a
/// different identity). Needs at least two identities.
LinearAdapter supervised_adapt(std::span<const GaitRecord> records, const SupervisedOptions& options);

/// Row-normalised histogram of anchor-view bin -> positive-view bin.
/// Rows without triplets are absent.
struct ViewConfusion {
  double bin_width = 45.0;
  std::vector<std::optional<std::vector<double>>> rows;
};

ViewConfusion positive_view_confusion(std::span<const Triplet> triplets, std::span<const ViewAngle> views,
                                      double bin_width);

/// Distribution of similar-view neighbour counts (0..k) over records, and
/// its mean, which is the stopping criterion value.
struct NeighborhoodHistogram {
  std::vector<std::size_t> counts;
  double sc = 0.0;
};

NeighborhoodHistogram view_neighborhood_histogram(std::span<const GaitRecord> records, const LinearAdapter& adapter,
                                                  std::size_t k, double similar_threshold,
                                                  AngleMode mode = AngleMode::Full);

}  // namespace gouda
