#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gouda/adaptation.hpp"
#include "gouda/embedding.hpp"
#include "gouda/mining.hpp"
#include "gouda/synthetic.hpp"

// Independent reference computations used by the oracle-check command and the
// test suites. Nothing here calls into the code it checks.
namespace gouda::oracle {

/// Literal set-based transcription of the triplet selection definitions.
std::vector<Triplet> brute_force_triplets(const DistanceMatrix& d, std::span<const ViewAngle> views,
                                          const MiningConfig& cfg);

/// Central differences of total_loss with respect to every weight.
Matrix finite_difference_gradient(const TripletBatch& batch, const LinearAdapter& adapter, const LossConfig& cfg,
                                  double h = 1e-6);

struct MiningInstance {
  DistanceMatrix distances;
  std::vector<ViewAngle> views;
};

/// Five samples at views 0, 5, 8, 30, 35 with a hand-chosen distance matrix.
MiningInstance worked_instance();

/// Gaussian embeddings of dimension `dim` and uniform views in [0, 360).
MiningInstance random_instance(Rng& rng, std::size_t records, std::size_t dim);

/// Random quadruples and a random adapter near identity.
TripletBatch random_batch(Rng& rng, std::size_t size, Eigen::Index dim);
LinearAdapter random_adapter(Rng& rng, Eigen::Index dim);

struct CheckOptions {
  std::size_t instances = 100;
  std::size_t records = 50;
  std::size_t dim = 16;
  std::size_t gradient_batches = 20;
  std::uint64_t seed = 7;
  bool inject_fault = false;  // corrupts one oracle result; the check must fail
};

struct CheckReport {
  bool passed = true;
  std::vector<std::string> lines;
  std::string first_failure;
};

/// Selection-vs-oracle equivalence, gradient-vs-finite-difference, and the
/// worked instance.
CheckReport run_oracle_check(const CheckOptions& options);

}  // namespace gouda::oracle
