#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gouda/geometry.hpp"

namespace gouda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One gait sequence as seen by the frozen backbone.
struct GaitRecord {
  std::string record_id;
  Vector embedding;
  ViewAngle view;
  std::optional<std::string> identity;  // ground truth; evaluation/oracle use only
  std::optional<Matrix> frames;         // T x k latent frames, one per row
};

/// Throws gouda::Error if the record violates its invariants (zero embedding,
/// fewer than two frames).
void validate_record(const GaitRecord& record);

/// 1 - cos(x, y). Throws "zero-norm embedding" if either vector is zero.
double cosine_distance(const Vector& x, const Vector& y);

/// Dense symmetric cosine-distance matrix. The upper triangle is computed and
/// mirrored, so symmetry and the zero diagonal are exact.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(Matrix entries);

  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Matrix& entries() const { return entries_; }

 private:
  Matrix entries_;
};

/// Rows of `embeddings` are the vectors.
DistanceMatrix distance_matrix(const Matrix& embeddings);
DistanceMatrix distance_matrix(std::span<const GaitRecord> records);

/// Stacks record embeddings into rows. Throws on dimension mismatch.
Matrix stack_embeddings(std::span<const GaitRecord> records);

/// The k nearest neighbours of `anchor`, self excluded, ordered by
/// (distance, index).
std::vector<std::size_t> knn(const DistanceMatrix& d, std::size_t anchor, std::size_t k);

}  // namespace gouda
