#pragma once

#include "gouda/embedding.hpp"

namespace gouda {

/// Trainable d x d linear map standing in for backbone fine-tuning. Starts at
/// identity, so an untrained adapter reproduces direct testing exactly.
struct LinearAdapter {
  Matrix weights;

  static LinearAdapter identity(Eigen::Index dim) { return {Matrix::Identity(dim, dim)}; }
  Eigen::Index dim() const { return weights.rows(); }
};

/// Maps every row e of `embeddings` to W e. Throws "adapter collapsed
/// embedding" if an output row has zero norm or is non-finite.
Matrix apply_adapter(const LinearAdapter& adapter, const Matrix& embeddings);

}  // namespace gouda
