#include "gouda/embedding.hpp"

#include <algorithm>
#include <numeric>

#include "gouda/error.hpp"

namespace gouda {

void validate_record(const GaitRecord& record) {
  if (record.embedding.size() == 0 || record.embedding.isZero(0.0)) {
    throw Error("record '" + record.record_id + "': zero-norm embedding");
  }
  if (!record.embedding.allFinite()) {
    throw Error("record '" + record.record_id + "': non-finite embedding");
  }
  if (record.frames && record.frames->rows() < 2) {
    throw Error("record '" + record.record_id + "': frame sequence needs at least 2 frames");
  }
}

double cosine_distance(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw Error("cosine_distance: dimension mismatch");
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0) throw Error("zero-norm embedding");
  const double cos = x.dot(y) / (nx * ny);
  return std::clamp(1.0 - cos, 0.0, 2.0);
}

DistanceMatrix::DistanceMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw Error("distance matrix must be square");
}

DistanceMatrix distance_matrix(const Matrix& embeddings) {
  const Eigen::Index n = embeddings.rows();
  Vector norms = embeddings.rowwise().norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (norms(i) == 0.0) throw Error("zero-norm embedding");
  }
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double cos = embeddings.row(i).dot(embeddings.row(j)) / (norms(i) * norms(j));
      d(i, j) = std::clamp(1.0 - cos, 0.0, 2.0);
      d(j, i) = d(i, j);
    }
  }
  return DistanceMatrix(std::move(d));
}

Matrix stack_embeddings(std::span<const GaitRecord> records) {
  if (records.empty()) return Matrix(0, 0);
  const Eigen::Index dim = records.front().embedding.size();
  Matrix out(static_cast<Eigen::Index>(records.size()), dim);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].embedding.size() != dim) {
      throw Error("embedding dimension mismatch at record '" + records[i].record_id + "'");
    }
    out.row(static_cast<Eigen::Index>(i)) = records[i].embedding.transpose();
  }
  return out;
}

DistanceMatrix distance_matrix(std::span<const GaitRecord> records) {
  return distance_matrix(stack_embeddings(records));
}

std::vector<std::size_t> knn(const DistanceMatrix& d, std::size_t anchor, std::size_t k) {
  const std::size_t n = d.size();
  if (anchor >= n) throw Error("knn: anchor index out of range");
  if (k > n - 1) throw Error("knn: K must be at most n - 1");
  std::vector<std::size_t> order;
  order.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j != anchor) order.push_back(j);
  }
  auto closer = [&](std::size_t a, std::size_t b) {
    const double da = d(anchor, a);
    const double db = d(anchor, b);
    return da < db || (da == db && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
  order.resize(k);
  return order;
}

}  // namespace gouda
