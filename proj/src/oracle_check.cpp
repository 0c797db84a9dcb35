#include "gouda/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace gouda::oracle {
namespace {

double view_gap(double a, double b, AngleMode mode) {
  const double period = mode == AngleMode::Full ? 360.0 : 180.0;
  double x = std::fmod(std::fabs(std::fmod(a, period) - std::fmod(b, period)), period);
  return std::min(x, period - x);
}

std::string describe(const Triplet& t) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "(%zu,%zu,%zu,%.17g)", t.anchor, t.positive, t.negative, t.confidence);
  return buf;
}

std::string describe(const std::vector<Triplet>& ts) {
  std::string out = "[";
  for (std::size_t i = 0; i < ts.size(); ++i) out += (i ? " " : "") + describe(ts[i]);
  return out + "]";
}

}  // namespace

std::vector<Triplet> brute_force_triplets(const DistanceMatrix& d, std::span<const ViewAngle> views,
                                          const MiningConfig& cfg) {
  const std::size_t r = views.size();
  std::vector<Triplet> valid;
  for (std::size_t a = 0; a < r; ++a) {
    std::set<std::size_t> similar;
    std::set<std::size_t> cross;
    for (std::size_t j = 0; j < r; ++j) {
      const double gap = view_gap(views[a].degrees(), views[j].degrees(), cfg.angle_mode);
      if (gap < cfg.similar_threshold && j != a) similar.insert(j);
      if (gap > cfg.cross_threshold) cross.insert(j);
    }
    if (cross.empty()) continue;
    // argmin over (distance, index)
    const std::size_t p = *std::min_element(cross.begin(), cross.end(), [&](std::size_t x, std::size_t y) {
      return std::make_pair(d(a, x), x) < std::make_pair(d(a, y), y);
    });
    std::set<std::size_t> candidates;
    for (std::size_t j : similar) {
      if (d(a, j) < d(a, p) + cfg.margin) candidates.insert(j);
    }
    if (candidates.empty()) continue;
    // argmax over distance, lowest index on ties
    const std::size_t n = *std::max_element(candidates.begin(), candidates.end(), [&](std::size_t x, std::size_t y) {
      return std::make_pair(d(a, x), -static_cast<long long>(x)) < std::make_pair(d(a, y), -static_cast<long long>(y));
    });
    const bool is_valid = std::any_of(similar.begin(), similar.end(), [&](std::size_t j) { return d(a, j) < d(a, n); });
    if (is_valid) valid.push_back({a, p, n, 1.0 - d(a, p)});
  }
  return valid;
}

Matrix finite_difference_gradient(const TripletBatch& batch, const LinearAdapter& adapter, const LossConfig& cfg,
                                  double h) {
  Matrix grad(adapter.weights.rows(), adapter.weights.cols());
  LinearAdapter probe = adapter;
  for (Eigen::Index i = 0; i < grad.rows(); ++i) {
    for (Eigen::Index j = 0; j < grad.cols(); ++j) {
      const double original = probe.weights(i, j);
      probe.weights(i, j) = original + h;
      const double up = total_loss(batch, probe, cfg);
      probe.weights(i, j) = original - h;
      const double down = total_loss(batch, probe, cfg);
      probe.weights(i, j) = original;
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

MiningInstance worked_instance() {
  Matrix d = Matrix::Zero(5, 5);
  auto set = [&](int i, int j, double v) {
    d(i, j) = v;
    d(j, i) = v;
  };
  set(0, 1, 0.10);
  set(0, 2, 0.45);
  set(0, 3, 0.30);
  set(0, 4, 0.50);
  set(1, 2, 0.20);
  set(1, 3, 0.40);
  set(1, 4, 0.60);
  set(2, 3, 0.15);
  set(2, 4, 0.55);
  set(3, 4, 0.05);
  return {DistanceMatrix(d), {ViewAngle(0), ViewAngle(5), ViewAngle(8), ViewAngle(30), ViewAngle(35)}};
}

MiningInstance random_instance(Rng& rng, std::size_t records, std::size_t dim) {
  Matrix emb(static_cast<Eigen::Index>(records), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < emb.rows(); ++i) emb.row(i) = rng.normal_vector(emb.cols()).transpose();
  std::vector<ViewAngle> views;
  for (std::size_t i = 0; i < records; ++i) views.emplace_back(360.0 * rng.uniform());
  return {distance_matrix(emb), std::move(views)};
}

TripletBatch random_batch(Rng& rng, std::size_t size, Eigen::Index dim) {
  TripletBatch batch;
  for (std::size_t i = 0; i < size; ++i) {
    batch.push_back({rng.normal_vector(dim), rng.normal_vector(dim), rng.normal_vector(dim), rng.normal_vector(dim)});
  }
  return batch;
}

LinearAdapter random_adapter(Rng& rng, Eigen::Index dim) {
  LinearAdapter adapter = LinearAdapter::identity(dim);
  for (Eigen::Index i = 0; i < dim; ++i) adapter.weights.row(i) += 0.3 * rng.normal_vector(dim).transpose();
  return adapter;
}

CheckReport run_oracle_check(const CheckOptions& options) {
  CheckReport report;
  auto fail = [&](const std::string& what) {
    if (report.passed) report.first_failure = what;
    report.passed = false;
  };

  const MiningConfig mining;  // 10 / 20 degrees, margin 0.2
  Rng rng(options.seed, {101});
  std::size_t matches = 0;
  for (std::size_t k = 0; k < options.instances; ++k) {
    const MiningInstance inst = random_instance(rng, options.records, options.dim);
    const auto fast = select_triplets(inst.distances, inst.views, mining);
    auto slow = brute_force_triplets(inst.distances, inst.views, mining);
    if (options.inject_fault && k == 0) {
      if (slow.empty()) {
        slow.push_back({0, 1, 2, 0.0});
      } else {
        slow.front().confidence += 1.0;
      }
    }
    if (fast == slow) {
      ++matches;
    } else {
      fail("triplet selection instance " + std::to_string(k) + ": select_triplets=" + describe(fast) +
           " oracle=" + describe(slow));
    }
  }
  report.lines.push_back("triplet-selection equivalence: " + std::to_string(matches) + "/" +
                         std::to_string(options.instances) + " exact matches");

  Rng grad_rng(options.seed, {102});
  const LossConfig loss;
  double worst = 0.0;
  for (std::size_t b = 0; b < options.gradient_batches; ++b) {
    const auto dim = static_cast<Eigen::Index>(options.dim);
    const LinearAdapter adapter = random_adapter(grad_rng, dim);
    const TripletBatch batch = random_batch(grad_rng, 8, dim);
    const Matrix analytic = loss_gradient(batch, adapter, loss);
    const Matrix numeric = finite_difference_gradient(batch, adapter, loss);
    const double scale = std::max(numeric.cwiseAbs().maxCoeff(), 1e-12);
    worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff() / scale);
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "gradient check: %zu batches, max relative error %.3e (limit 1e-4)",
                options.gradient_batches, worst);
  report.lines.push_back(buf);
  if (!(worst < 1e-4)) fail(buf);

  const MiningInstance worked = worked_instance();
  const auto got = select_triplets(worked.distances, worked.views, mining);
  const std::vector<Triplet> expected{{0, 3, 2, 1.0 - 0.30}, {1, 3, 2, 1.0 - 0.40}};
  const bool worked_ok = got == expected;
  report.lines.push_back(std::string("worked instance: ") + (worked_ok ? "pass" : "FAIL " + describe(got)));
  if (!worked_ok) fail("worked instance: got " + describe(got));
  return report;
}

}  // namespace gouda::oracle
