#include <doctest.h>

#include <cmath>
#include <set>

#include "gouda/adaptation.hpp"
#include "gouda/error.hpp"
#include "gouda/evaluation.hpp"
#include "gouda/synthetic.hpp"

using namespace gouda;

namespace {

std::vector<ViewAngle> views_of(const std::vector<GaitRecord>& records) {
  std::vector<ViewAngle> v;
  for (const auto& r : records) v.push_back(r.view);
  return v;
}

double raw_sc(const std::vector<GaitRecord>& records) {
  return stopping_criterion(stack_embeddings(records), views_of(records), 5, 10.0, AngleMode::Full);
}

}  // namespace

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(7, {3, 1}), b(7, {3, 1}), c(7, {3, 2}), d(8, {3, 1});
  bool differ_stream = false, differ_seed = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differ_stream = differ_stream || x != c.uniform();
    differ_seed = differ_seed || x != d.uniform();
  }
  CHECK(differ_stream);
  CHECK(differ_seed);

  Rng r(1);
  std::set<std::size_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const std::size_t k = r.uniform_index(3, 6);
    CHECK(k >= 3);
    CHECK(k <= 6);
    seen.insert(k);
  }
  CHECK(seen.size() == 4);

  // Normal draws: loose moment check.
  Rng n(2);
  double sum = 0.0, sq = 0.0;
  const int count = 20000;
  for (int i = 0; i < count; ++i) {
    const double x = n.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / count) < 0.03);
  CHECK(std::abs(sq / count - 1.0) < 0.05);
}

TEST_CASE("embed_window") {
  Matrix frames(4, 3);
  frames << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12;
  CHECK(embed_window(frames, 2, 3) == Vector(frames.row(2).transpose()));
  const Vector mean = embed_window(frames, 1, 4);
  CHECK(mean(0) == doctest::Approx((4.0 + 7 + 10) / 3));
  CHECK(mean(2) == doctest::Approx((6.0 + 9 + 12) / 3));
  const Matrix same = Matrix::Constant(6, 2, 0.25);
  CHECK(embed_window(same, 1, 5) == Vector::Constant(2, 0.25));
  CHECK_THROWS_AS(embed_window(frames, 2, 2), Error);
  CHECK_THROWS_AS(embed_window(frames, 3, 5), Error);
}

TEST_CASE("embed_window equals a manual mean on random frames") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix frames(20, 5);
    for (int t = 0; t < 20; ++t) frames.row(t) = rng.normal_vector(5).transpose();
    const std::size_t t0 = rng.uniform_index(0, 18), t1 = rng.uniform_index(t0 + 1, 20);
    Vector manual = Vector::Zero(5);
    for (std::size_t t = t0; t < t1; ++t) manual += frames.row(static_cast<Eigen::Index>(t)).transpose();
    manual /= static_cast<double>(t1 - t0);
    CHECK((embed_window(frames, t0, t1) - manual).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("default scenario shape and determinism") {
  const SynthConfig cfg;
  const auto a = generate_target_domain(cfg);
  const auto b = generate_target_domain(cfg);
  REQUIRE(a.records.size() == 64 * 8 * 2);
  std::set<std::string> ids, labels;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& r = a.records[i];
    CHECK(r.record_id == b.records[i].record_id);
    CHECK(r.embedding == b.records[i].embedding);
    CHECK(*r.frames == *b.records[i].frames);
    CHECK(r.identity.has_value());
    CHECK(r.frames->rows() == 64);
    CHECK(r.embedding.size() == 32);
    CHECK((r.embedding - embed_window(*r.frames, 0, 64)).cwiseAbs().maxCoeff() == 0.0);
    ids.insert(r.record_id);
    labels.insert(*r.identity);
  }
  CHECK(ids.size() == a.records.size());
  CHECK(labels.size() == 64);

  SynthConfig other = cfg;
  other.seed = 8;
  CHECK(generate_target_domain(other).records[0].embedding != a.records[0].embedding);
}

TEST_CASE("without view bias, gait and noise, one identity looks the same from every view") {
  SynthConfig cfg;
  cfg.n_identities = 6;
  cfg.view_bias = 0.0;
  cfg.noise = 0.0;
  cfg.gait_amplitude = 0.0;
  const auto ds = generate_target_domain(cfg);
  for (const auto& r : ds.records)
    for (const auto& s : ds.records)
      if (r.identity == s.identity) CHECK(cosine_distance(r.embedding, s.embedding) < 1e-12);
}

TEST_CASE("raw default embeddings cluster by view") {
  CHECK(raw_sc(generate_target_domain(SynthConfig{}).records) > 4.0);
}

TEST_CASE("view clustering grows with the view bias") {
  double last = -1.0;
  for (double beta : {0.0, 1.0, 3.0}) {
    SynthConfig cfg;
    cfg.view_bias = beta;
    const double sc = raw_sc(generate_target_domain(cfg).records);
    CHECK(sc >= last);
    last = sc;
  }
}

TEST_CASE("without view bias raw cross-view retrieval already works") {
  SynthConfig cfg;
  cfg.view_bias = 0.0;
  cfg.noise = 0.05;
  const auto report = rank1_cross_view(generate_target_domain(cfg).records);
  REQUIRE(report.overall_cross_view.has_value());
  CHECK(*report.overall_cross_view > 95.0);
}

TEST_CASE("augmentation edge cases") {
  GaitRecord r;
  r.record_id = "r";
  r.view = ViewAngle(0);
  Matrix two(2, 3);
  two << 1, 2, 3, 5, 6, 7;
  r.frames = two;
  r.embedding = embed_window(two, 0, 2);
  Rng rng(4);
  const auto [x, y] = augment(r, rng, AugmentPolicy{1.0});
  CHECK(x == r.embedding);
  CHECK(y == r.embedding);

  r.frames = Matrix::Constant(10, 3, -0.5);
  for (int i = 0; i < 20; ++i) {
    const auto [p, q] = augment(r, rng);
    CHECK(p == Vector::Constant(3, -0.5));
    CHECK(q == Vector::Constant(3, -0.5));
  }

  r.frames.reset();
  CHECK_THROWS_WITH_AS(augment(r, rng), "augmentation requires frame latents", Error);
}

TEST_CASE("augmentation windows respect the length policy") {
  // Frame t holds the value t, so the window mean pins down its length range.
  GaitRecord r;
  r.record_id = "r";
  Matrix frames(16, 1);
  for (int t = 0; t < 16; ++t) frames(t, 0) = t;
  r.frames = frames;
  r.embedding = embed_window(frames, 0, 16);
  Rng a(12), b(12);
  for (int i = 0; i < 200; ++i) {
    const auto [p, q] = augment(r, a);
    const auto [p2, q2] = augment(r, b);
    CHECK(p == p2);
    CHECK(q == q2);
    // Mean of a window of length >= 8 lies in [3.5, 11.5].
    CHECK(p(0) >= 3.5);
    CHECK(p(0) <= 11.5);
  }
}

TEST_CASE("two augmentations of a sequence stay closer than any other identity at its view") {
  SynthConfig cfg;
  cfg.noise = 0.0;
  const auto ds = generate_target_domain(cfg);
  Rng rng(21);
  for (std::size_t i = 0; i < ds.records.size(); i += 7) {
    const auto& r = ds.records[i];
    const auto [x, y] = augment(r, rng);
    const double own = cosine_distance(x, y);
    double nearest_other = 3.0;
    for (const auto& s : ds.records)
      if (s.identity != r.identity && s.view == r.view) nearest_other = std::min(nearest_other, cosine_distance(x, s.embedding));
    CHECK(own < nearest_other);
  }
}

TEST_CASE("synthetic config validation names the field") {
  SynthConfig cfg;
  cfg.n_identities = 1;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("n_identities"), ConfigError);
  cfg = SynthConfig{};
  cfg.views = {0};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("views"), ConfigError);
  cfg = SynthConfig{};
  cfg.frames_per_seq = 3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.dim = 4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.id_strength = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.noise = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
