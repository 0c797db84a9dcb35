#include "gouda/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "gouda/error.hpp"

namespace gouda {
namespace {

constexpr std::uint64_t kProjectionStream = 1;
constexpr std::uint64_t kIdentityStream = 2;
constexpr std::uint64_t kRecordStream = 3;
constexpr std::size_t kHarmonics = 3;

std::seed_seq make_seed_seq(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::vector<std::uint32_t> words;
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (std::uint64_t s : stream) push(s);
  return std::seed_seq(words.begin(), words.end());
}

Matrix view_projection(const SynthConfig& cfg) {
  Rng rng(cfg.seed, {kProjectionStream});
  Matrix proj(static_cast<Eigen::Index>(cfg.dim), static_cast<Eigen::Index>(2 * kHarmonics));
  for (Eigen::Index c = 0; c < proj.cols(); ++c) proj.col(c) = rng.normal_vector(proj.rows());
  return proj;
}

Vector view_component(const Matrix& proj, ViewAngle view) {
  const double rad = view.degrees() * std::numbers::pi / 180.0;
  Vector features(static_cast<Eigen::Index>(2 * kHarmonics));
  for (std::size_t h = 0; h < kHarmonics; ++h) {
    const double k = static_cast<double>(h + 1);
    // 1/k^2 amplitudes keep w(v) smooth: adjacent views stay close.
    const double amp = 1.0 / (k * k);
    features(static_cast<Eigen::Index>(2 * h)) = amp * std::sin(k * rad);
    features(static_cast<Eigen::Index>(2 * h + 1)) = amp * std::cos(k * rad);
  }
  Vector w = proj * features;
  return w / w.norm();
}

std::string format_view(double degrees) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", degrees);
  return buf;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  auto seq = make_seed_seq(seed, stream);
  engine_.seed(seq);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(theta);
  has_spare_ = true;
  return radius * std::cos(theta);
}

std::size_t Rng::uniform_index(std::size_t lo, std::size_t hi) {
  if (hi < lo) throw Error("Rng::uniform_index: empty range");
  const double span = static_cast<double>(hi - lo + 1);
  const auto offset = static_cast<std::size_t>(uniform() * span);
  return lo + std::min(offset, hi - lo);
}

Vector Rng::normal_vector(Eigen::Index dim) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal();
  return v;
}

void SynthConfig::validate() const {
  if (n_identities < 2) throw ConfigError("synth.n_identities must be >= 2");
  if (views.size() < 2) throw ConfigError("synth.views must list at least 2 views");
  if (seqs_per_id_view < 1) throw ConfigError("synth.seqs_per_id_view must be >= 1");
  if (frames_per_seq < 4) throw ConfigError("synth.frames_per_seq must be >= 4");
  if (dim < 8) throw ConfigError("synth.dim must be >= 8");
  if (!(id_strength > 0.0)) throw ConfigError("synth.id_strength must be > 0");
  if (!(view_bias >= 0.0)) throw ConfigError("synth.view_bias must be >= 0");
  if (!(gait_amplitude >= 0.0)) throw ConfigError("synth.gait_amplitude must be >= 0");
  if (!(noise >= 0.0)) throw ConfigError("synth.noise must be >= 0");
  if (gait_cycle < 1) throw ConfigError("synth.gait_cycle must be >= 1");
}

Vector view_component(const SynthConfig& cfg, ViewAngle view) {
  return view_component(view_projection(cfg), view);
}

SynthDataset generate_target_domain(const SynthConfig& cfg) {
  cfg.validate();
  const auto dim = static_cast<Eigen::Index>(cfg.dim);
  const auto frames = static_cast<Eigen::Index>(cfg.frames_per_seq);
  const Matrix proj = view_projection(cfg);

  std::vector<Vector> view_dirs;
  for (double v : cfg.views) view_dirs.push_back(view_component(proj, ViewAngle(v)));

  Vector phase(frames);
  for (Eigen::Index t = 0; t < frames; ++t) {
    phase(t) = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(cfg.gait_cycle));
  }

  SynthDataset out;
  out.config = cfg;
  out.records.reserve(cfg.n_identities * cfg.views.size() * cfg.seqs_per_id_view);
  std::uint64_t record_index = 0;
  for (std::size_t id = 0; id < cfg.n_identities; ++id) {
    Rng id_rng(cfg.seed, {kIdentityStream, id});
    Vector identity_dir = id_rng.normal_vector(dim);
    identity_dir.normalize();
    Vector gait_dir = id_rng.normal_vector(dim);
    gait_dir.normalize();

    char id_label[32];
    std::snprintf(id_label, sizeof id_label, "id%03zu", id);

    for (std::size_t vi = 0; vi < cfg.views.size(); ++vi) {
      const Vector base = cfg.id_strength * identity_dir + cfg.view_bias * view_dirs[vi];
      for (std::size_t s = 0; s < cfg.seqs_per_id_view; ++s, ++record_index) {
        Rng rec_rng(cfg.seed, {kRecordStream, record_index});
        Matrix latents(frames, dim);
        for (Eigen::Index t = 0; t < frames; ++t) {
          latents.row(t) = (base + cfg.gait_amplitude * phase(t) * gait_dir +
                            cfg.noise * rec_rng.normal_vector(dim))
                               .transpose();
        }
        GaitRecord rec;
        rec.record_id = std::string(id_label) + "_v" + format_view(cfg.views[vi]) + "_s" + std::to_string(s);
        rec.identity = id_label;
        rec.view = ViewAngle(cfg.views[vi]);
        rec.embedding = embed_window(latents, 0, cfg.frames_per_seq);
        rec.frames = std::move(latents);
        out.records.push_back(std::move(rec));
      }
    }
  }
  return out;
}

Vector embed_window(const Matrix& frames, std::size_t t0, std::size_t t1) {
  if (!(t0 < t1) || t1 > static_cast<std::size_t>(frames.rows())) {
    throw Error("embed_window: empty or out-of-range window");
  }
  const auto len = static_cast<Eigen::Index>(t1 - t0);
  return frames.middleRows(static_cast<Eigen::Index>(t0), len).colwise().mean().transpose();
}

std::pair<Vector, Vector> augment(const GaitRecord& record, Rng& rng, const AugmentPolicy& policy) {
  if (!record.frames) throw Error("augmentation requires frame latents");
  const auto total = static_cast<std::size_t>(record.frames->rows());
  if (total < 2) throw Error("augmentation requires frame latents");
  auto min_len = static_cast<std::size_t>(std::ceil(policy.min_fraction * static_cast<double>(total)));
  min_len = std::clamp<std::size_t>(min_len, 1, total);
  auto window = [&]() {
    const std::size_t len = rng.uniform_index(min_len, total);
    const std::size_t start = rng.uniform_index(0, total - len);
    return embed_window(*record.frames, start, start + len);
  };
  Vector first = window();
  Vector second = window();
  return {std::move(first), std::move(second)};
}

}  // namespace gouda
