#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "gouda/embedding.hpp"
#include "gouda/geometry.hpp"

namespace gouda {

/// Seeded random stream. The engine is std::mt19937_64 keyed through
/// std::seed_seq, and the distributions are written out here so draws are
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

  double uniform();                                      // [0, 1), 53-bit
  double normal();                                       // standard normal (Box-Muller)
  std::size_t uniform_index(std::size_t lo, std::size_t hi);  // inclusive range
  Vector normal_vector(Eigen::Index dim);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Parameters of the view-biased synthetic target domain. Defaults are the
/// reference scenario used throughout the tests.
struct SynthConfig {
  std::size_t n_identities = 64;
  std::vector<double> views{0, 45, 90, 135, 180, 225, 270, 315};
  std::size_t seqs_per_id_view = 2;
  std::size_t frames_per_seq = 64;
  std::size_t dim = 32;
  double id_strength = 1.0;     // alpha
  double view_bias = 3.0;       // beta
  double gait_amplitude = 0.5;  // gamma
  double noise = 0.3;           // sigma
  std::size_t gait_cycle = 16;  // frames per oscillation period
  std::uint64_t seed = 7;

  void validate() const;
};

struct SynthDataset {
  std::vector<GaitRecord> records;
  SynthConfig config;
};

/// Frame t of a sequence of identity i at view v is
///   alpha*u_i + beta*w(v) + gamma*sin(2*pi*t/cycle)*g_i + sigma*eps_t
/// where u_i, g_i are unit identity directions, w(v) is a unit vector built
/// from the 1x/2x/3x harmonics of the angle (amplitudes 1/k^2) through a fixed random
/// projection, and eps_t is standard normal. Records are ordered by
/// (identity, view, sequence); each one draws from its own stream, so the
/// output depends only on the config.
SynthDataset generate_target_domain(const SynthConfig& cfg);

/// The smooth view component w(v) for a given config (shared projection).
Vector view_component(const SynthConfig& cfg, ViewAngle view);

/// Frozen-backbone stand-in: mean of frames [t0, t1).
Vector embed_window(const Matrix& frames, std::size_t t0, std::size_t t1);

/// Sub-sequence augmentation: window lengths are drawn from
/// [ceil(min_fraction * T), T].
struct AugmentPolicy {
  double min_fraction = 0.5;
};

/// Embeddings of two independent random contiguous windows of the record's
/// frames. Throws "augmentation requires frame latents" if frames are absent.
std::pair<Vector, Vector> augment(const GaitRecord& record, Rng& rng, const AugmentPolicy& policy = {});

}  // namespace gouda
