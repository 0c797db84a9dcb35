#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "gouda/adaptation.hpp"
#include "gouda/evaluation.hpp"
#include "gouda/mining.hpp"
#include "gouda/synthetic.hpp"

namespace gouda {

enum class AdaptMode { Gouda, Oracle, Supervised };

/// Everything one experiment needs. Defaults follow the reference
/// hyper-parameters (margin 0.2, thresholds 10/20 degrees, K = 5, Adam at
/// lr 1e-5 with weight decay 5e-4, 32-triplet batches, q = 10/25/50/100,
/// replay 10).
struct RunConfig {
  SynthConfig synth;
  MiningConfig mining;
  CurriculumSchedule schedule;
  AdamParams optim;
  LossConfig loss;
  std::size_t sc_k = 5;
  std::size_t checkpoint_every = 200;
  AdaptMode mode = AdaptMode::Gouda;
  std::size_t supervised_iterations = 2000;
  double augment_min_fraction = 0.5;
  double validation_fraction = 0.1;
  double eval_bin_width = 0.0;  // 0 = smallest gap between generator views
  std::uint64_t seed = 7;
  std::string out_dir = "out";

  void validate() const;
  AdaptOptions adapt_options() const;
  SupervisedOptions supervised_options() const;
  double bin_width() const;
};

/// Parses a flat INI file (`key = value` under [synth], [mining],
/// [schedule], [optim], [loss], [sc], [adapt], [eval]; `seed` and `out_dir`
/// at top level). Missing keys keep their defaults; unknown keys and bad
/// values throw ConfigError naming the field.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);

/// Canonical `key = value` dump of the effective configuration.
std::string canonical_text(const RunConfig& cfg);

/// FNV-1a 64 of canonical_text, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace gouda
