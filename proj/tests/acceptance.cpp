// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Tolerances are pinned below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gouda/adaptation.hpp"
#include "gouda/config.hpp"
#include "gouda/evaluation.hpp"
#include "gouda/io.hpp"
#include "gouda/oracles.hpp"
#include "gouda/runner.hpp"

namespace fs = std::filesystem;
using namespace gouda;

namespace {

constexpr double kOracleBudgetSec = 10.0;
constexpr double kGradientBudgetSec = 5.0;
constexpr double kGradientTol = 1e-4;
constexpr double kScaleTol = 1e-9;
constexpr double kIdenticalViewMin = 90.0;
constexpr double kCrossViewMax = 60.0;
constexpr double kRawScMin = 4.0;
constexpr double kGainMin = 15.0;
constexpr double kAdaptBudgetSec = 300.0;
constexpr double kStageDropSlack = 2.0;
constexpr double kOrderingSlack = 1.0;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

RunConfig default_config() { return load_config(fs::path(GOUDA_CONFIG_DIR) / "default.ini"); }

// Shared runs on the default scenario, computed once.
struct Runs {
  RunConfig cfg;
  std::vector<GaitRecord> records;
  Rank1Report dt;
  AdaptResult gouda;
  Rank1Report gouda_rank1;
  double adapt_seconds = 0.0;
  Rank1Report oracle_rank1;
  Rank1Report supervised_rank1;
};

const Runs& runs() {
  static const Runs r = [] {
    Runs out;
    out.cfg = default_config();
    out.records = generate_target_domain(out.cfg.synth).records;
    out.dt = rank1_cross_view(out.records);
    const DataSplit split = split_validation(out.records, out.cfg.validation_fraction);

    const auto t0 = std::chrono::steady_clock::now();
    out.gouda = adapt(split.train, split.validation, out.cfg.adapt_options());
    out.gouda_rank1 = rank1_cross_view(out.records, out.gouda.adapter);
    out.adapt_seconds = seconds_since(t0);

    AdaptOptions oracle_opts = out.cfg.adapt_options();
    oracle_opts.oracle_filter = true;
    out.oracle_rank1 = rank1_cross_view(out.records, adapt(split.train, split.validation, oracle_opts).adapter);
    out.supervised_rank1 = rank1_cross_view(out.records, supervised_adapt(split.train, out.cfg.supervised_options()));
    return out;
  }();
  return r;
}

Outcome c1_oracle_equivalence() {
  Rng rng(101);
  MiningConfig cfg;  // T_s 10, T_c 20, m 0.2
  std::size_t matched = 0;
  const std::size_t total = 100;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < total; ++i) {
    const auto inst = oracle::random_instance(rng, 50, 16);
    if (select_triplets(inst.distances, inst.views, cfg) == oracle::brute_force_triplets(inst.distances, inst.views, cfg))
      ++matched;
  }
  const double sec = seconds_since(t0);
  return {matched == total && sec < kOracleBudgetSec,
          std::to_string(matched) + "/" + std::to_string(total) + " identical, " + fmt("%.2f s", sec)};
}

Outcome c2_gradient() {
  Rng rng(202);
  LossConfig cfg;
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int b = 0; b < 20; ++b) {
    const auto batch = oracle::random_batch(rng, 8, 16);
    const auto adapter = oracle::random_adapter(rng, 16);
    const Matrix analytic = loss_gradient(batch, adapter, cfg);
    const Matrix numeric = oracle::finite_difference_gradient(batch, adapter, cfg);
    const double scale = std::max(numeric.cwiseAbs().maxCoeff(), 1e-12);
    worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff() / scale);
  }
  const double sec = seconds_since(t0);
  return {worst < kGradientTol && sec < kGradientBudgetSec, fmt("max rel err %.3g", worst) + fmt(", %.2f s", sec)};
}

Outcome c3_scale_invariance() {
  Rng rng(303);
  LossConfig cfg;
  double worst = 0.0;
  for (int b = 0; b < 10; ++b) {
    const auto batch = oracle::random_batch(rng, 8, 16);
    const auto adapter = oracle::random_adapter(rng, 16);
    LinearAdapter doubled{adapter.weights * 2.0};
    const double l1 = total_loss(batch, adapter, cfg);
    const double l2 = total_loss(batch, doubled, cfg);
    worst = std::max(worst, std::abs(l1 - l2) / std::max(std::abs(l1), 1e-300));
  }
  return {worst < kScaleTol, fmt("max rel diff %.3g", worst)};
}

Outcome c4_view_bias() {
  const Runs& r = runs();
  const auto hist = view_neighborhood_histogram(r.records, LinearAdapter::identity(r.cfg.synth.dim), 5,
                                                r.cfg.mining.similar_threshold, r.cfg.mining.angle_mode);
  const double same = r.dt.identical_view_mean.value_or(0.0);
  const double cross = r.dt.overall_cross_view.value_or(100.0);
  return {same > kIdenticalViewMin && cross < kCrossViewMax && hist.sc > kRawScMin,
          fmt("identical-view %.1f%%", same) + fmt(", cross-view %.1f%%", cross) + fmt(", SC %.2f", hist.sc)};
}

Outcome c5_adaptation_gain() {
  const Runs& r = runs();
  const double before = r.dt.overall_cross_view.value_or(0.0);
  const double after = r.gouda_rank1.overall_cross_view.value_or(0.0);
  const auto& cps = r.gouda.trace.checkpoints;
  const double initial_sc = cps.front().sc;
  const double chosen_sc = r.gouda.trace.chosen.sc;
  return {after - before >= kGainMin && chosen_sc < initial_sc && r.adapt_seconds < kAdaptBudgetSec,
          fmt("cross-view %.1f", before) + fmt(" -> %.1f", after) + fmt(", SC %.2f", initial_sc) +
              fmt(" -> %.2f", chosen_sc) + fmt(", %.1f s", r.adapt_seconds)};
}

Outcome c6_curriculum_trend() {
  const Runs& r = runs();
  const auto& stages = r.gouda.trace.stages;
  if (stages.empty() || !stages.front().correct_triplet_rate || !stages.front().valid_correct_rate)
    return {false, "no labelled stage-1 statistics"};
  const double top = *stages.front().correct_triplet_rate;
  const double all = *stages.front().valid_correct_rate;
  std::string rates;
  std::size_t drops = 0;
  bool big_drop = false;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const double v = stages[s].correct_triplet_rate.value_or(0.0);
    rates += (s ? "/" : "") + fmt("%.1f", v);
    if (s > 0) {
      const double prev = stages[s - 1].correct_triplet_rate.value_or(0.0);
      if (v < prev) {
        ++drops;
        if (prev - v > kStageDropSlack) big_drop = true;
      }
    }
  }
  const bool trend = stages.size() == 4 && drops <= 1 && !big_drop;
  return {top >= all && trend, fmt("stage-1 top-10%% %.1f", top) + fmt(" vs all-valid %.1f", all) +
                                   ", per-stage " + rates + (trend ? " (ordered)" : " (not ordered)")};
}

Outcome c7_ablation_ordering() {
  const Runs& r = runs();
  const double dt = r.dt.overall_cross_view.value_or(0.0);
  const double g = r.gouda_rank1.overall_cross_view.value_or(0.0);
  const double o = r.oracle_rank1.overall_cross_view.value_or(0.0);
  const double s = r.supervised_rank1.overall_cross_view.value_or(0.0);
  const bool ok = dt <= g + kOrderingSlack && g <= o + kOrderingSlack && o <= s + kOrderingSlack;
  return {ok, fmt("DT %.1f", dt) + fmt(" <= GOUDA %.1f", g) + fmt(" <= oracle %.1f", o) + fmt(" <= supervised %.1f", s)};
}

Outcome c8_sc_bounds() {
  Rng rng(808);
  bool ok = true;
  for (int trial = 0; trial < 50 && ok; ++trial) {
    const std::size_t n = rng.uniform_index(3, 40);
    const std::size_t k = rng.uniform_index(1, n - 1);
    Matrix emb(static_cast<Eigen::Index>(n), 6);
    for (Eigen::Index i = 0; i < emb.rows(); ++i) emb.row(i) = rng.normal_vector(6).transpose();
    std::vector<ViewAngle> views;
    for (std::size_t i = 0; i < n; ++i) views.emplace_back(45.0 * static_cast<double>(rng.uniform_index(0, 7)));
    const double sc = stopping_criterion(emb, views, k, 10.0, AngleMode::Full);
    ok = sc >= 0.0 && sc <= static_cast<double>(k);
    std::vector<ViewAngle> same(n, ViewAngle(90.0));
    ok = ok && stopping_criterion(emb, same, k, 10.0, AngleMode::Full) == static_cast<double>(k);
  }
  // Two views, each sample's nearest neighbour sits in the other view.
  Matrix four(4, 2);
  four << 1.0, 0.0, 1.0, 0.1, 0.0, 1.0, 0.1, 1.0;
  const std::vector<ViewAngle> views{ViewAngle(0), ViewAngle(90), ViewAngle(0), ViewAngle(90)};
  const double zero = stopping_criterion(four, views, 1, 10.0, AngleMode::Full);
  ok = ok && zero == 0.0;
  return {ok, "random bounds + all-equal views == K + 4-point instance SC " + fmt("%.1f", zero)};
}

std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::directory_iterator(dir)) files.emplace_back(e.path().filename().string(), io::read_text(e.path()));
  std::sort(files.begin(), files.end());
  return files;
}

Outcome c9_determinism() {
  const RunConfig cfg = default_config();
  const fs::path root = fs::temp_directory_path() / "gouda_acceptance_determinism";
  fs::remove_all(root);
  for (const char* leg : {"a", "b"}) {
    const fs::path dir = root / leg;
    cli::cmd_synth(cfg, dir);
    cli::cmd_adapt(cfg, dir, dir);
    cli::cmd_eval(cfg, dir, dir / cli::kAdapterFile, dir);
  }
  const auto a = snapshot(root / "a");
  const auto b = snapshot(root / "b");
  const bool ok = !a.empty() && a == b;
  fs::remove_all(root);
  return {ok, std::to_string(a.size()) + " output files " + (ok ? "byte-identical" : "differ")};
}

Outcome c10_worked_instance() {
  Matrix d(5, 5);
  d << 0.00, 0.10, 0.45, 0.30, 0.50,  //
      0.10, 0.00, 0.20, 0.40, 0.60,   //
      0.45, 0.20, 0.00, 0.15, 0.55,   //
      0.30, 0.40, 0.15, 0.00, 0.05,   //
      0.50, 0.60, 0.55, 0.05, 0.00;
  const std::vector<ViewAngle> views{ViewAngle(0), ViewAngle(5), ViewAngle(8), ViewAngle(30), ViewAngle(35)};
  const auto got = select_triplets(DistanceMatrix(d), views, MiningConfig{});
  const std::vector<Triplet> expected{{0, 3, 2, 0.70}, {1, 3, 2, 0.60}};
  bool ok = got.size() == expected.size();
  for (std::size_t i = 0; ok && i < got.size(); ++i) {
    ok = got[i].anchor == expected[i].anchor && got[i].positive == expected[i].positive &&
         got[i].negative == expected[i].negative && std::abs(got[i].confidence - expected[i].confidence) < 1e-12;
  }
  const auto half = top_q(got, 50.0);
  ok = ok && half.size() == 1 && half[0].anchor == 0 && half[0].positive == 3 && half[0].negative == 2;
  const std::vector<std::string> labels{"A", "B", "A", "A", "B"};
  ok = ok && oracle_filter(got, labels).empty();
  const auto rates = correctness_rates(got, labels);
  ok = ok && rates.triplet_rate == 0.0 && rates.positive_rate == 50.0 && rates.negative_rate == 50.0;
  return {ok, std::to_string(got.size()) + " triplets, top-50% keeps " + std::to_string(half.size()) +
                  fmt(", rates %.0f", rates.triplet_rate.value_or(-1)) +
                  fmt("/%.0f", rates.positive_rate.value_or(-1)) + fmt("/%.0f", rates.negative_rate.value_or(-1))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"C1 mining matches brute force", c1_oracle_equivalence},
      {"C2 analytic gradient", c2_gradient},
      {"C3 loss scale invariance", c3_scale_invariance},
      {"C4 raw view bias", c4_view_bias},
      {"C5 adaptation gain", c5_adaptation_gain},
      {"C6 curriculum trend", c6_curriculum_trend},
      {"C7 ablation ordering", c7_ablation_ordering},
      {"C8 stopping criterion bounds", c8_sc_bounds},
      {"C9 determinism", c9_determinism},
      {"C10 worked instance", c10_worked_instance},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o{false, ""};
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %-30s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
