#include "gouda/runner.hpp"

#include <map>
#include <sstream>

#include "gouda/error.hpp"
#include "gouda/io.hpp"
#include "gouda/oracles.hpp"

namespace gouda::cli {
namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_json(const fs::path& path, const json& doc) { io::write_text(path, doc.dump(2) + "\n"); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

json rates_to_json(const CorrectnessRates& r) {
  return {{"count", r.count},
          {"triplet_rate", optional_number(r.triplet_rate)},
          {"positive_rate", optional_number(r.positive_rate)},
          {"negative_rate", optional_number(r.negative_rate)}};
}

json histogram_to_json(const NeighborhoodHistogram& h) { return {{"counts", h.counts}, {"sc", h.sc}}; }

LinearAdapter load_adapter(const std::optional<fs::path>& path, Eigen::Index dim) {
  if (!path) return LinearAdapter::identity(dim);
  LinearAdapter adapter = io::read_adapter_csv(*path);
  if (adapter.dim() != dim) throw IoError(path->string() + ": adapter dimension does not match embeddings");
  return adapter;
}

}  // namespace

void override_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.synth.seed = seed;
}

std::vector<GaitRecord> load_dataset(const fs::path& data_dir) {
  const fs::path emb = data_dir / kEmbeddingsFile;
  if (!fs::exists(emb)) throw IoError("missing dataset file " + emb.string());
  auto records = io::read_embeddings_csv(emb);
  const fs::path frames = data_dir / kFramesFile;
  if (fs::exists(frames)) io::read_frames_csv(frames, records);
  return records;
}

json provenance(const RunConfig& cfg) { return {{"config_hash", config_hash(cfg)}, {"seed", cfg.seed}}; }

json trace_to_json(const TrainingTrace& trace) {
  json stages = json::array();
  for (const auto& s : trace.stages) {
    json js = {{"q", s.q}, {"n_valid", s.n_valid}, {"n_selected", s.n_selected}, {"iterations", s.iterations}};
    if (s.correct_triplet_rate) js["correct_triplet_rate"] = *s.correct_triplet_rate;
    if (s.valid_correct_rate) js["valid_correct_triplet_rate"] = *s.valid_correct_rate;
    if (s.warning) js["warning"] = *s.warning;
    stages.push_back(std::move(js));
  }
  json checkpoints = json::array();
  for (const auto& c : trace.checkpoints) checkpoints.push_back({{"iter", c.iteration}, {"stage", c.stage}, {"sc", c.sc}});
  return {{"stages", stages},
          {"loss", trace.loss},
          {"checkpoints", checkpoints},
          {"chosen", {{"iter", trace.chosen.iteration}, {"stage", trace.chosen.stage}, {"sc", trace.chosen.sc}}}};
}

json rank1_to_json(const Rank1Report& report) {
  json rows = json::array();
  for (const auto& row : report.per_pair) {
    json r = json::array();
    for (const auto& v : row) r.push_back(optional_number(v));
    rows.push_back(std::move(r));
  }
  return {{"views", report.views},
          {"per_pair", rows},
          {"overall_cross_view", optional_number(report.overall_cross_view)},
          {"identical_view_mean", optional_number(report.identical_view_mean)}};
}

json correctness_to_json(const CorrectnessReport& report) {
  json stages = json::array();
  for (const auto& s : report.per_stage) {
    json js = rates_to_json(s.rates);
    js["stage"] = s.stage;
    stages.push_back(std::move(js));
  }
  return {{"overall", rates_to_json(report.overall)}, {"per_stage", stages}};
}

std::string rank1_per_pair_csv(const Rank1Report& report) {
  std::ostringstream out;
  out << "probe\\gallery";
  for (double v : report.views) out << ',' << io::format_double(v);
  out << '\n';
  for (std::size_t i = 0; i < report.views.size(); ++i) {
    out << io::format_double(report.views[i]);
    for (const auto& v : report.per_pair[i]) {
      out << ',';
      if (v) out << io::format_double(*v);
    }
    out << '\n';
  }
  return out.str();
}

std::string confusion_csv(const ViewConfusion& confusion) {
  std::ostringstream out;
  const std::size_t bins = confusion.rows.size();
  out << "anchor\\positive";
  for (std::size_t b = 0; b < bins; ++b) out << ',' << io::format_double(static_cast<double>(b) * confusion.bin_width);
  out << '\n';
  for (std::size_t r = 0; r < bins; ++r) {
    out << io::format_double(static_cast<double>(r) * confusion.bin_width);
    for (std::size_t c = 0; c < bins; ++c) {
      out << ',';
      if (confusion.rows[r]) out << io::format_double((*confusion.rows[r])[c]);
    }
    out << '\n';
  }
  return out.str();
}

void cmd_synth(const RunConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  const SynthDataset ds = generate_target_domain(cfg.synth);
  ensure_dir(out_dir);
  io::write_embeddings_csv(out_dir / kEmbeddingsFile, ds.records);
  io::write_frames_csv(out_dir / kFramesFile, ds.records);
  const SynthConfig& s = cfg.synth;
  json sidecar = {{"provenance", provenance(cfg)},
                  {"synth_config",
                   {{"n_identities", s.n_identities},
                    {"views", s.views},
                    {"seqs_per_id_view", s.seqs_per_id_view},
                    {"frames_per_seq", s.frames_per_seq},
                    {"dim", s.dim},
                    {"id_strength", s.id_strength},
                    {"view_bias", s.view_bias},
                    {"gait_amplitude", s.gait_amplitude},
                    {"noise", s.noise},
                    {"gait_cycle", s.gait_cycle},
                    {"seed", s.seed}}},
                  {"records", ds.records.size()},
                  {"files", {kEmbeddingsFile, kFramesFile}}};
  write_json(out_dir / kSynthSidecar, sidecar);
}

TrainingTrace cmd_adapt(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir) {
  cfg.validate();
  const auto records = load_dataset(data_dir);
  if (records.empty()) throw IoError("dataset in " + data_dir.string() + " has no records");
  const DataSplit split = split_validation(records, cfg.validation_fraction);

  LinearAdapter adapter;
  TrainingTrace trace;
  std::vector<io::TripletRow> rows;
  std::string mode = "gouda";
  if (cfg.mode == AdaptMode::Supervised) {
    mode = "supervised";
    adapter = supervised_adapt(split.train, cfg.supervised_options());
    trace.chosen = {cfg.supervised_iterations, 0, 0.0};
  } else {
    if (cfg.mode == AdaptMode::Oracle) mode = "oracle";
    AdaptResult result = adapt(split.train, split.validation, cfg.adapt_options());
    adapter = std::move(result.adapter);
    trace = std::move(result.trace);
    for (std::size_t s = 0; s < trace.stages.size(); ++s) {
      for (const auto& t : trace.stages[s].selected) {
        rows.push_back({split.train[t.anchor].record_id, split.train[t.positive].record_id,
                        split.train[t.negative].record_id, t.confidence, s + 1});
      }
    }
  }

  ensure_dir(out_dir);
  io::write_adapter_csv(out_dir / kAdapterFile, adapter);
  io::write_triplets_csv(out_dir / kTripletsFile, rows);
  json doc = trace_to_json(trace);
  doc["mode"] = mode;
  doc["provenance"] = provenance(cfg);
  doc["n_train"] = split.train.size();
  doc["n_validation"] = split.validation.size();
  doc["files"] = {kAdapterFile, kTripletsFile};
  write_json(out_dir / kTraceFile, doc);
  return trace;
}

Rank1Report cmd_eval(const RunConfig& cfg, const fs::path& data_dir, const std::optional<fs::path>& adapter_path,
                     const fs::path& out_dir) {
  cfg.validate();
  const auto records = load_dataset(data_dir);
  if (records.empty()) throw IoError("dataset in " + data_dir.string() + " has no records");
  const LinearAdapter adapter = load_adapter(adapter_path, records.front().embedding.size());
  const Rank1Report report = rank1_cross_view(records, adapter);
  const NeighborhoodHistogram hist = view_neighborhood_histogram(records, adapter, cfg.sc_k,
                                                                 cfg.mining.similar_threshold, cfg.mining.angle_mode);
  ensure_dir(out_dir);
  json doc = rank1_to_json(report);
  doc["provenance"] = provenance(cfg);
  doc["files"] = {kPerPairFile};
  write_json(out_dir / kRank1File, doc);
  io::write_text(out_dir / kPerPairFile, rank1_per_pair_csv(report));
  json nb = histogram_to_json(hist);
  nb["k"] = cfg.sc_k;
  nb["similar_threshold"] = cfg.mining.similar_threshold;
  nb["provenance"] = provenance(cfg);
  write_json(out_dir / kNeighborhoodFile, nb);
  return report;
}

void cmd_analyze(const RunConfig& cfg, const fs::path& data_dir, const fs::path& triplets_path,
                 const std::optional<fs::path>& adapter_path, const fs::path& out_dir) {
  cfg.validate();
  const auto records = load_dataset(data_dir);
  if (records.empty()) throw IoError("dataset in " + data_dir.string() + " has no records");
  if (!fs::exists(triplets_path)) throw IoError("missing triplet file " + triplets_path.string());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) index.emplace(records[i].record_id, i);
  auto lookup = [&](const std::string& id) {
    const auto it = index.find(id);
    if (it == index.end()) throw IoError(triplets_path.string() + ": unknown record '" + id + "'");
    return it->second;
  };
  std::vector<Triplet> triplets;
  std::vector<std::size_t> stages;
  for (const auto& row : io::read_triplets_csv(triplets_path)) {
    triplets.push_back({lookup(row.anchor_id), lookup(row.positive_id), lookup(row.negative_id), row.confidence});
    stages.push_back(row.stage);
  }

  ensure_dir(out_dir);
  const bool labeled = std::all_of(records.begin(), records.end(), [](const GaitRecord& r) { return r.identity.has_value(); });
  if (labeled) {
    const auto labels = identity_labels(records);
    json doc = correctness_to_json(triplet_correctness(triplets, labels, stages));
    doc["provenance"] = provenance(cfg);
    write_json(out_dir / kCorrectnessFile, doc);
  }
  std::vector<ViewAngle> views;
  for (const auto& r : records) views.push_back(r.view);
  io::write_text(out_dir / kConfusionFile, confusion_csv(positive_view_confusion(triplets, views, cfg.bin_width())));

  const Eigen::Index dim = records.front().embedding.size();
  json doc = {{"provenance", provenance(cfg)},
              {"k", cfg.sc_k},
              {"bin_width", cfg.bin_width()},
              {"neighborhood_raw", histogram_to_json(view_neighborhood_histogram(
                                       records, LinearAdapter::identity(dim), cfg.sc_k, cfg.mining.similar_threshold,
                                       cfg.mining.angle_mode))}};
  if (adapter_path) {
    doc["neighborhood_adapted"] = histogram_to_json(view_neighborhood_histogram(
        records, load_adapter(adapter_path, dim), cfg.sc_k, cfg.mining.similar_threshold, cfg.mining.angle_mode));
  }
  doc["files"] = labeled ? json{kConfusionFile, kCorrectnessFile} : json{kConfusionFile};
  write_json(out_dir / kAnalysisFile, doc);
}

int cmd_oracle_check(const RunConfig& cfg, std::size_t instances, bool inject_fault, std::ostream& out) {
  oracle::CheckOptions options;
  options.instances = instances;
  options.seed = cfg.seed;
  options.inject_fault = inject_fault;
  const oracle::CheckReport report = oracle::run_oracle_check(options);
  for (const auto& line : report.lines) out << line << '\n';
  if (!report.passed) {
    out << "FAILED: " << report.first_failure << '\n';
    return 1;
  }
  out << "all oracle checks passed\n";
  return 0;
}

}  // namespace gouda::cli
