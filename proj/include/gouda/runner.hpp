#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "gouda/adaptation.hpp"
#include "gouda/config.hpp"
#include "gouda/evaluation.hpp"

// Experiment commands behind the `gouda` executable. Every command writes to
// fixed file names inside its output directory.
namespace gouda::cli {

namespace fs = std::filesystem;

inline constexpr const char* kEmbeddingsFile = "embeddings.csv";
inline constexpr const char* kFramesFile = "frames.csv";
inline constexpr const char* kSynthSidecar = "synth_config.json";
inline constexpr const char* kAdapterFile = "adapter.csv";
inline constexpr const char* kTraceFile = "trace.json";
inline constexpr const char* kTripletsFile = "triplets.csv";
inline constexpr const char* kRank1File = "rank1.json";
inline constexpr const char* kPerPairFile = "rank1_per_pair.csv";
inline constexpr const char* kNeighborhoodFile = "neighborhood.json";
inline constexpr const char* kCorrectnessFile = "correctness.json";
inline constexpr const char* kConfusionFile = "positive_confusion.csv";
inline constexpr const char* kAnalysisFile = "analysis.json";

/// Applies a --seed override to every seeded component.
void override_seed(RunConfig& cfg, std::uint64_t seed);

/// Reads embeddings.csv (and frames.csv when present) from `data_dir`.
/// Throws IoError naming the missing path.
std::vector<GaitRecord> load_dataset(const fs::path& data_dir);

nlohmann::json provenance(const RunConfig& cfg);
nlohmann::json trace_to_json(const TrainingTrace& trace);
nlohmann::json rank1_to_json(const Rank1Report& report);
nlohmann::json correctness_to_json(const CorrectnessReport& report);
std::string rank1_per_pair_csv(const Rank1Report& report);
std::string confusion_csv(const ViewConfusion& confusion);

/// embeddings.csv, frames.csv, synth_config.json
void cmd_synth(const RunConfig& cfg, const fs::path& out_dir);

/// adapter.csv, trace.json, triplets.csv. Returns the trace (empty stages in
/// supervised mode).
TrainingTrace cmd_adapt(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir);

/// rank1.json, rank1_per_pair.csv, neighborhood.json. Without an adapter the
/// raw embeddings are evaluated (direct testing).
Rank1Report cmd_eval(const RunConfig& cfg, const fs::path& data_dir, const std::optional<fs::path>& adapter,
                     const fs::path& out_dir);

/// correctness.json (labelled data only), positive_confusion.csv,
/// analysis.json.
void cmd_analyze(const RunConfig& cfg, const fs::path& data_dir, const fs::path& triplets,
                 const std::optional<fs::path>& adapter, const fs::path& out_dir);

/// Prints one line per check; returns 0 when everything passes, 1 otherwise.
int cmd_oracle_check(const RunConfig& cfg, std::size_t instances, bool inject_fault, std::ostream& out);

}  // namespace gouda::cli
