#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gouda/adapter.hpp"
#include "gouda/embedding.hpp"
#include "gouda/geometry.hpp"
#include "gouda/mining.hpp"

namespace gouda::io {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text, const std::string& context);

/// `record_id,identity,view_deg,e0,...,e{d-1}`; identity may be empty.
std::vector<GaitRecord> read_embeddings_csv(const std::filesystem::path& path);
void write_embeddings_csv(const std::filesystem::path& path, const std::vector<GaitRecord>& records);

/// `record_id,frame_idx,f0,...,f{k-1}`. Reading attaches frames to the
/// matching records; frame_idx must run 0..T-1 per record.
void read_frames_csv(const std::filesystem::path& path, std::vector<GaitRecord>& records);
void write_frames_csv(const std::filesystem::path& path, const std::vector<GaitRecord>& records);

/// `frame,lhip_x,lhip_y,lhip_z,rhip_x,...,rsho_z`, one row per frame.
std::vector<KeypointFrame> read_keypoints_csv(const std::filesystem::path& path);

/// d rows of d comma-separated weights.
LinearAdapter read_adapter_csv(const std::filesystem::path& path);
void write_adapter_csv(const std::filesystem::path& path, const LinearAdapter& adapter);

struct TripletRow {
  std::string anchor_id;
  std::string positive_id;
  std::string negative_id;
  double confidence = 0.0;
  std::size_t stage = 0;
};

/// `anchor_id,positive_id,negative_id,confidence,stage`.
std::vector<TripletRow> read_triplets_csv(const std::filesystem::path& path);
void write_triplets_csv(const std::filesystem::path& path, const std::vector<TripletRow>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace gouda::io
