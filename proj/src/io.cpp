#include "gouda/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "gouda/error.hpp"

namespace gouda::io {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Reads non-empty lines, stripping a trailing '\r'.
std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line + 1);
}

std::size_t parse_index(const std::string& text, const std::string& context) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw IoError(context + ": bad integer '" + text + "'");
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw IoError("cannot format number");
  return std::string(buf, ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw IoError(context + ": bad number '" + text + "'");
  return value;
}

std::vector<GaitRecord> read_embeddings_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw IoError(path.string() + ": missing header");
  const auto header = split(lines[0]);
  if (header.size() < 4 || header[0] != "record_id" || header[1] != "identity" || header[2] != "view_deg") {
    throw IoError(path.string() + ": header must be record_id,identity,view_deg,e0,...");
  }
  const std::size_t dim = header.size() - 3;
  std::vector<GaitRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    if (cells.size() != header.size()) throw IoError(where(path, i) + ": expected " + std::to_string(header.size()) + " columns");
    GaitRecord r;
    r.record_id = cells[0];
    if (!cells[1].empty()) r.identity = cells[1];
    const double view = parse_double(cells[2], where(path, i));
    if (!(view >= 0.0 && view < 360.0)) throw IoError(where(path, i) + ": view_deg must lie in [0, 360)");
    r.view = ViewAngle(view);
    r.embedding.resize(static_cast<Eigen::Index>(dim));
    for (std::size_t c = 0; c < dim; ++c) r.embedding(static_cast<Eigen::Index>(c)) = parse_double(cells[c + 3], where(path, i));
    validate_record(r);
    records.push_back(std::move(r));
  }
  return records;
}

void write_embeddings_csv(const std::filesystem::path& path, const std::vector<GaitRecord>& records) {
  auto out = open_out(path);
  const Eigen::Index dim = records.empty() ? 0 : records.front().embedding.size();
  out << "record_id,identity,view_deg";
  for (Eigen::Index c = 0; c < dim; ++c) out << ",e" << c;
  out << '\n';
  for (const auto& r : records) {
    out << r.record_id << ',' << r.identity.value_or("") << ',' << format_double(r.view.degrees());
    for (Eigen::Index c = 0; c < r.embedding.size(); ++c) out << ',' << format_double(r.embedding(c));
    out << '\n';
  }
}

void read_frames_csv(const std::filesystem::path& path, std::vector<GaitRecord>& records) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw IoError(path.string() + ": missing header");
  const auto header = split(lines[0]);
  if (header.size() < 3 || header[0] != "record_id" || header[1] != "frame_idx") {
    throw IoError(path.string() + ": header must be record_id,frame_idx,f0,...");
  }
  const std::size_t dim = header.size() - 2;
  std::map<std::string, std::vector<std::vector<double>>> by_record;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    if (cells.size() != header.size()) throw IoError(where(path, i) + ": expected " + std::to_string(header.size()) + " columns");
    auto& frames = by_record[cells[0]];
    if (parse_index(cells[1], where(path, i)) != frames.size()) throw IoError(where(path, i) + ": frame_idx out of sequence");
    std::vector<double> row(dim);
    for (std::size_t c = 0; c < dim; ++c) row[c] = parse_double(cells[c + 2], where(path, i));
    frames.push_back(std::move(row));
  }
  std::map<std::string, GaitRecord*> index;
  for (auto& r : records) index[r.record_id] = &r;
  for (auto& [id, frames] : by_record) {
    const auto it = index.find(id);
    if (it == index.end()) throw IoError(path.string() + ": frames for unknown record '" + id + "'");
    Matrix m(static_cast<Eigen::Index>(frames.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t t = 0; t < frames.size(); ++t) {
      for (std::size_t c = 0; c < dim; ++c) m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = frames[t][c];
    }
    it->second->frames = std::move(m);
    validate_record(*it->second);
  }
}

void write_frames_csv(const std::filesystem::path& path, const std::vector<GaitRecord>& records) {
  auto out = open_out(path);
  Eigen::Index dim = 0;
  for (const auto& r : records) {
    if (r.frames) {
      dim = r.frames->cols();
      break;
    }
  }
  out << "record_id,frame_idx";
  for (Eigen::Index c = 0; c < dim; ++c) out << ",f" << c;
  out << '\n';
  for (const auto& r : records) {
    if (!r.frames) continue;
    for (Eigen::Index t = 0; t < r.frames->rows(); ++t) {
      out << r.record_id << ',' << t;
      for (Eigen::Index c = 0; c < r.frames->cols(); ++c) out << ',' << format_double((*r.frames)(t, c));
      out << '\n';
    }
  }
}

std::vector<KeypointFrame> read_keypoints_csv(const std::filesystem::path& path) {
  static const std::string kHeader =
      "frame,lhip_x,lhip_y,lhip_z,rhip_x,rhip_y,rhip_z,lsho_x,lsho_y,lsho_z,rsho_x,rsho_y,rsho_z";
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != kHeader) throw IoError(path.string() + ": header must be " + kHeader);
  std::vector<KeypointFrame> frames;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    if (cells.size() != 13) throw IoError(where(path, i) + ": expected 13 columns");
    double v[12];
    for (std::size_t c = 0; c < 12; ++c) v[c] = parse_double(cells[c + 1], where(path, i));
    frames.push_back({{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, {v[6], v[7], v[8]}, {v[9], v[10], v[11]}});
  }
  return frames;
}

LinearAdapter read_adapter_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const auto n = static_cast<Eigen::Index>(lines.size());
  if (n == 0) throw IoError(path.string() + ": empty adapter");
  Matrix w(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto cells = split(lines[static_cast<std::size_t>(r)]);
    if (static_cast<Eigen::Index>(cells.size()) != n) throw IoError(where(path, static_cast<std::size_t>(r)) + ": adapter must be square");
    for (Eigen::Index c = 0; c < n; ++c) w(r, c) = parse_double(cells[static_cast<std::size_t>(c)], where(path, static_cast<std::size_t>(r)));
  }
  if (!w.allFinite()) throw IoError(path.string() + ": non-finite adapter weight");
  return {std::move(w)};
}

void write_adapter_csv(const std::filesystem::path& path, const LinearAdapter& adapter) {
  auto out = open_out(path);
  for (Eigen::Index r = 0; r < adapter.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < adapter.weights.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(adapter.weights(r, c));
    }
    out << '\n';
  }
}

std::vector<TripletRow> read_triplets_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "anchor_id,positive_id,negative_id,confidence,stage") {
    throw IoError(path.string() + ": header must be anchor_id,positive_id,negative_id,confidence,stage");
  }
  std::vector<TripletRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    if (cells.size() != 5) throw IoError(where(path, i) + ": expected 5 columns");
    rows.push_back({cells[0], cells[1], cells[2], parse_double(cells[3], where(path, i)), parse_index(cells[4], where(path, i))});
  }
  return rows;
}

void write_triplets_csv(const std::filesystem::path& path, const std::vector<TripletRow>& rows) {
  auto out = open_out(path);
  out << "anchor_id,positive_id,negative_id,confidence,stage\n";
  for (const auto& r : rows) {
    out << r.anchor_id << ',' << r.positive_id << ',' << r.negative_id << ',' << format_double(r.confidence) << ','
        << r.stage << '\n';
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gouda::io
