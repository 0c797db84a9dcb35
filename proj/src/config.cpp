#include "gouda/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gouda/error.hpp"
#include "gouda/evaluation.hpp"
#include "gouda/io.hpp"

namespace gouda {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    return io::parse_double(trim(value), key);
  } catch (const IoError&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(to_double(key, item));
  return out;
}

std::string list_text(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += io::format_double(values[i]);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

template <typename T>
Field uint_field(T RunConfig::*outer, std::size_t T::*member, const std::string& key) {
  return {[=](RunConfig& c, const std::string& v) { (c.*outer).*member = to_uint(key, v); },
          [=](const RunConfig& c) { return std::to_string((c.*outer).*member); }};
}

template <typename T>
Field real_field(T RunConfig::*outer, double T::*member, const std::string& key) {
  return {[=](RunConfig& c, const std::string& v) { (c.*outer).*member = to_double(key, v); },
          [=](const RunConfig& c) { return io::format_double((c.*outer).*member); }};
}

Field top_uint(std::size_t RunConfig::*member, const std::string& key) {
  return {[=](RunConfig& c, const std::string& v) { c.*member = to_uint(key, v); },
          [=](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field top_real(double RunConfig::*member, const std::string& key) {
  return {[=](RunConfig& c, const std::string& v) { c.*member = to_double(key, v); },
          [=](const RunConfig& c) { return io::format_double(c.*member); }};
}

// Ordered so canonical_text is stable.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    std::vector<std::pair<std::string, Field>> t;
    t.emplace_back("seed", Field{[](RunConfig& c, const std::string& v) { c.seed = to_uint("seed", v); },
                                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    t.emplace_back("out_dir", Field{[](RunConfig& c, const std::string& v) { c.out_dir = trim(v); },
                                    [](const RunConfig& c) { return c.out_dir; }});
    t.emplace_back("synth.n_identities", uint_field(&RunConfig::synth, &SynthConfig::n_identities, "synth.n_identities"));
    t.emplace_back("synth.views", Field{[](RunConfig& c, const std::string& v) { c.synth.views = to_list("synth.views", v); },
                                        [](const RunConfig& c) { return list_text(c.synth.views); }});
    t.emplace_back("synth.seqs_per_id_view", uint_field(&RunConfig::synth, &SynthConfig::seqs_per_id_view, "synth.seqs_per_id_view"));
    t.emplace_back("synth.frames_per_seq", uint_field(&RunConfig::synth, &SynthConfig::frames_per_seq, "synth.frames_per_seq"));
    t.emplace_back("synth.dim", uint_field(&RunConfig::synth, &SynthConfig::dim, "synth.dim"));
    t.emplace_back("synth.id_strength", real_field(&RunConfig::synth, &SynthConfig::id_strength, "synth.id_strength"));
    t.emplace_back("synth.view_bias", real_field(&RunConfig::synth, &SynthConfig::view_bias, "synth.view_bias"));
    t.emplace_back("synth.gait_amplitude", real_field(&RunConfig::synth, &SynthConfig::gait_amplitude, "synth.gait_amplitude"));
    t.emplace_back("synth.noise", real_field(&RunConfig::synth, &SynthConfig::noise, "synth.noise"));
    t.emplace_back("synth.gait_cycle", uint_field(&RunConfig::synth, &SynthConfig::gait_cycle, "synth.gait_cycle"));
    t.emplace_back("mining.similar_threshold", real_field(&RunConfig::mining, &MiningConfig::similar_threshold, "mining.similar_threshold"));
    t.emplace_back("mining.cross_threshold", real_field(&RunConfig::mining, &MiningConfig::cross_threshold, "mining.cross_threshold"));
    t.emplace_back("mining.margin", real_field(&RunConfig::mining, &MiningConfig::margin, "mining.margin"));
    t.emplace_back("mining.angle_mode",
                   Field{[](RunConfig& c, const std::string& v) {
                           const std::string m = trim(v);
                           if (m == "full") {
                             c.mining.angle_mode = AngleMode::Full;
                           } else if (m == "axial") {
                             c.mining.angle_mode = AngleMode::Axial;
                           } else {
                             throw ConfigError("mining.angle_mode: expected full or axial, got '" + v + "'");
                           }
                         },
                         [](const RunConfig& c) { return std::string(c.mining.angle_mode == AngleMode::Full ? "full" : "axial"); }});
    t.emplace_back("schedule.q", Field{[](RunConfig& c, const std::string& v) { c.schedule.stage_q_percent = to_list("schedule.q", v); },
                                       [](const RunConfig& c) { return list_text(c.schedule.stage_q_percent); }});
    t.emplace_back("schedule.replay", uint_field(&RunConfig::schedule, &CurriculumSchedule::replay_factor, "schedule.replay"));
    t.emplace_back("schedule.batch", uint_field(&RunConfig::schedule, &CurriculumSchedule::batch_triplets, "schedule.batch"));
    t.emplace_back("optim.lr", real_field(&RunConfig::optim, &AdamParams::lr, "optim.lr"));
    t.emplace_back("optim.weight_decay", real_field(&RunConfig::optim, &AdamParams::weight_decay, "optim.weight_decay"));
    t.emplace_back("optim.beta1", real_field(&RunConfig::optim, &AdamParams::beta1, "optim.beta1"));
    t.emplace_back("optim.beta2", real_field(&RunConfig::optim, &AdamParams::beta2, "optim.beta2"));
    t.emplace_back("optim.eps", real_field(&RunConfig::optim, &AdamParams::eps, "optim.eps"));
    t.emplace_back("loss.margin", real_field(&RunConfig::loss, &LossConfig::margin, "loss.margin"));
    t.emplace_back("loss.gouda_weight", real_field(&RunConfig::loss, &LossConfig::gouda_weight, "loss.gouda_weight"));
    t.emplace_back("loss.ssl_weight", real_field(&RunConfig::loss, &LossConfig::ssl_weight, "loss.ssl_weight"));
    t.emplace_back("sc.k", top_uint(&RunConfig::sc_k, "sc.k"));
    t.emplace_back("sc.checkpoint_every", top_uint(&RunConfig::checkpoint_every, "sc.checkpoint_every"));
    t.emplace_back("adapt.mode",
                   Field{[](RunConfig& c, const std::string& v) {
                           const std::string m = trim(v);
                           if (m == "gouda") {
                             c.mode = AdaptMode::Gouda;
                           } else if (m == "oracle") {
                             c.mode = AdaptMode::Oracle;
                           } else if (m == "supervised") {
                             c.mode = AdaptMode::Supervised;
                           } else {
                             throw ConfigError("adapt.mode: expected gouda, oracle or supervised, got '" + v + "'");
                           }
                         },
                         [](const RunConfig& c) {
                           switch (c.mode) {
                             case AdaptMode::Oracle: return std::string("oracle");
                             case AdaptMode::Supervised: return std::string("supervised");
                             default: return std::string("gouda");
                           }
                         }});
    t.emplace_back("adapt.supervised_iterations", top_uint(&RunConfig::supervised_iterations, "adapt.supervised_iterations"));
    t.emplace_back("adapt.augment_min_fraction", top_real(&RunConfig::augment_min_fraction, "adapt.augment_min_fraction"));
    t.emplace_back("adapt.validation_fraction", top_real(&RunConfig::validation_fraction, "adapt.validation_fraction"));
    t.emplace_back("eval.bin_width", top_real(&RunConfig::eval_bin_width, "eval.bin_width"));
    return t;
  }();
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& [name, field] : fields()) {
    if (name == key) return &field;
  }
  return nullptr;
}

}  // namespace

void RunConfig::validate() const {
  synth.validate();
  adapt_options().validate();
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("adapt.validation_fraction must lie in (0, 1)");
  }
  if (!(eval_bin_width >= 0.0 && eval_bin_width <= 360.0)) throw ConfigError("eval.bin_width must lie in [0, 360]");
}

AdaptOptions RunConfig::adapt_options() const {
  AdaptOptions o;
  o.mining = mining;
  o.schedule = schedule;
  o.loss = loss;
  o.adam = optim;
  o.augment.min_fraction = augment_min_fraction;
  o.sc_k = sc_k;
  o.checkpoint_every = checkpoint_every;
  o.seed = seed;
  o.oracle_filter = mode == AdaptMode::Oracle;
  return o;
}

SupervisedOptions RunConfig::supervised_options() const {
  SupervisedOptions o;
  o.adam = optim;
  o.margin = loss.margin;
  o.iterations = supervised_iterations;
  o.batch_triplets = schedule.batch_triplets;
  o.seed = seed;
  return o;
}

double RunConfig::bin_width() const {
  if (eval_bin_width > 0.0) return eval_bin_width;
  std::vector<double> v;
  for (double x : synth.views) v.push_back(ViewAngle(x).degrees());
  std::sort(v.begin(), v.end());
  double gap = 360.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) gap = std::min(gap, v[i] - v[i - 1]);
  }
  return gap;
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      const Field* f = find_field(name);
      if (!f && node.data().empty()) continue;  // section without keys
      if (!f) throw ConfigError("unknown config key '" + name + "'");
      f->set(cfg, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) {
      const std::string full = name + "." + key;
      const Field* f = find_field(full);
      if (!f) throw ConfigError("unknown config key '" + full + "'");
      f->set(cfg, leaf.data());
    }
  }
  cfg.synth.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const IoError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  return parse_config(text);
}

std::string canonical_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& [name, field] : fields()) {
    if (name == "out_dir") continue;  // where results go does not change them
    out += name + " = " + field.get(cfg) + "\n";
  }
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gouda
