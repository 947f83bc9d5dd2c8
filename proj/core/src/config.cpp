#include "holostream/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace holostream {

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) {
    ++begin;
  }
  while (end > begin &&
         std::isspace(static_cast<unsigned char>(text[end - 1]))) {
    --end;
  }
  return text.substr(begin, end - begin);
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, ',')) {
    parts.push_back(trim(item));
  }
  return parts;
}

}  // namespace

void ConfigFile::fail(const std::string& message, int line) const {
  std::ostringstream out;
  out << origin_;
  if (line > 0) out << ":" << line;
  out << ": " << message;
  throw std::runtime_error(out.str());
}

ConfigFile ConfigFile::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return from_string(text.str(), path);
}

ConfigFile ConfigFile::from_string(const std::string& text,
                                   const std::string& origin) {
  ConfigFile file;
  file.origin_ = origin;
  std::istringstream stream(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const std::size_t comment = raw.find_first_of("#;");
    const std::string line = trim(comment == std::string::npos
                                      ? raw
                                      : raw.substr(0, comment));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        file.fail("malformed section header '" + line + "'", line_no);
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) file.fail("empty section name", line_no);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      file.fail("expected 'key = value', got '" + line + "'", line_no);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) file.fail("empty key", line_no);
    if (section.empty()) {
      file.fail("key '" + key + "' appears before any [section]", line_no);
    }
    auto [it, inserted] =
        file.sections_[section].emplace(key, Entry{value, line_no, false});
    if (!inserted) {
      file.fail("duplicate key '" + section + "." + key + "' (first at line " +
                    std::to_string(it->second.line) + ")",
                line_no);
    }
  }
  return file;
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section,
                                          const std::string& key) const {
  const auto sec = sections_.find(section);
  if (sec == sections_.end()) return nullptr;
  const auto entry = sec->second.find(key);
  if (entry == sec->second.end()) return nullptr;
  entry->second.used = true;
  return &entry->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto sec = sections_.find(section);
  return sec != sections_.end() && sec->second.count(key) > 0;
}

const std::string& ConfigFile::require(const std::string& section,
                                       const std::string& key) {
  const Entry* entry = find(section, key);
  if (entry == nullptr) {
    fail("missing required key '" + section + "." + key + "'");
  }
  return entry->value;
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key) {
  return require(section, key);
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key,
                                   const std::string& fallback) {
  const Entry* entry = find(section, key);
  return entry == nullptr ? fallback : entry->value;
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key) {
  const Entry* entry = find(section, key);
  if (entry == nullptr) fail("missing required key '" + section + "." + key + "'");
  try {
    std::size_t used = 0;
    const double value = std::stod(entry->value, &used);
    if (used != entry->value.size()) throw std::invalid_argument("trailing");
    return value;
  } catch (const std::exception&) {
    fail("key '" + section + "." + key + "': '" + entry->value +
             "' is not a number",
         entry->line);
  }
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key, double fallback) {
  return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key) {
  const Entry* entry = find(section, key);
  if (entry == nullptr) fail("missing required key '" + section + "." + key + "'");
  try {
    std::size_t used = 0;
    const long value = std::stol(entry->value, &used);
    if (used != entry->value.size()) throw std::invalid_argument("trailing");
    return static_cast<int>(value);
  } catch (const std::exception&) {
    fail("key '" + section + "." + key + "': '" + entry->value +
             "' is not an integer",
         entry->line);
  }
}

int ConfigFile::get_int(const std::string& section, const std::string& key,
                        int fallback) {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) {
  const Entry* entry = find(section, key);
  if (entry == nullptr) return fallback;
  const std::string& v = entry->value;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail("key '" + section + "." + key + "': '" + v + "' is not a boolean",
       entry->line);
}

std::vector<double> ConfigFile::get_list(const std::string& section,
                                         const std::string& key) {
  const Entry* entry = find(section, key);
  if (entry == nullptr) fail("missing required key '" + section + "." + key + "'");
  std::vector<double> values;
  for (const std::string& part : split_commas(entry->value)) {
    if (part.empty()) {
      fail("key '" + section + "." + key + "': empty list element",
           entry->line);
    }
    try {
      std::size_t used = 0;
      values.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail("key '" + section + "." + key + "': '" + part + "' is not a number",
           entry->line);
    }
  }
  if (values.empty()) {
    fail("key '" + section + "." + key + "': empty list", entry->line);
  }
  return values;
}

std::vector<double> ConfigFile::get_list(const std::string& section,
                                         const std::string& key,
                                         const std::vector<double>& fallback) {
  return has(section, key) ? get_list(section, key) : fallback;
}

std::vector<std::string> ConfigFile::get_names(
    const std::string& section, const std::string& key,
    const std::vector<std::string>& fallback) {
  const Entry* entry = find(section, key);
  if (entry == nullptr) return fallback;
  std::vector<std::string> names = split_commas(entry->value);
  for (const std::string& name : names) {
    if (name.empty()) {
      fail("key '" + section + "." + key + "': empty list element",
           entry->line);
    }
  }
  if (names.empty()) {
    fail("key '" + section + "." + key + "': empty list", entry->line);
  }
  return names;
}

void ConfigFile::finish() const {
  for (const auto& [section, entries] : sections_) {
    for (const auto& [key, entry] : entries) {
      if (!entry.used) {
        fail("unknown key '" + section + "." + key + "'", entry.line);
      }
    }
  }
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void ExperimentConfig::validate() const {
  episode.validate();
  ppo.validate();
  if (hidden < 1) throw std::invalid_argument("config: hidden must be >= 1");
  if (train.episodes < 1 || evaluate.episodes < 1 ||
      sweep.episodes_per_point < 1) {
    throw std::invalid_argument("config: episode counts must be >= 1");
  }
  if (train.discounts.empty()) {
    throw std::invalid_argument("config: at least one training discount");
  }
  for (double g : train.discounts) {
    if (!(g > 0.0 && g <= 1.0)) {
      throw std::invalid_argument("config: discounts must lie in (0, 1]");
    }
  }
  for (Scheme scheme : train.schemes) {
    if (!scheme_is_learned(scheme)) {
      throw std::invalid_argument("config: train.schemes entry '" +
                                  scheme_name(scheme) +
                                  "' has no trainable policy");
    }
  }
  if (sweep.seeds.empty() || sweep.schemes.empty()) {
    throw std::invalid_argument("config: sweep needs seeds and schemes");
  }
  auto check_grid = [](const std::vector<double>& grid, const char* name) {
    if (grid.empty()) {
      throw std::invalid_argument(std::string("config: empty grid for ") +
                                  name);
    }
    for (double v : grid) {
      if (!(v > 0.0)) {
        throw std::invalid_argument(std::string("config: grid for ") + name +
                                    " must be positive");
      }
    }
  };
  check_grid(sweep.bandwidth_grid, "bandwidth");
  check_grid(sweep.deadline_grid, "deadline");
  check_grid(sweep.cycles_grid, "device cycles");
}

namespace {

std::vector<Scheme> parse_scheme_names(const std::vector<std::string>& names) {
  std::vector<Scheme> schemes;
  schemes.reserve(names.size());
  for (const std::string& name : names) schemes.push_back(parse_scheme(name));
  return schemes;
}

}  // namespace

ExperimentConfig parse_experiment_config(ConfigFile& file) {
  ExperimentConfig cfg;

  cfg.seed = static_cast<std::uint64_t>(file.get_int("scenario", "seed", 1));
  cfg.episode.dims.aps = file.get_int("scenario", "aps", 4);
  cfg.episode.dims.users = file.get_int("scenario", "users", 3);
  cfg.episode.dims.antennas = file.get_int("scenario", "antennas", 4);
  cfg.episode.dims.tiles = file.get_int("scenario", "tiles", 15);
  cfg.episode.dims.levels = 0;  // filled from the ladder below
  cfg.episode.dims.slots = file.get_int("scenario", "slots", 30);
  cfg.episode.fov_tiles = file.get_int("scenario", "fov_tiles", 6);

  const double bandwidth =
      file.get_double("radio", "bandwidth_mhz", 28.0) * 1e6;
  const double noise_density =
      dbm_to_watts(file.get_double("radio", "noise_dbm_per_hz", -174.0));
  cfg.episode.noise = NoiseModel{noise_density, bandwidth};
  const std::vector<double> power_dbm =
      file.get_list("radio", "ap_power_dbm", {38.0});
  if (power_dbm.size() != 1 &&
      power_dbm.size() != static_cast<std::size_t>(cfg.episode.dims.aps)) {
    throw std::runtime_error(
        "config: radio.ap_power_dbm must hold 1 or aps entries");
  }
  cfg.episode.ap_power.resize(cfg.episode.dims.aps);
  for (int m = 0; m < cfg.episode.dims.aps; ++m) {
    const double dbm = power_dbm.size() == 1
                           ? power_dbm[0]
                           : power_dbm[static_cast<std::size_t>(m)];
    cfg.episode.ap_power(m) = dbm_to_watts(dbm);
  }
  const std::vector<double> pathloss =
      file.get_list("radio", "pathloss", {1.5e-14});
  if (pathloss.size() != 1 &&
      pathloss.size() != static_cast<std::size_t>(cfg.episode.dims.aps)) {
    throw std::runtime_error(
        "config: radio.pathloss must hold 1 or aps entries");
  }
  cfg.episode.pathloss.resize(cfg.episode.dims.users, cfg.episode.dims.aps);
  for (int m = 0; m < cfg.episode.dims.aps; ++m) {
    const double gain = pathloss.size() == 1
                            ? pathloss[0]
                            : pathloss.at(static_cast<std::size_t>(m));
    cfg.episode.pathloss.col(m).setConstant(gain);
  }
  cfg.episode.min_sinr = file.get_double("radio", "min_sinr", 0.80);

  std::vector<double> ladder =
      file.get_list("media", "ladder_mbps", {3.0, 6.0, 9.0, 12.0});
  for (double& rate : ladder) rate *= 1e6;
  cfg.episode.ladder_rates = ladder;
  cfg.episode.dims.levels = static_cast<int>(ladder.size());
  cfg.episode.tile_time = file.get_double("media", "tile_time_ms", 21.0) * 1e-3;
  cfg.episode.compress_ratio =
      file.get_double("media", "compress_ratio", 0.80);
  cfg.episode.deadline_min =
      file.get_double("media", "deadline_ms_min", 9.0) * 1e-3;
  cfg.episode.deadline_max =
      file.get_double("media", "deadline_ms_max", 21.0) * 1e-3;
  cfg.episode.cycles_min =
      file.get_double("media", "cycles_ghz_min", 1.0) * 1e9;
  cfg.episode.cycles_max =
      file.get_double("media", "cycles_ghz_max", 3.5) * 1e9;
  cfg.episode.bits_per_cycle = file.get_double("media", "bits_per_cycle", 0.25);

  cfg.episode.weights.fluctuation_penalty =
      file.get_double("qoe", "fluctuation_penalty", 0.5);
  cfg.episode.weights.rebuffer_penalty =
      file.get_double("qoe", "rebuffer_penalty", 0.5);
  cfg.episode.weights.dist_weight = file.get_double("qoe", "dist_weight", 1.0);
  cfg.episode.weights.occ_weight = file.get_double("qoe", "occ_weight", 1.0);
  cfg.episode.weights.rate_weight = file.get_double("qoe", "rate_weight", 4.5);
  cfg.episode.buffer_capacity =
      file.get_double("qoe", "buffer_capacity_ms", 40.0) * 1e-3;
  cfg.episode.buffer_initial =
      file.get_double("qoe", "buffer_initial_ms",
                      0.5 * file.get_double("qoe", "buffer_capacity_ms", 40.0)) *
      1e-3;
  cfg.episode.strict_buffer = file.get_bool("qoe", "strict_buffer", true);

  cfg.episode.dist_min = file.get_double("fov", "dist_min", 1.0);
  cfg.episode.dist_max = file.get_double("fov", "dist_max", 5.0);
  cfg.episode.occ_max = file.get_double("fov", "occ_max", 3.0);

  cfg.ppo.discount = file.get_double("ppo", "discount", 0.90);
  cfg.ppo.gae_lambda = file.get_double("ppo", "gae_lambda", 1.0);
  cfg.ppo.clip = file.get_double("ppo", "clip", 0.2);
  cfg.ppo.epochs = file.get_int("ppo", "epochs", 4);
  cfg.ppo.minibatch = file.get_int("ppo", "minibatch", 64);
  cfg.ppo.batch = file.get_int("ppo", "batch", 240);
  cfg.ppo.actor_lr = file.get_double("ppo", "actor_lr", 3e-4);
  cfg.ppo.critic_lr = file.get_double("ppo", "critic_lr", 1e-3);
  cfg.ppo.entropy_coef = file.get_double("ppo", "entropy_coef", 0.01);
  cfg.ppo.max_grad_norm = file.get_double("ppo", "max_grad_norm", 0.5);
  cfg.ppo.normalize_advantages =
      file.get_bool("ppo", "normalize_advantages", true);
  cfg.ppo.reward_scale = file.get_double("ppo", "reward_scale", 0.01);
  cfg.ppo.critic_polyak = file.get_double("ppo", "critic_polyak", 0.0);
  cfg.hidden = file.get_int("ppo", "hidden", 128);

  cfg.train.episodes = file.get_int("train", "episodes", 600);
  cfg.train.discounts = file.get_list("train", "discounts", {0.90, 0.99});
  cfg.train.schemes = parse_scheme_names(file.get_names(
      "train", "schemes",
      {"proposed", "adaptive_nocomp", "adaptive_single_ap"}));

  cfg.evaluate.episodes = file.get_int("evaluate", "episodes", 40);

  const std::vector<double> seeds = file.get_list("sweep", "seeds", {1, 2, 3});
  cfg.sweep.seeds.clear();
  for (double s : seeds) {
    if (s < 0 || s != std::floor(s)) {
      throw std::runtime_error("config: sweep.seeds must be whole numbers");
    }
    cfg.sweep.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  cfg.sweep.episodes_per_point = file.get_int("sweep", "episodes_per_point", 12);
  cfg.sweep.schemes = parse_scheme_names(
      file.get_names("sweep", "schemes",
                     {"proposed", "fixed_coop", "adaptive_nocomp",
                      "adaptive_single_ap", "fixed_single_ap"}));
  cfg.sweep.bandwidth_grid =
      file.get_list("sweep", "bandwidth_grid_mhz", {20, 24, 28, 32, 36});
  for (double& v : cfg.sweep.bandwidth_grid) v *= 1e6;
  cfg.sweep.deadline_grid =
      file.get_list("sweep", "deadline_grid_ms", {9, 12, 15, 18, 21});
  for (double& v : cfg.sweep.deadline_grid) v *= 1e-3;
  cfg.sweep.cycles_grid =
      file.get_list("sweep", "cycles_grid_ghz", {1.0, 1.75, 2.5, 3.25, 4.0});
  for (double& v : cfg.sweep.cycles_grid) v *= 1e9;

  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  ConfigFile file = ConfigFile::from_file(path);
  ExperimentConfig cfg = parse_experiment_config(file);
  file.finish();
  return cfg;
}

}  // namespace holostream
