#include "rotkit/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "json.hpp"
#include <openssl/evp.h>

namespace rotkit::io {

using nlohmann::json;

ParseError::ParseError(const std::string& source, int line, const std::string& what)
    : std::invalid_argument(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {

constexpr const char* kTrajectoryMagic = "# rotkit trajectory v1";

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& s, const std::string& source, int line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(source, line, "expected a number, got '" + s + "'");
  }
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; convert it to a line number.
    auto offset = std::min<std::size_t>(e.byte, text.size());
    int line = 1 + static_cast<int>(std::count(text.begin(),
                                               text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
    throw ParseError(source, line, "invalid JSON");
  }
}

PayoffMatrix parse_payoff(const json& j, const std::string& source) {
  if (!j.is_array() || j.size() != 4) {
    throw ParseError(source, 0, "payoff must be four rational strings in row-major order");
  }
  PayoffMatrix m;
  for (int k = 0; k < 4; ++k) {
    const auto& v = j[static_cast<std::size_t>(k)];
    std::string text = v.is_string() ? v.get<std::string>() : v.dump();
    try {
      m(k / 2, k % 2) = parse_rational(text);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, 0, e.what());
    }
  }
  return m;
}

template <class T>
T require(const json& j, const char* key, const std::string& source) {
  if (!j.contains(key)) throw ParseError(source, 0, std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(source, 0, std::string("bad value for '") + key + "'");
  }
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << kTrajectoryMagic << "\n";
  out << "N," << traj.population_size() << "\n";
  out << "group," << traj.group_id << "\n";
  out << "game," << traj.game_id << "\n";
  out << "t,p_count,q_count\n";
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    out << t << "," << traj.states[t].p_count() << "," << traj.states[t].q_count() << "\n";
  }
}

Trajectory read_trajectory(std::istream& in, const std::string& source) {
  Trajectory traj;
  std::string line;
  int line_no = 0;
  int n = 0;
  bool have_n = false, have_group = false, have_game = false, in_rows = false;

  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto fields = split_csv(text);
    if (!in_rows) {
      if (fields.size() == 3 && fields[0] == "t" && fields[1] == "p_count" &&
          fields[2] == "q_count") {
        if (!have_n || !have_group || !have_game) {
          throw ParseError(source, line_no, "header needs N, group and game before rows");
        }
        in_rows = true;
        continue;
      }
      if (fields.size() != 2) throw ParseError(source, line_no, "expected 'key,value' header line");
      if (fields[0] == "N") {
        n = parse_number<int>(fields[1], source, line_no);
        if (n < 1) throw ParseError(source, line_no, "N must be positive");
        have_n = true;
      } else if (fields[0] == "group") {
        traj.group_id = fields[1];
        have_group = true;
      } else if (fields[0] == "game") {
        traj.game_id = fields[1];
        have_game = true;
      } else {
        throw ParseError(source, line_no, "unknown header key '" + fields[0] + "'");
      }
      continue;
    }
    if (fields.size() != 3) throw ParseError(source, line_no, "expected 't,p_count,q_count'");
    auto t = parse_number<long long>(fields[0], source, line_no);
    int p = parse_number<int>(fields[1], source, line_no);
    int q = parse_number<int>(fields[2], source, line_no);
    if (t != static_cast<long long>(traj.states.size())) {
      throw NonContiguousRounds(source + ":" + std::to_string(line_no) + ": round " +
                                std::to_string(t) + " follows round " +
                                std::to_string(static_cast<long long>(traj.states.size()) - 1));
    }
    if (p < 0 || p > n || q < 0 || q > n) {
      throw LatticeViolation(source + ":" + std::to_string(line_no) + ": counts (" +
                             std::to_string(p) + ", " + std::to_string(q) + ") outside [0, " +
                             std::to_string(n) + "]");
    }
    traj.states.emplace_back(p, q, n);
  }
  if (!in_rows) throw ParseError(source, line_no, "missing 't,p_count,q_count' row header");
  return traj;
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  write_trajectory(out, traj);
  if (!out) throw IoError("failed writing " + path.string());
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_trajectory(in, path.string());
}

std::vector<GameSpec> parse_games(const std::string& text, const std::string& source) {
  json j = parse_json(text, source);
  if (!j.is_object() || !j.contains("games") || !j["games"].is_array()) {
    throw ParseError(source, 1, "expected an object with a 'games' array");
  }
  std::vector<GameSpec> out;
  for (const auto& g : j["games"]) {
    GameSpec spec;
    spec.id = require<std::string>(g, "id", source);
    if (!g.contains("payoff")) throw ParseError(source, 0, "game '" + spec.id + "' has no payoff");
    spec.payoff = parse_payoff(g["payoff"], source);
    if (g.contains("practice")) spec.practice = require<bool>(g, "practice", source);
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<GameSpec> load_games(const std::filesystem::path& path) {
  return parse_games(read_text(path), path.string());
}

Schedule parse_schedule(const std::string& text, const std::string& source) {
  json j = parse_json(text, source);
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array()) {
    throw ParseError(source, 1, "expected an object with an 'entries' array");
  }
  Schedule s;
  for (const auto& e : j["entries"]) {
    ScheduleEntry entry;
    entry.game_id = require<std::string>(e, "game", source);
    entry.rounds = require<int>(e, "rounds", source);
    if (!e.contains("payoff")) throw ParseError(source, 0, "entry '" + entry.game_id + "' has no payoff");
    entry.payoff = parse_payoff(e["payoff"], source);
    s.entries.push_back(std::move(entry));
  }
  s.validate();
  return s;
}

Schedule load_schedule(const std::filesystem::path& path) {
  return parse_schedule(read_text(path), path.string());
}

SimConfig parse_config(const std::string& text, const std::string& source) {
  json j = parse_json(text, source);
  if (!j.is_object()) throw ParseError(source, 1, "config must be a JSON object");
  SimConfig c;
  try {
    c.population_size = j.value("population_size", c.population_size);
    c.seed = j.value("seed", c.seed);
    c.tremble = j.value("tremble", c.tremble);
    if (j.contains("rule")) {
      const auto& r = j["rule"];
      auto type = require<std::string>(r, "type", source);
      if (type == "logit_fictitious_play") {
        LogitFictitiousPlay lfp;
        lfp.recency = r.value("recency", lfp.recency);
        lfp.precision = r.value("precision", lfp.precision);
        c.rule = lfp;
      } else if (type == "proportional_imitation") {
        ProportionalImitation imit;
        imit.rate = r.value("rate", imit.rate);
        c.rule = imit;
      } else {
        throw ParseError(source, 0, "unknown rule type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(source, 0, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text(path), path.string());
}

std::string config_to_json(const SimConfig& c) {
  json j;
  j["population_size"] = c.population_size;
  j["seed"] = c.seed;
  j["tremble"] = c.tremble;
  if (const auto* lfp = std::get_if<LogitFictitiousPlay>(&c.rule)) {
    j["rule"] = {{"type", "logit_fictitious_play"}, {"recency", lfp->recency},
                 {"precision", lfp->precision}};
  } else {
    j["rule"] = {{"type", "proportional_imitation"},
                 {"rate", std::get<ProportionalImitation>(c.rule).rate}};
  }
  return j.dump(2);
}

RotationTable read_table(std::istream& in, const std::string& source) {
  RotationTable table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto fields = split_csv(text);
    if (!have_header) {
      if (fields.size() < 2 || fields[0] != "game") {
        throw ParseError(source, line_no, "table header must start with 'game'");
      }
      table.groups.assign(fields.begin() + 1, fields.end());
      have_header = true;
      continue;
    }
    if (fields.size() != table.groups.size() + 1) {
      throw ParseError(source, line_no, "row width differs from header");
    }
    table.games.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t k = 1; k < fields.size(); ++k) {
      row.push_back(parse_number<double>(fields[k], source, line_no));
    }
    table.values.push_back(std::move(row));
  }
  if (!have_header) throw ParseError(source, line_no, "empty table");
  return table;
}

RotationTable load_table(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_table(in, path.string());
}

void write_table(std::ostream& out, const RotationTable& table) {
  out << "game";
  for (const auto& g : table.groups) out << "," << g;
  out << "\n";
  for (std::size_t i = 0; i < table.games.size(); ++i) {
    out << table.games[i];
    for (double v : table.values[i]) out << "," << format_double(v);
    out << "\n";
  }
}

void write_report(std::ostream& out, const RotationReport& r) {
  out << "group: " << r.group_id << "\n";
  out << "game: " << r.game_id << "\n";
  out << "transitions: " << r.l_series.size() << "\n";
  out << "l_accumulated: " << to_string(r.l_accumulated) << "\n";
  out << "l_accumulated_decimal: " << format_double(to_double(r.l_accumulated)) << "\n";
  out << "l_mean: " << to_string(r.l_mean) << "\n";
  out << "l_mean_decimal: " << format_double(to_double(r.l_mean)) << "\n";
  if (r.cri) {
    out << "cri: " << format_double(r.cri->value) << "\n";
    out << "cri_counterclockwise: " << r.cri->counterclockwise << "\n";
    out << "cri_clockwise: " << r.cri->clockwise << "\n";
    out << "cri_no_crossings: " << (r.cri->no_crossings ? "true" : "false") << "\n";
  }
  if (r.avg_distance) out << "avg_distance: " << format_double(*r.avg_distance) << "\n";
}

void write_results(std::ostream& out, const std::vector<stats::TestResult>& results) {
  out << "test,statistic,df,p\n";
  for (const auto& r : results) {
    out << r.name << "," << format_double(r.statistic) << "," << format_double(r.df) << ","
        << format_double(r.p) << "\n";
  }
}

std::string sha256_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 unavailable");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

void save_manifest(const std::filesystem::path& path, const RunManifest& m) {
  json j;
  j["schedule"] = m.schedule_path;
  j["config"] = json::parse(config_to_json(m.config));
  j["groups"] = m.groups;
  j["output_dir"] = m.output_dir;
  j["files"] = json::array();
  for (const auto& f : m.files) j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}});
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::string text = read_text(path);
  json j = parse_json(text, path.string());
  RunManifest m;
  m.schedule_path = require<std::string>(j, "schedule", path.string());
  m.config = parse_config(j.at("config").dump(), path.string());
  m.groups = require<int>(j, "groups", path.string());
  m.output_dir = require<std::string>(j, "output_dir", path.string());
  for (const auto& f : j.at("files")) {
    m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
  }
  return m;
}

std::vector<std::string> verify_manifest(const RunManifest& manifest,
                                         const std::filesystem::path& base) {
  std::vector<std::string> bad;
  for (const auto& f : manifest.files) {
    auto p = base / f.path;
    if (!std::filesystem::exists(p) || sha256_file(p) != f.sha256) bad.push_back(f.path);
  }
  return bad;
}

}  // namespace rotkit::io
