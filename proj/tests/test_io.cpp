#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rotkit/io.hpp"

using namespace rotkit;
namespace fs = std::filesystem;

namespace {

Rational r(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

Trajectory read(const std::string& text) {
  std::istringstream in(text);
  return io::read_trajectory(in, "mem");
}

const std::string kHeader = "# rotkit trajectory v1\nN,6\ngroup,T61\ngame,3\nt,p_count,q_count\n";

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("rotkit_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int parse_error_line(const std::string& text) {
  try {
    read(text);
  } catch (const io::ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("trajectory CSV") {
  SUBCASE("two rows give the 11/36 rotation") {
    auto t = read(kHeader + "0,5,1\n1,4,3\n");
    REQUIRE(t.rounds() == 2);
    CHECK(t.group_id == "T61");
    CHECK(t.game_id == "3");
    CHECK(t.population_size() == 6);
    CHECK(instantaneous_rotation(t.states[0], t.states[1]) == r(11, 36));
  }
  SUBCASE("comments, blank lines and CRLF endings are tolerated") {
    auto t = read("# note\r\n\r\nN,6\r\ngroup,a\r\ngame,b\r\nt,p_count,q_count\r\n0,1,2\r\n1,2,3\r\n");
    CHECK(t.rounds() == 2);
    CHECK(t.states[1].q_count() == 3);
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(read(kHeader + "0,7,1\n"), io::LatticeViolation);
    CHECK_THROWS_AS(read(kHeader + "0,-1,1\n"), io::LatticeViolation);
    CHECK_THROWS_AS(read(kHeader + "0,5,1\n2,4,3\n"), io::NonContiguousRounds);
    CHECK_THROWS_AS(read(kHeader + "1,5,1\n"), io::NonContiguousRounds);
    CHECK(parse_error_line(kHeader + "0,5,1\n1,x,3\n") == 7);
    CHECK(parse_error_line(kHeader + "0,5\n") == 6);
    CHECK(parse_error_line("N,6\ngroup,a\nt,p_count,q_count\n") == 3);
    CHECK(parse_error_line("N,0\n") == 1);
    CHECK(parse_error_line("N,6\ncolor,red\n") == 2);
    CHECK(parse_error_line("N,6\ngroup,a\ngame,b\n") > 0);
  }
  SUBCASE("save then load is the identity") {
    auto dir = scratch_dir("roundtrip");
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      int n = std::uniform_int_distribution<int>(1, 12)(rng);
      std::uniform_int_distribution<int> coord(0, n);
      Trajectory t;
      t.group_id = "g" + std::to_string(trial);
      t.game_id = std::to_string(trial % 7 + 1);
      int len = std::uniform_int_distribution<int>(1, 40)(rng);
      for (int i = 0; i < len; ++i) t.states.emplace_back(coord(rng), coord(rng), n);
      auto file = dir / "t.csv";
      io::save_trajectory(file, t);
      auto back = io::load_trajectory(file);
      CHECK(back.states == t.states);
      CHECK(back.group_id == t.group_id);
      CHECK(back.game_id == t.game_id);
    }
    fs::remove_all(dir);
  }
  CHECK_THROWS_AS(io::load_trajectory("/nonexistent/rotkit.csv"), io::IoError);
}

TEST_CASE("games file") {
  auto games = io::load_games(ROTKIT_DATA_DIR "/companion_games.json");
  REQUIRE(games.size() == 7);
  CHECK(games[2].id == "3");
  CHECK(games[2].payoff(0, 1) == r(5, 6));
  CHECK(games[6].payoff(1, 0) == r(-2, 5));

  auto numeric = io::parse_games(R"({"games":[{"id":"x","payoff":[0, 2, 1, 0]}]})");
  CHECK(numeric[0].payoff(0, 1) == r(2));

  CHECK_THROWS_AS(io::parse_games("{\"games\": [\n{\"id\": \"1\",\n\"payoff\": [1,2,3]"), io::ParseError);
  try {
    io::parse_games("{\n\"games\": [\n,\n]}");
    FAIL("expected a parse error");
  } catch (const io::ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(io::parse_games(R"({"games":[{"id":"1","payoff":["1","2","3"]}]})"), io::ParseError);
  CHECK_THROWS_AS(io::parse_games(R"({"games":[{"id":"1","payoff":["1","2","3","1/0"]}]})"),
                  io::ParseError);
  CHECK_THROWS_AS(io::parse_games(R"({"other":[]})"), io::ParseError);
}

TEST_CASE("schedule and config files") {
  auto schedule = io::load_schedule(ROTKIT_DATA_DIR "/schedule_825.json");
  CHECK(schedule.entries.size() == 7);
  CHECK(schedule.total_rounds() == 825);
  CHECK(schedule.entries[6].game_id == "7");
  CHECK_THROWS_AS(io::parse_schedule(R"({"entries":[]})"), EmptySchedule);

  auto config = io::load_config(ROTKIT_DATA_DIR "/sim_config.json");
  CHECK(config.population_size == 6);
  CHECK(config.tremble == 0.01);
  REQUIRE(std::holds_alternative<LogitFictitiousPlay>(config.rule));
  CHECK(std::get<LogitFictitiousPlay>(config.rule).precision == 5.0);

  auto imitation = io::parse_config(
      R"({"population_size": 4, "seed": 9, "tremble": 1, "rule": {"type": "proportional_imitation", "rate": 0.5}})");
  CHECK(imitation.tremble == 1.0);
  REQUIRE(std::holds_alternative<ProportionalImitation>(imitation.rule));
  CHECK(std::get<ProportionalImitation>(imitation.rule).rate == 0.5);

  auto again = io::parse_config(io::config_to_json(imitation));
  CHECK(again.seed == 9);
  CHECK(again.population_size == 4);
  CHECK(std::get<ProportionalImitation>(again.rule).rate == 0.5);

  CHECK_THROWS_AS(io::parse_config(R"({"rule": {"type": "best_response"}})"), io::ParseError);
  CHECK_THROWS_AS(io::parse_config(R"({"tremble": 2})"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_config(R"({"seed": "many"})"), io::ParseError);
}

TEST_CASE("rotation table") {
  auto table = io::load_table(ROTKIT_DATA_DIR "/reference_accumulated_rotation.csv");
  CHECK(table.games.size() == 7);
  CHECK(table.groups.size() == 13);
  CHECK(table.groups.front() == "T61");
  CHECK(table.values[6][9] == -4.33);

  std::ostringstream out;
  io::write_table(out, table);
  std::istringstream in(out.str());
  auto back = io::read_table(in);
  CHECK(back.games == table.games);
  CHECK(back.groups == table.groups);
  CHECK(back.values == table.values);

  std::istringstream ragged("game,a,b\n1,0.5\n");
  CHECK_THROWS_AS(io::read_table(ragged), io::ParseError);
  std::istringstream headless("1,0.5,0.2\n");
  CHECK_THROWS_AS(io::read_table(headless), io::ParseError);
}

TEST_CASE("results and report output") {
  std::ostringstream out;
  io::write_results(out, {{"sign_game_3", 13, 13, 2.44140625e-4}});
  CHECK(out.str().rfind("test,statistic,df,p\n", 0) == 0);
  CHECK(out.str().find("sign_game_3,13,13,") != std::string::npos);

  Trajectory t;
  t.group_id = "T61";
  t.game_id = "3";
  t.states = {PopulationState(5, 1, 6), PopulationState(4, 3, 6)};
  std::ostringstream rep;
  io::write_report(rep, make_report(t, std::nullopt));
  CHECK(rep.str().find("group: T61") != std::string::npos);
  CHECK(rep.str().find("l_accumulated: 11/36") != std::string::npos);
}

TEST_CASE("run manifest") {
  auto dir = scratch_dir("manifest");
  Trajectory t;
  t.group_id = "1";
  t.game_id = "3";
  t.states = {PopulationState(5, 1, 6), PopulationState(4, 3, 6)};
  io::save_trajectory(dir / "a.csv", t);

  io::RunManifest m;
  m.schedule_path = "schedule.json";
  m.groups = 1;
  m.output_dir = dir.string();
  m.config.seed = 77;
  m.files.push_back({"a.csv", io::sha256_file(dir / "a.csv")});
  CHECK(m.files[0].sha256.size() == 64);
  io::save_manifest(dir / "manifest.json", m);

  auto back = io::load_manifest(dir / "manifest.json");
  CHECK(back.config.seed == 77);
  CHECK(back.groups == 1);
  REQUIRE(back.files.size() == 1);
  CHECK(back.files[0].sha256 == m.files[0].sha256);
  CHECK(io::verify_manifest(back, dir).empty());

  std::ofstream(dir / "a.csv", std::ios::app) << "2,0,0\n";
  CHECK(io::verify_manifest(back, dir) == std::vector<std::string>{"a.csv"});
  fs::remove(dir / "a.csv");
  CHECK(io::verify_manifest(back, dir) == std::vector<std::string>{"a.csv"});
  fs::remove_all(dir);

  // SHA-256 of the empty string
  auto empty = scratch_dir("empty");
  std::ofstream(empty / "e").close();
  CHECK(io::sha256_file(empty / "e") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  fs::remove_all(empty);
}
