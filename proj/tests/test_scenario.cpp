#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "uabsim/scenario.hpp"

using namespace uabsim;

namespace {

ServiceArea single_edge_area() {
  ServiceArea area;
  area.id = 0;
  area.length = 100.0;
  area.width = 50.0;
  area.street_graph.nodes = {{10.0, 25.0}, {90.0, 25.0}};
  area.street_graph.edges = {{0, 1}};
  area.mbs_position = {50.0, 25.0};
  area.gue_count = 1;
  return area;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("trace on a single straight edge stays on that edge") {
  const ServiceArea area = single_edge_area();
  const MobilityTrace trace = generate_trace(area, 42, 3, 14.0, 10.0);
  REQUIRE(trace.horizon == 3);
  REQUIRE(trace.n_users == 1);
  for (int t = 0; t < 3; ++t) {
    const Point& p = trace.at(t, 0);
    CHECK(p.y == Catch::Approx(25.0).margin(1.0));
    CHECK(p.x >= 9.0);
    CHECK(p.x <= 91.0);
  }
  validate_trace(trace, area, 14.0, 10.0);
}

TEST_CASE("trace generation is deterministic per seed") {
  const ServiceArea area = make_area(0, 400.0, 300.0, 5);
  const MobilityTrace a = generate_trace(area, 7, 10, 14.0, 10.0);
  const MobilityTrace b = generate_trace(area, 7, 10, 14.0, 10.0);
  CHECK(a == b);
  const MobilityTrace c = generate_trace(area, 8, 10, 14.0, 10.0);
  CHECK_FALSE(a == c);
}

TEST_CASE("full-size area trace has the right shape and stays in bounds") {
  const ServiceArea area = make_area(0, 1500.0, 700.0, 200);
  const MobilityTrace trace = generate_trace(area, 3, 27, 14.0, 10.0);
  REQUIRE(trace.n_users == 200);
  REQUIRE(trace.horizon == 27);
  REQUIRE(trace.positions.size() == 200u * 27u);
  for (const Point& p : trace.positions) CHECK(area.contains(p));
}

TEST_CASE("per-step displacement never exceeds the speed limit") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const ServiceArea area = make_area(static_cast<int>(seed % 2), 800.0, 500.0, 8);
    const double v_max = 14.0, dt = 10.0;
    const MobilityTrace trace = generate_trace(area, seed, 20, v_max, dt);
    for (int t = 1; t < trace.horizon; ++t) {
      for (int g = 0; g < trace.n_users; ++g) {
        CHECK(distance(trace.at(t - 1, g), trace.at(t, g)) <= v_max * dt + 1e-9);
      }
    }
    validate_trace(trace, area, v_max, dt);
  }
}

TEST_CASE("empty street graph is rejected") {
  ServiceArea area;
  area.length = 100.0;
  area.width = 100.0;
  area.gue_count = 1;
  CHECK_THROWS_WITH(generate_trace(area, 1, 3, 14.0, 10.0),
                    Catch::Matchers::ContainsSubstring("degenerate"));
}

TEST_CASE("trace file round trip preserves the trace") {
  const ServiceArea area = make_area(1, 600.0, 400.0, 4);
  const MobilityTrace trace = generate_trace(area, 11, 8, 14.0, 10.0);
  const std::string path = temp_path("uabsim_trace_roundtrip.csv");
  save_trace(trace, path);
  const MobilityTrace loaded = load_trace(path, area);
  CHECK(trace.horizon == loaded.horizon);
  CHECK(trace.n_users == loaded.n_users);
  REQUIRE(trace.positions.size() == loaded.positions.size());
  for (size_t i = 0; i < trace.positions.size(); ++i) {
    CHECK(trace.positions[i].x == Catch::Approx(loaded.positions[i].x).margin(1e-5));
    CHECK(trace.positions[i].y == Catch::Approx(loaded.positions[i].y).margin(1e-5));
  }
  std::filesystem::remove(path);
}

TEST_CASE("trace file direct parse") {
  const std::string path = temp_path("uabsim_trace_direct.csv");
  {
    std::ofstream out(path);
    out << "0,0,10.00,20.00\n";
  }
  ServiceArea area = single_edge_area();
  const MobilityTrace trace = load_trace(path, area);
  REQUIRE(trace.horizon == 1);
  REQUIRE(trace.n_users == 1);
  CHECK(trace.at(0, 0).x == Catch::Approx(10.0));
  CHECK(trace.at(0, 0).y == Catch::Approx(20.0));
  std::filesystem::remove(path);
}

TEST_CASE("malformed and out-of-bounds trace rows are rejected with context") {
  const ServiceArea area = single_edge_area();
  const std::string bad = temp_path("uabsim_trace_bad.csv");
  {
    std::ofstream out(bad);
    out << "0,0,10.00,20.00\n";
    out << "not,a,valid,row,at,all\n";
  }
  CHECK_THROWS_WITH(load_trace(bad, area), Catch::Matchers::ContainsSubstring("2"));
  const std::string oob = temp_path("uabsim_trace_oob.csv");
  {
    std::ofstream out(oob);
    out << "0,0,-5.00,20.00\n";
  }
  CHECK_THROWS(load_trace(oob, area));
  std::filesystem::remove(bad);
  std::filesystem::remove(oob);
}

TEST_CASE("task enumeration forms the full cartesian product") {
  std::vector<ServiceArea> areas;
  for (int id = 0; id < 3; ++id) areas.push_back(make_area(id, 1500.0, 700.0, 10));
  const double L = 1500.0, W = 700.0;
  std::vector<std::vector<Point>> sets = {
      {{0, 0}, {L, 0}, {L, W}},
      {{0, 0}, {0, W}, {L, W}},
      {{0, 0}, {L, W}, {L / 2, W / 2}},
      {{L, 0}, {0, W}, {L / 2, W / 2}},
      {{L / 4, 3 * W / 4}, {3 * L / 4, W / 4}, {3 * L / 4, 3 * W / 4}}};
  const auto tasks = enumerate_tasks(areas, sets);
  REQUIRE(tasks.size() == 15);
  CHECK(tasks[0].area_id == areas[0].id);
  CHECK(tasks[0].takeoff == sets[0]);

  const auto one = enumerate_tasks({areas[0]}, {sets[0]});
  REQUIRE(one.size() == 1);

  std::vector<std::vector<Point>> bad_sets = {{{-10.0, 0.0}, {L, 0}, {L, W}}};
  CHECK_THROWS(enumerate_tasks(areas, bad_sets));
}

TEST_CASE("synthetic area templates validate") {
  for (int id = 0; id < 3; ++id) {
    const ServiceArea area = make_area(id, 1500.0, 700.0, 20);
    REQUIRE_NOTHROW(area.validate());
    CHECK_FALSE(area.street_graph.empty());
    CHECK(area.contains(area.mbs_position));
  }
}
