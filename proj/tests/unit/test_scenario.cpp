#include "orbitspace/report.hpp"
#include "orbitspace/scenario.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace orbitspace;
using nlohmann::json;

namespace {

std::string error_of(const json& config) {
  try {
    load_config(config);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

json z4_config() { return json{{"scenario", "zn_plane(4)"}, {"seed", 5}}; }

}  // namespace

TEST_CASE("every builtin constructs") {
  Resolution res;
  res.seed = 1;
  for (const auto& name : {"zn_plane(1)", "zn_plane(6)", "dihedral_plane(2)", "dihedral_plane(5)",
                           "z2_reflection_plane", "circle_plane", "circle_on_sphere", "z2_antipodal_circle",
                           "z2_antipodal_sphere", "circle_on_torus2", "circle_on_circle"}) {
    const auto plan = make_builtin(name, res);
    CHECK(plan.builtin == name);
    CHECK(plan.slice_probes.size() == 3);
    CHECK(plan.random_bases.size() == res.base_points);
    for (const auto& p : plan.dense_bases) CHECK(plan.scn.manifold.contains(p));
  }
  CHECK_THROWS_AS(make_builtin("zn_plane(0)", res), ValidationError);
  CHECK_THROWS_AS(make_builtin("torus_knot", res), ValidationError);
}

TEST_CASE("config validation") {
  CHECK(error_of(json{{"scenario", "circle_plane"}}).find("seed") != std::string::npos);
  CHECK(error_of(json{{"scenario", "circle_plane"}, {"seed", 1}, {"colour", "red"}}).find("colour") !=
        std::string::npos);
  CHECK(error_of(json{{"scenario", "circle_plane"}, {"seed", 1}, {"tolerances", {{"srf", -1.0}}}})
            .find("positive") != std::string::npos);
  CHECK(error_of(json{{"scenario", "circle_plane"}, {"seed", 1}, {"tolerances", {{"srf", 0.0}}}})
            .find("positive") != std::string::npos);
  CHECK(error_of(json{{"scenario", "circle_plane"}, {"seed", 1}, {"tolerances", {{"fudge", 1.0}}}})
            .find("fudge") != std::string::npos);
  CHECK(error_of(json{{"scenario", "circle_plane"}, {"seed", -3}}).find("seed") != std::string::npos);
  const auto ok = load_config(json{{"scenario", "circle_plane"}, {"seed", 1}, {"tolerances", {{"srf", 1e-5}}}});
  CHECK(ok.config.tol("srf") == 1e-5);
  CHECK(ok.config.tol("averaging") == 1e-12);
}

TEST_CASE("inline groups that do not close name the failing product") {
  const json bad = {{"seed", 1},
                    {"scenario",
                     {{"group", {{"type", "finite"}, {"elements", {{{1, 0}, {0, 1}}, {{0, -1}, {1, 0}}}}}},
                      {"manifold", {{"type", "euclidean"}, {"dimension", 2}}}}}};
  CHECK(error_of(bad).find("element 1 * element 1") != std::string::npos);
  json unknown = bad;
  unknown["scenario"]["group"]["order"] = 4;
  CHECK(error_of(unknown).find("order") != std::string::npos);
}

TEST_CASE("inline scenarios run every suite") {
  const json cfg = {{"seed", 3},
                    {"resolution", {{"haar", 60}, {"base_points", 12}}},
                    {"scenario",
                     {{"name", "rotations"},
                      {"group", {{"type", "circle"}, {"generator", {{0, -1}, {1, 0}}}}},
                      {"manifold", {{"type", "euclidean"}, {"dimension", 2}}}}}};
  const auto loaded = load_config(cfg);
  const auto rep = run_suite(loaded.plan, loaded.config, "all");
  CHECK(rep.scenario == "rotations");
  CHECK(rep.checks.size() > 20);
  for (const auto& c : rep.checks) CHECK_MESSAGE(c.pass, c.name << ": " << c.note);
}

TEST_CASE("unknown and empty suites list the valid ones") {
  const auto loaded = load_config(z4_config());
  for (const std::string s : {"", "metrics"}) {
    try {
      run_suite(loaded.plan, loaded.config, s);
      FAIL("expected an error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("metric, stratification, foliation, cohomology, triangulate, all") !=
            std::string::npos);
    }
  }
}

TEST_CASE("check errors are captured, not thrown") {
  auto loaded = load_config(z4_config());
  loaded.plan.slice_radii = {0.3, 5.0, 0.1};
  const auto rep = run_suite(loaded.plan, loaded.config, "stratification");
  bool saw = false;
  for (const auto& c : rep.checks)
    if (c.name == "stratification.slice_consistency_1") {
      saw = true;
      CHECK_FALSE(c.pass);
      CHECK(c.note.find("radius") != std::string::npos);
    }
  CHECK(saw);
  CHECK_FALSE(rep.overall());
}

TEST_CASE("reports are deterministic and well formed") {
  const auto loaded = load_config(json{{"scenario", "circle_plane"}, {"seed", 9}});
  const auto a = run_suite(loaded.plan, loaded.config, "metric");
  const auto b = run_suite(load_config(json{{"scenario", "circle_plane"}, {"seed", 9}}).plan, loaded.config, "metric");
  CHECK(report_json(a, false).dump() == report_json(b, false).dump());
  const auto j = report_json(a);
  CHECK(j.contains("timings"));
  CHECK(j["overall"] == true);
  for (const auto& c : j["checks"])
    for (const char* key : {"name", "pass", "deviation", "tolerance", "witness"}) CHECK(c.contains(key));

  const auto csv = summary_csv(a);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == a.checks.size() + 1);

  const auto dir = std::filesystem::temp_directory_path() / "orbitspace_report_test";
  std::filesystem::remove_all(dir);
  const auto files = write_outputs(a, dir.string());
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "dbar.csv"));
  std::ifstream in(dir / "dbar.csv");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == loaded.plan.random_bases.size());
}

TEST_CASE("matrix csv uses 12 significant digits") {
  Mat m(2, 2);
  m << 0.0, 1.0 / 3.0, 1.0 / 3.0, 0.0;
  CHECK(matrix_csv(m) == "0,0.333333333333\n0.333333333333,0\n");
}

TEST_CASE("seeds change the random sample but not the verdict") {
  const auto a = load_config(json{{"scenario", "zn_plane(5)"}, {"seed", 1}});
  const auto b = load_config(json{{"scenario", "zn_plane(5)"}, {"seed", 2}});
  CHECK(a.plan.random_bases[0] != b.plan.random_bases[0]);
  CHECK(run_suite(a.plan, a.config, "metric").overall());
  CHECK(run_suite(b.plan, b.config, "metric").overall());
}
