// Acceptance criteria. One PASS/FAIL line per criterion; exit code 1 if any fails.

#include "orbitspace/report.hpp"
#include "orbitspace/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace orbitspace;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Point p2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

Point sphere_point(double phi, double theta) {
  Point p(3);
  p << std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi);
  return p;
}

/// Cone of angle 2 pi / n: reduce the angle difference and use the law of cosines.
double cone_oracle(const Point& a, const Point& b, int n) {
  const double wedge = kTwoPi / n;
  double d = std::fmod(std::abs(std::atan2(a(1), a(0)) - std::atan2(b(1), b(0))), wedge);
  d = std::min(d, wedge - d);
  const double r = a.norm(), s = b.norm();
  return std::sqrt(std::max(0.0, r * r + s * s - 2 * r * s * std::cos(d)));
}

const std::vector<std::string> kBuiltins = {"zn_plane(4)",         "zn_plane(6)",      "dihedral_plane(3)",
                                            "z2_reflection_plane", "circle_plane",     "circle_on_sphere",
                                            "z2_antipodal_circle", "z2_antipodal_sphere", "circle_on_torus2",
                                            "circle_on_circle"};

ScenarioPlan builtin(const std::string& name, std::uint64_t seed = 2024) {
  Resolution res;
  res.seed = seed;
  return make_builtin(name, res);
}

RunConfig config(std::uint64_t seed = 2024) {
  RunConfig c;
  c.resolution.seed = seed;
  return c;
}

const VerificationReport* find_check(const RunReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = Clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [error: " << e.what() << "]";
  }
  std::printf("%s %2d %s:%s (%.2fs)\n", out.pass ? "PASS" : "FAIL", id, title.c_str(), out.detail.str().c_str(),
              seconds_since(t0));
  std::fflush(stdout);
  if (!out.pass) ++failures;
}

}  // namespace

int main() {
  criterion(1, "zn_plane(6) cone metric", [](Outcome& o) {
    const auto t0 = Clock::now();
    const auto scn = make_scenario("zn_plane(6)", GroupModel::cyclic_rotations(6), ManifoldModel::euclidean(2));
    const auto bases = sample_points(scn.manifold, Annulus{0.5, 1.5}, 40, 61);
    const auto g = build_quotient_graph(scn, bases);
    double err = 0.0;
    for (std::size_t i = 0; i < bases.size(); ++i)
      for (std::size_t j = 0; j < bases.size(); ++j)
        err = std::max(err, std::abs(g.dbar(i, j) - cone_oracle(bases[i], bases[j], 6)));
    const double t = seconds_since(t0);
    o.detail << " max error " << err << ", " << t << " s";
    o.require(err <= 1e-9, "error <= 1e-9");
    o.require(t < 1.0, "runtime < 1 s");
  });

  criterion(2, "circle_on_sphere latitude metric", [](Outcome& o) {
    const auto t0 = Clock::now();
    const auto scn = make_scenario("circle_on_sphere", GroupModel::z_axis_circle(), ManifoldModel::sphere(2));
    Rng rng(7);
    std::vector<Point> bases;
    std::vector<double> phi;
    for (int j = 0; j < 30; ++j) {
      phi.push_back((j + 0.5) * kPi / 30);
      bases.push_back(sphere_point(phi.back(), rng.uniform(0.0, kTwoPi)));
    }
    QuotientOptions opt;
    opt.resolution = 720;
    const auto g = build_quotient_graph(scn, bases, opt);
    double err = 0.0;
    for (std::size_t i = 0; i < bases.size(); ++i)
      for (std::size_t j = 0; j < bases.size(); ++j)
        err = std::max(err, std::abs(g.dbar(i, j) - std::abs(phi[i] - phi[j])));
    const double t = seconds_since(t0);
    o.detail << " max error " << err << ", " << t << " s";
    o.require(err <= 0.02, "error <= 0.02");
    o.require(t < 5.0, "runtime < 5 s");
  });

  criterion(3, "Z4 averaging of diag(1,2)", [](Outcome& o) {
    const auto scn = make_scenario("z4", GroupModel::cyclic_rotations(4), ManifoldModel::euclidean(2));
    Mat s(2, 2);
    s << 1.0, 0.0, 0.0, 2.0;
    const auto avg = average_metric(scn, MetricField::constant(s));
    const Point x = p2(0.3, -0.8);
    const double value = (avg.at(x) - 1.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff();
    const double idem = (average_metric(scn, avg).at(x) - avg.at(x)).cwiseAbs().maxCoeff();
    double inv = 0.0;
    for (const auto& g : scn.group.finite_group().elements)
      inv = std::max(inv, (g.linear.transpose() * avg.at(g.apply(x)) * g.linear - avg.at(x)).cwiseAbs().maxCoeff());
    o.detail << " value " << value << ", idempotence " << idem << ", invariance " << inv;
    o.require(value <= 1e-12 && idem <= 1e-12 && inv <= 1e-12, "all within 1e-12");
  });

  criterion(4, "completeness rescale", [](Outcome& o) {
    const auto scn = make_scenario("z4", GroupModel::cyclic_rotations(4), ManifoldModel::euclidean(2));
    Mat s(2, 2);
    s << 1.0, 0.0, 0.0, 2.0;
    const auto rescaled = completeness_rescale(average_metric(scn, MetricField::constant(s)), radius_squared_field());
    double err = 0.0;
    for (double a : {0.0, 0.7, 2.0, 4.1})
      err = std::max(err, (rescaled.at(p2(std::cos(a), std::sin(a))) - (9.0 / 22.0) * Mat::Identity(2, 2))
                              .cwiseAbs()
                              .maxCoeff());
    o.detail << " deviation from (9/22) I: " << err;
    o.require(err <= 1e-12, "within 1e-12");
  });

  criterion(5, "equidistance", [](Outcome& o) {
    const auto z4 = make_scenario("z4", GroupModel::cyclic_rotations(4), ManifoldModel::euclidean(2));
    std::vector<OrbitSample> probes;
    for (double r : {0.1, 0.25, 0.4})
      for (double a : {0.3, 1.7, 3.9}) probes.push_back(orbit_sample(z4, p2(1 + r * std::cos(a), r * std::sin(a))));
    const auto flat = verify_equidistance(z4, orbit_sample(z4, p2(1, 0)), probes, 0.5, 1e-12);

    const auto sph = make_scenario("s", GroupModel::z_axis_circle(), ManifoldModel::sphere(2));
    std::vector<OrbitSample> sprobes;
    for (double d : {-0.2, -0.1, 0.05, 0.15, 0.25}) sprobes.push_back(orbit_sample(sph, sphere_point(1.0 + d, 0.4), 720));
    const auto round = verify_equidistance(sph, orbit_sample(sph, sphere_point(1.0, 0.0), 720), sprobes, 0.3,
                                           kTwoPi / 720);
    o.detail << " Z4 spread " << flat.deviation << ", sphere spread " << round.deviation;
    o.require(flat.pass && !flat.vacuous, "Z4 spread <= 1e-12");
    o.require(round.pass && !round.vacuous, "sphere spread <= 2 pi / 720");
  });

  criterion(6, "submetry on zn_plane(4)", [](Outcome& o) {
    const auto t0 = Clock::now();
    const auto scn = make_scenario("z4", GroupModel::cyclic_rotations(4), ManifoldModel::euclidean(2));
    const double pitch = 0.02;
    const Point p = p2(1, 0);
    std::vector<Point> nodes;
    std::size_t index = 0;
    for (int i = 0; i <= 80; ++i)
      for (int j = -40; j <= 80; ++j) {
        const Point x = p2(i * pitch, j * pitch);
        const double a = std::atan2(x(1), x(0));
        if (x.norm() < 1e-12 || a < -1e-12 || a >= kPi / 2 - 1e-12) continue;
        if (cone_oracle(x, p, 4) > 0.56) continue;
        if ((x - p).norm() < 1e-12) index = nodes.size();
        nodes.push_back(x);
      }
    QuotientOptions opt;
    opt.base_pitch = pitch;
    opt.closure = false;
    const auto g = build_quotient_graph(scn, nodes, opt);
    const auto r = verify_submetry(scn, g, index, {0.2, 0.3, 0.5}, 2 * g.h);
    const double t = seconds_since(t0);
    o.detail << " nodes " << nodes.size() << ", h " << g.h << ", deviation " << r.deviation << ", " << t << " s";
    o.require(g.h <= 0.02, "h <= 0.02");
    o.require(r.pass && !r.vacuous, "inclusions within 2h");
    o.require(t < 5.0, "runtime < 5 s");
  });

  criterion(7, "stratification", [](Outcome& o) {
    const auto refl = builtin("z2_reflection_plane");
    const double eps = 1.5 * refl.strat_pitch;
    const auto weak = stratify(refl.scn, refl.strat_sample, Relation::Weak, eps);
    std::multiset<int> dims(weak.component_dimension.begin(), weak.component_dimension.end());
    o.detail << " reflection: " << weak.class_count() << " classes, " << weak.components.size() << " components";
    o.require(weak.class_count() == 2, "2 weak classes");
    o.require(dims == std::multiset<int>{1, 2, 2}, "component dimensions (1,2,2)");

    const auto circ = builtin("circle_plane");
    const auto cw = stratify(circ.scn, circ.strat_sample, Relation::Weak, 1.5 * circ.strat_pitch);
    const auto comp = cw.component_of();
    int origin_dim = -1;
    for (std::size_t i = 0; i < cw.sample.size(); ++i)
      if (cw.sample[i].norm() < 1e-12) origin_dim = cw.component_dimension[static_cast<std::size_t>(comp[i])];
    o.require(origin_dim == 0, "circle_plane origin component has dim 0");

    std::size_t violations = 0;
    for (const auto& name : kBuiltins) {
      const auto plan = builtin(name);
      const double e = 1.5 * plan.strat_pitch;
      const auto w = stratify(plan.scn, plan.strat_sample, Relation::Weak, e);
      const auto n = stratify(plan.scn, plan.strat_sample, Relation::Normal, e);
      violations += verify_frontier(plan.scn, w, e).size() + verify_frontier(plan.scn, n, e).size();
      if (!verify_normal_open_closed(w, n).pass) o.require(false, "normal open/closed on " + name);
    }
    o.detail << ", frontier violations " << violations;
    o.require(violations == 0, "zero frontier violations");
  });

  criterion(8, "slice partitions", [](Outcome& o) {
    std::size_t tested = 0;
    for (const auto& name : kBuiltins) {
      const auto plan = builtin(name);
      for (std::size_t k = 0; k < plan.slice_probes.size(); ++k) {
        const auto r = verify_slice_consistency(plan.scn, plan.slice_probes[k], plan.slice_radii[k], 9);
        ++tested;
        if (!r.pass) o.require(false, name + " probe " + std::to_string(k));
      }
    }
    o.detail << " " << tested << " probes";
  });

  criterion(9, "SRF perpendicularity with the e^{r^2} metric", [](Outcome& o) {
    const auto plan = builtin("circle_plane");
    const Point q = p2(std::cos(0.7), std::sin(0.7));
    for (const auto& [start, v] : std::vector<std::pair<Point, Vec>>{{p2(1, 0), p2(1, 0)}, {0.8 * q, q}}) {
      const auto r = srf_perpendicularity(plan.scn, *plan.foliation_metric, start, v, 2.0, 1e-3, 1e-6);
      o.detail << " deviation " << r.max_deviation << " over " << r.samples << " samples;";
      o.require(!r.vacuous && !r.truncated, "full trace");
      o.require(r.max_deviation <= 1e-6, "deviation <= 1e-6");
    }
  });

  criterion(10, "tube invariance", [](Outcome& o) {
    for (const auto& name : {"zn_plane(4)", "circle_on_sphere"}) {
      const auto plan = builtin(name);
      std::vector<OrbitSample> probes;
      for (const auto& p : plan.tube_probes) probes.push_back(orbit_sample(plan.scn, p));
      const auto r = verify_tube_invariance(plan.scn, orbit_sample(plan.scn, plan.tube_base), probes, plan.tube_radius);
      o.detail << " " << name << " violations " << r.deviation;
      o.require(r.pass && r.deviation == 0.0, std::string("zero violations on ") + name);
    }
  });

  criterion(11, "Alexandrov comparison on zn_plane(4)", [](Outcome& o) {
    const auto plan = builtin("zn_plane(4)");
    QuotientOptions opt;
    opt.base_pitch = plan.dense_pitch;
    const auto g = build_quotient_graph(plan.scn, plan.dense_bases, opt);
    const auto r = verify_alexandrov(g, 0.0, 100, 11, 2 * g.h);
    const std::size_t tested = r.witness.value("tested", std::size_t{0});
    o.detail << " violation " << r.deviation << " (2h = " << 2 * g.h << ") over " << tested << " triangles";
    o.require(r.pass && !r.vacuous, "violation <= 2h");
    o.require(tested == 100, "100 triangles tested");
  });

  criterion(12, "complexes", [](Outcome& o) {
    std::vector<SimplicialComplex> ks;
    ks.push_back(SimplicialComplex::from_simplices(4, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}));
    ks.push_back(SimplicialComplex::from_simplices(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}));
    ks.push_back(SimplicialComplex::from_simplices(
        6, {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 1}, {1, 2, 4}, {2, 3, 5}, {3, 4, 1}, {4, 5, 2}, {5, 1, 3}}));
    std::vector<Simplex> torus;
    for (std::size_t i = 0; i < 7; ++i) {
      torus.push_back({i, (i + 1) % 7, (i + 3) % 7});
      torus.push_back({i, (i + 2) % 7, (i + 3) % 7});
    }
    ks.push_back(SimplicialComplex::from_simplices(7, torus));
    ks.push_back(SimplicialComplex::from_simplices(5, {{0, 1, 2, 3}, {2, 3, 4}, {0, 4}}));
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const auto& k = ks[i];
      o.require(barycentric_subdivide(k).euler_characteristic() == k.euler_characteristic(),
                "Euler characteristic under subdivision, complex " + std::to_string(i));
      o.require(find_isomorphism(nerve(star_cover(k)), k).has_value(), "nerve isomorphism, complex " + std::to_string(i));
    }
    RunConfig cfg = config();
    for (const auto& [name, want] : std::vector<std::pair<std::string, std::vector<long>>>{
             {"zn_plane(6)", {1, 0}}, {"z2_antipodal_circle", {1, 1}}}) {
      const auto rep = run_suite(builtin(name), cfg, "triangulate");
      const auto* c = find_check(rep, "triangulate.rips_betti");
      if (!c) {
        o.require(false, "rips on " + name);
        continue;
      }
      std::vector<long> got = c->witness["betti"].get<std::vector<long>>();
      got.resize(2);
      o.detail << " " << name << " rips betti (" << got[0] << "," << got[1] << ")";
      o.require(got == want, "rips betti on " + name);
    }
  });

  criterion(13, "basic cohomology", [](Outcome& o) {
    struct Case {
      std::string name;
      CoefficientSpace space;
      std::vector<long> want;
    };
    const std::vector<Case> cases = {{"circle_plane", CoefficientSpace::polynomial(2, 8), {1, 0, 0}},
                                     {"z2_antipodal_circle", CoefficientSpace::trig(1, 8), {1, 1}},
                                     {"circle_on_torus2", CoefficientSpace::trig(2, 8), {1, 1, 0}},
                                     {"circle_on_circle", CoefficientSpace::trig(1, 8), {1, 0}}};
    for (const auto& c : cases) {
      const auto plan = builtin(c.name);
      const auto t0 = Clock::now();
      const auto bc = basic_complex(plan.scn, c.space);
      const double t = seconds_since(t0);
      const auto next = basic_betti(plan.scn, c.space.with_cutoff(c.space.cutoff + 2));
      o.detail << " " << c.name << " " << nlohmann::json(bc.betti).dump() << " " << t << "s";
      o.require(bc.betti == c.want, "betti on " + c.name);
      o.require(t < 2.0, "runtime < 2 s on " + c.name);
      o.require(bc.dd_max <= 1e-10, "d o d on " + c.name);
      o.require(bc.idempotence_max <= 1e-12, "idempotence on " + c.name);
      o.require(next == bc.betti, "stable from D to D+2 on " + c.name);
    }
  });

  criterion(14, "de Rham comparison on all builtins", [](Outcome& o) {
    for (const auto& name : kBuiltins) {
      const auto rep = run_suite(builtin(name), config(), "cohomology");
      const auto* c = find_check(rep, "cohomology.derham_compare");
      o.require(c && c->pass && !c->vacuous, name);
    }
  });

  criterion(15, "metric axioms on all builtins", [](Outcome& o) {
    for (const auto& name : kBuiltins) {
      const auto plan = builtin(name);
      const auto g = build_quotient_graph(plan.scn, plan.random_bases);
      const double tol = plan.exact ? 1e-9 : 2 * g.h;
      const auto ax = verify_metric_axioms(g, 200, 99, tol);
      const auto dom = verify_closure_dominance(g, 1e-9, plan.one_step_optimal);
      o.require(ax.pass, "triangle inequality on " + name);
      o.require(dom.pass, "closure dominance on " + name);
      if (name.rfind("zn_plane", 0) == 0) o.require(plan.one_step_optimal, "equality required on " + name);
    }
  });

  criterion(16, "determinism", [](Outcome& o) {
    for (const auto& [name, suite] : std::vector<std::pair<std::string, std::string>>{
             {"zn_plane(4)", "all"}, {"circle_on_sphere", "metric"}, {"z2_antipodal_circle", "all"}}) {
      const auto a = run_suite(builtin(name, 77), config(77), suite);
      const auto b = run_suite(builtin(name, 77), config(77), suite);
      bool same = report_json(a, false).dump() == report_json(b, false).dump();
      same = same && a.artifacts.size() == b.artifacts.size();
      for (std::size_t i = 0; same && i < a.artifacts.size(); ++i)
        same = matrix_csv(a.artifacts[i].matrix) == matrix_csv(b.artifacts[i].matrix) &&
               a.artifacts[i].json.dump() == b.artifacts[i].json.dump();
      o.require(same, "byte-identical report on " + name);
    }
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
