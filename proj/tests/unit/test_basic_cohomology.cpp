#include "orbitspace/basic_cohomology.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>

using namespace orbitspace;

namespace {

std::size_t coeff(const FormBasis& b, std::vector<int> index, int parity = 0) {
  for (std::size_t i = 0; i < b.coefficients.size(); ++i)
    if (b.coefficients[i].index == index && b.coefficients[i].parity == parity) return i;
  FAIL("coefficient not found");
  return 0;
}

std::size_t binom(int n, int k) {
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

ActionScenario plane(GroupModel g) { return make_scenario("plane", std::move(g), ManifoldModel::euclidean(2)); }

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("coefficient bases") {
  const auto poly = coefficient_basis(CoefficientSpace::polynomial(2, 3));
  CHECK(poly.size() == binom(5, 2));
  CHECK(poly[0].grade == 0);
  CHECK(poly[1].index == std::vector<int>{1, 0});
  CHECK(poly[2].index == std::vector<int>{0, 1});
  CHECK(poly.back().grade == 3);

  // Trig, one angle, F = 2: 1, cos t, sin t, cos 2t, sin 2t.
  const auto trig = coefficient_basis(CoefficientSpace::trig(1, 2));
  CHECK(trig.size() == 5);
  // Two angles, F = 1: 1 plus cos/sin of (1,-1), (1,0), (1,1), (0,1).
  CHECK(coefficient_basis(CoefficientSpace::trig(2, 1)).size() == 9);
}

TEST_CASE("exterior derivative of monomials and trigonometric terms") {
  const auto space = CoefficientSpace::polynomial(2, 3);
  const auto b0 = form_basis(space, 0), b1 = form_basis(space, 1);
  const Mat d = exterior_derivative_matrix(b0, b1);
  // d(x^2 y) = 2 x y dx + x^2 dy
  const auto src = static_cast<Eigen::Index>(b0.find(coeff(b0, {2, 1}), {}));
  const auto dx = b1.find(coeff(b1, {1, 1}), {0});
  const auto dy = b1.find(coeff(b1, {2, 0}), {1});
  CHECK(d(dx, src) == 2.0);
  CHECK(d(dy, src) == 1.0);
  CHECK(d.col(src).cwiseAbs().sum() == 3.0);

  const auto tspace = CoefficientSpace::trig(1, 2);
  const auto t0 = form_basis(tspace, 0), t1 = form_basis(tspace, 1);
  const Mat dt = exterior_derivative_matrix(t0, t1);
  // d cos 2t = -2 sin 2t dt
  const auto c2 = static_cast<Eigen::Index>(t0.find(coeff(t0, {2}, 0), {}));
  const auto s2 = t1.find(coeff(t1, {2}, 1), {0});
  CHECK(dt(s2, c2) == -2.0);
}

TEST_CASE("d squared vanishes") {
  for (const auto& space : {CoefficientSpace::polynomial(3, 4), CoefficientSpace::trig(2, 3)}) {
    std::vector<FormBasis> b;
    for (int k = 0; k <= space.variables; ++k) b.push_back(form_basis(space, k));
    for (int k = 0; k + 2 <= space.variables; ++k) {
      const Mat dd = exterior_derivative_matrix(b[k + 1], b[k + 2]) * exterior_derivative_matrix(b[k], b[k + 1]);
      CHECK(dd.cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("contraction with the rotation field") {
  // X = (-y, x); i_X (x dy - y dx) = x^2 + y^2.
  // A linear field raises the degree by one, so the target needs a higher cutoff.
  const auto b0 = form_basis(CoefficientSpace::polynomial(2, 3), 0);
  const auto b1 = form_basis(CoefficientSpace::polynomial(2, 2), 1);
  Mat a(2, 2);
  a << 0, -1, 1, 0;
  const Mat c = contraction_matrix(b1, b0, GroupElement::from_matrix(a));
  Vec form = Vec::Zero(static_cast<Eigen::Index>(b1.size()));
  form(b1.find(coeff(b1, {1, 0}), {1})) = 1.0;
  form(b1.find(coeff(b1, {0, 1}), {0})) = -1.0;
  const Vec out = c * form;
  CHECK(out(b0.find(coeff(b0, {2, 0}), {})) == 1.0);
  CHECK(out(b0.find(coeff(b0, {0, 2}), {})) == 1.0);
  CHECK(out.cwiseAbs().sum() == 2.0);
}

TEST_CASE("projectors are symmetric, idempotent and commute") {
  const auto scn = plane(GroupModel::plane_rotation_circle());
  const auto b = form_basis(CoefficientSpace::polynomial(2, 5), 1);
  const Mat p = invariance_projector(scn, b);
  const Mat h = horizontality_projector(scn, b);
  CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((h * h - h).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p * h - h * p).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(horizontality_projector(plane(GroupModel::dihedral(3)), b).isIdentity(0.0));
}

TEST_CASE("basic betti numbers of the builtin quotients") {
  using clock = std::chrono::steady_clock;
  auto timed = [](auto&& f) {
    const auto t0 = clock::now();
    auto r = f();
    CHECK(std::chrono::duration<double>(clock::now() - t0).count() < 2.0);
    return r;
  };
  const auto circle_plane = plane(GroupModel::plane_rotation_circle());
  CHECK(timed([&] { return basic_betti(circle_plane, CoefficientSpace::polynomial(2, 8)); }) ==
        std::vector<long>{1, 0, 0});

  const auto antipodal = make_scenario("a", GroupModel::half_turn_translation(), ManifoldModel::torus(1));
  CHECK(timed([&] { return basic_betti(antipodal, CoefficientSpace::trig(1, 8)); }) == std::vector<long>{1, 1});

  const auto torus =
      make_scenario("t", GroupModel::circle_translation(vec({1.0, 1.0})), ManifoldModel::torus(2));
  CHECK(timed([&] { return basic_betti(torus, CoefficientSpace::trig(2, 8)); }) == std::vector<long>{1, 1, 0});

  const auto cc = make_scenario("c", GroupModel::circle_translation(vec({1.0})), ManifoldModel::torus(1));
  CHECK(timed([&] { return basic_betti(cc, CoefficientSpace::trig(1, 8)); }) == std::vector<long>{1, 0});

  // Finite groups on the plane: the quotient cone is contractible.
  CHECK(basic_betti(plane(GroupModel::cyclic_rotations(3)), CoefficientSpace::polynomial(2, 6)) ==
        std::vector<long>{1, 0, 0});
  // Trivial action on the circle: de Rham cohomology of S^1.
  const auto s1 = make_scenario("s1", GroupModel::trivial(1), ManifoldModel::torus(1));
  CHECK(basic_betti(s1, CoefficientSpace::trig(1, 4)) == std::vector<long>{1, 1});
}

TEST_CASE("basic complex diagnostics and stability") {
  const auto scn = plane(GroupModel::plane_rotation_circle());
  const auto c = basic_complex(scn, CoefficientSpace::polynomial(2, 8));
  CHECK(c.dd_max <= 1e-10);
  CHECK(c.idempotence_max <= 1e-12);
  CHECK(c.commutator_max <= 1e-10);
  CHECK(c.preservation_max <= 1e-10);
  CHECK(c.min_nonzero_singular > 1e-6);
  CHECK(basic_betti(scn, CoefficientSpace::polynomial(2, 10)) == c.betti);
  CHECK(verify_poincare_lemma(c, 1e-8).pass);
}

TEST_CASE("unsupported combinations are reported") {
  const auto sph = make_scenario("s", GroupModel::z_axis_circle(), ManifoldModel::sphere(2));
  CHECK_THROWS_AS(basic_complex(sph, CoefficientSpace::polynomial(3, 4)), UnsupportedError);
  CHECK(basic_betti(sph, CoefficientSpace::polynomial(3, 4), true) == std::vector<long>{1, 0, 0, 0});
  CHECK_THROWS_AS(basic_complex(plane(GroupModel::reflection()), CoefficientSpace::trig(2, 3)), UnsupportedError);
  CHECK_THROWS_AS(basic_complex(plane(GroupModel::reflection()), CoefficientSpace::polynomial(3, 3)), DomainError);
}

TEST_CASE("de Rham comparison") {
  CHECK(derham_compare({1, 1, 0}, {1, 1}).pass);
  CHECK_FALSE(derham_compare({1, 0}, {1, 1}).pass);
}
