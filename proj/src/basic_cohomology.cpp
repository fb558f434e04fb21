#include "orbitspace/basic_cohomology.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace orbitspace {

std::string CoefficientSpace::describe() const {
  std::ostringstream os;
  if (kind == Kind::Polynomial)
    os << "Polynomial(" << variables << ", D=" << cutoff << ")";
  else
    os << "Trig(" << variables << ", F=" << cutoff << ")";
  return os.str();
}

namespace {

std::vector<std::vector<int>> compositions(int n, int total) {
  // Exponent vectors of the given total degree in descending lexicographic order.
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n - 1) {
      cur[static_cast<std::size_t>(i)] = left;
      out.push_back(cur);
      return;
    }
    for (int a = left; a >= 0; --a) {
      cur[static_cast<std::size_t>(i)] = a;
      rec(i + 1, left - a);
    }
  };
  rec(0, total);
  return out;
}

std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

using CoeffKey = std::pair<std::vector<int>, int>;

std::map<CoeffKey, std::size_t> coefficient_index(const std::vector<CoefficientTerm>& terms) {
  std::map<CoeffKey, std::size_t> m;
  for (std::size_t i = 0; i < terms.size(); ++i) m.emplace(CoeffKey{terms[i].index, terms[i].parity}, i);
  return m;
}

// Sign and position of dx_j inserted in front of the sorted wedge.
std::pair<int, std::vector<int>> wedge_front(int j, const std::vector<int>& wedge) {
  int before = 0;
  for (int i : wedge) {
    if (i == j) return {0, {}};
    if (i < j) ++before;
  }
  std::vector<int> w = wedge;
  w.insert(std::upper_bound(w.begin(), w.end(), j), j);
  return {before % 2 == 0 ? 1 : -1, w};
}

double determinant_minor(const Mat& l, const std::vector<int>& rows, const std::vector<int>& cols) {
  const auto k = static_cast<Eigen::Index>(rows.size());
  if (k == 0) return 1.0;
  Mat m(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) m(a, b) = l(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
  return m.determinant();
}

long index_of_label(const FormBasis& b, std::size_t coefficient, const std::vector<int>& wedge) {
  return b.find(coefficient, wedge);
}

}  // namespace

std::vector<CoefficientTerm> coefficient_basis(const CoefficientSpace& space) {
  if (space.variables < 1) throw DomainError("coefficient space needs at least one variable");
  if (space.cutoff < 0) throw DomainError("coefficient cutoff must be nonnegative");
  std::vector<CoefficientTerm> out;
  const int n = space.variables;
  if (space.kind == CoefficientSpace::Kind::Polynomial) {
    for (int d = 0; d <= space.cutoff; ++d)
      for (auto& e : compositions(n, d)) out.push_back({std::move(e), 0, d});
    return out;
  }
  for (int g = 0; g <= space.cutoff; ++g) {
    // Frequencies with max norm g, first nonzero entry positive, lexicographic.
    const auto side = static_cast<std::size_t>(2 * g + 1);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= side;
    for (std::size_t code = 0; code < total; ++code) {
      // Most significant digit first gives lexicographic order.
      std::vector<int> m(static_cast<std::size_t>(n));
      std::size_t rest = code;
      for (int i = n - 1; i >= 0; --i) {
        m[static_cast<std::size_t>(i)] = static_cast<int>(rest % side) - g;
        rest /= side;
      }
      int norm = 0;
      for (int v : m) norm = std::max(norm, std::abs(v));
      const auto first = std::find_if(m.begin(), m.end(), [](int v) { return v != 0; });
      if (norm != g || (first != m.end() && *first < 0)) continue;
      out.push_back({m, 0, g});
      if (g > 0) out.push_back({m, 1, g});
    }
  }
  return out;
}

long FormBasis::find(std::size_t coefficient, const std::vector<int>& wedge) const {
  const auto it = lookup.find({coefficient, wedge});
  return it == lookup.end() ? -1 : static_cast<long>(it->second);
}

std::string FormBasis::name(std::size_t i) const {
  static const char* vars[] = {"x", "y", "z", "w"};
  const auto& l = labels.at(i);
  const auto& c = coefficients[l.coefficient];
  std::ostringstream os;
  const bool poly = space.kind == CoefficientSpace::Kind::Polynomial;
  auto var = [&](int j) {
    if (!poly) return std::string("t") + std::to_string(j);
    return space.variables <= 4 ? std::string(vars[j]) : "x" + std::to_string(j);
  };
  bool any = false;
  if (poly) {
    for (std::size_t j = 0; j < c.index.size(); ++j) {
      if (c.index[j] == 0) continue;
      os << (any ? " " : "") << var(static_cast<int>(j));
      if (c.index[j] > 1) os << "^" << c.index[j];
      any = true;
    }
  } else if (c.grade > 0) {
    os << (c.parity == 0 ? "cos(" : "sin(");
    for (std::size_t j = 0; j < c.index.size(); ++j) os << (j ? "," : "") << c.index[j];
    os << ")";
    any = true;
  }
  for (std::size_t j = 0; j < l.wedge.size(); ++j) {
    os << (j == 0 ? (any ? " " : "") : "^") << "d" << var(l.wedge[j]);
    any = true;
  }
  if (!any) os << "1";
  return os.str();
}

Vec FormBasis::weights() const {
  Vec w(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double s = 1.0;
    if (space.kind == CoefficientSpace::Kind::Polynomial)
      for (int a : coefficients[labels[i].coefficient].index) s *= std::tgamma(a + 1.0);
    w(static_cast<Eigen::Index>(i)) = std::sqrt(s);
  }
  return w;
}

FormBasis form_basis(const CoefficientSpace& space, int degree) {
  FormBasis b;
  b.space = space;
  b.degree = degree;
  b.coefficients = coefficient_basis(space);
  if (degree < 0 || degree > space.variables) return b;
  const auto wedges = combinations(space.variables, degree);
  const bool poly = space.kind == CoefficientSpace::Kind::Polynomial;
  for (int g = 0; g <= space.cutoff; ++g)
    for (const auto& w : wedges)
      for (std::size_t c = 0; c < b.coefficients.size(); ++c) {
        if (b.coefficients[c].grade != g) continue;
        b.lookup.emplace(std::make_pair(c, w), b.labels.size());
        b.labels.push_back({c, w, g + (poly ? degree : 0)});
      }
  return b;
}

Mat exterior_derivative_matrix(const FormBasis& from, const FormBasis& to) {
  if (from.space.kind != to.space.kind || from.space.variables != to.space.variables || to.degree != from.degree + 1)
    throw DomainError("exterior_derivative_matrix: incompatible bases");
  const auto target_index = coefficient_index(to.coefficients);
  const bool poly = from.space.kind == CoefficientSpace::Kind::Polynomial;
  Mat d = Mat::Zero(static_cast<Eigen::Index>(to.size()), static_cast<Eigen::Index>(from.size()));
  for (std::size_t col = 0; col < from.size(); ++col) {
    const auto& l = from.labels[col];
    const auto& c = from.coefficients[l.coefficient];
    for (int j = 0; j < from.space.variables; ++j) {
      const int mj = c.index[static_cast<std::size_t>(j)];
      if (mj == 0) continue;
      const auto [sign, wedge] = wedge_front(j, l.wedge);
      if (sign == 0) continue;
      CoeffKey key;
      double factor;
      if (poly) {
        auto e = c.index;
        --e[static_cast<std::size_t>(j)];
        key = {e, 0};
        factor = mj;
      } else {
        // d cos(m.t) = -m_j sin(m.t) dt_j, d sin(m.t) = m_j cos(m.t) dt_j
        key = {c.index, 1 - c.parity};
        factor = c.parity == 0 ? -mj : mj;
      }
      const auto it = target_index.find(key);
      const long row = it == target_index.end() ? -1 : index_of_label(to, it->second, wedge);
      if (row < 0) throw DomainError("exterior_derivative_matrix: target basis is too small for the image");
      d(row, static_cast<Eigen::Index>(col)) += sign * factor;
    }
  }
  return d;
}

Mat contraction_matrix(const FormBasis& from, const FormBasis& to, const GroupElement& x) {
  if (to.degree != from.degree - 1) throw DomainError("contraction_matrix: incompatible degrees");
  const int n = from.space.variables;
  if (x.dimension() != n) throw DomainError("contraction_matrix: generator dimension mismatch");
  const bool poly = from.space.kind == CoefficientSpace::Kind::Polynomial;
  const auto target_index = coefficient_index(to.coefficients);
  Mat c = Mat::Zero(static_cast<Eigen::Index>(to.size()), static_cast<Eigen::Index>(from.size()));
  for (std::size_t col = 0; col < from.size(); ++col) {
    const auto& l = from.labels[col];
    const auto& term = from.coefficients[l.coefficient];
    for (std::size_t p = 0; p < l.wedge.size(); ++p) {
      const int i = l.wedge[p];
      const double sign = p % 2 == 0 ? 1.0 : -1.0;
      std::vector<int> rest = l.wedge;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(p));
      auto add = [&](const CoeffKey& key, double v) {
        if (v == 0.0) return;
        const auto it = target_index.find(key);
        const long row = it == target_index.end() ? -1 : to.find(it->second, rest);
        if (row < 0) throw DomainError("contraction_matrix: target basis is too small for the image");
        c(row, static_cast<Eigen::Index>(col)) += sign * v;
      };
      if (poly) {
        // X_i = sum_j A_ij x_j
        for (int j = 0; j < n; ++j) {
          auto e = term.index;
          ++e[static_cast<std::size_t>(j)];
          add({e, 0}, x.linear(i, j));
        }
      } else {
        add({term.index, term.parity}, x.shift(i));
      }
    }
  }
  return c;
}

namespace {

bool is_polynomial(const FormBasis& b) { return b.space.kind == CoefficientSpace::Kind::Polynomial; }

// Raw matrix of the pullback g^* on the basis.
Mat pullback_matrix(const FormBasis& b, const GroupElement& g) {
  const int n = b.space.variables;
  const auto coeff_index = coefficient_index(b.coefficients);
  const auto wedges = combinations(n, b.degree);
  Mat out = Mat::Zero(static_cast<Eigen::Index>(b.size()), static_cast<Eigen::Index>(b.size()));
  const auto mc = b.coefficients.size();

  // Pulled-back coefficient functions as vectors over the coefficient basis.
  std::vector<Vec> pulled(mc);
  if (is_polynomial(b)) {
    if (g.has_shift()) throw UnsupportedError("polynomial forms need a linear action");
    for (std::size_t a = 0; a < mc; ++a) {
      const auto& e = b.coefficients[a].index;
      if (b.coefficients[a].grade == 0) {
        pulled[a] = Vec::Zero(static_cast<Eigen::Index>(mc));
        pulled[a](static_cast<Eigen::Index>(a)) = 1.0;
        continue;
      }
      const auto i = static_cast<std::size_t>(std::find_if(e.begin(), e.end(), [](int v) { return v > 0; }) - e.begin());
      auto lower = e;
      --lower[i];
      const Vec& base = pulled[coeff_index.at({lower, 0})];
      Vec v = Vec::Zero(static_cast<Eigen::Index>(mc));
      // (L x)_i = sum_j L_ij x_j
      for (std::size_t t = 0; t < mc; ++t) {
        const double ct = base(static_cast<Eigen::Index>(t));
        if (ct == 0.0) continue;
        for (int j = 0; j < n; ++j) {
          const double lij = g.linear(static_cast<Eigen::Index>(i), j);
          if (lij == 0.0) continue;
          auto up = b.coefficients[t].index;
          ++up[static_cast<std::size_t>(j)];
          v(static_cast<Eigen::Index>(coeff_index.at({up, 0}))) += ct * lij;
        }
      }
      pulled[a] = std::move(v);
    }
  } else {
    if ((g.linear - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
      throw UnsupportedError("trigonometric forms need angle translations");
    for (std::size_t a = 0; a < mc; ++a) {
      const auto& t = b.coefficients[a];
      Vec v = Vec::Zero(static_cast<Eigen::Index>(mc));
      if (t.grade == 0) {
        v(static_cast<Eigen::Index>(a)) = 1.0;
      } else {
        double phase = 0.0;
        for (int j = 0; j < n; ++j) phase += t.index[static_cast<std::size_t>(j)] * g.shift(j);
        const double cp = std::cos(phase), sp = std::sin(phase);
        const auto ic = static_cast<Eigen::Index>(coeff_index.at({t.index, 0}));
        const auto is = static_cast<Eigen::Index>(coeff_index.at({t.index, 1}));
        if (t.parity == 0) {
          v(ic) = cp;
          v(is) = -sp;
        } else {
          v(is) = cp;
          v(ic) = sp;
        }
      }
      pulled[a] = std::move(v);
    }
  }

  for (std::size_t col = 0; col < b.size(); ++col) {
    const auto& l = b.labels[col];
    for (const auto& w : wedges) {
      const double det = is_polynomial(b) ? determinant_minor(g.linear, l.wedge, w) : (w == l.wedge ? 1.0 : 0.0);
      if (std::abs(det) < 1e-15) continue;
      const Vec& f = pulled[l.coefficient];
      for (std::size_t t = 0; t < mc; ++t) {
        const double v = f(static_cast<Eigen::Index>(t));
        if (v == 0.0) continue;
        const long row = b.find(t, w);
        if (row < 0) throw UnsupportedError("the action does not preserve the coefficient space");
        out(row, static_cast<Eigen::Index>(col)) += det * v;
      }
    }
  }
  return out;
}

// Quadrature size making the circle average exact on the basis.
std::size_t exact_resolution(const ActionScenario& scn, const FormBasis& b) {
  double rate = 0.0;
  for (const auto& x : scn.group.lie_algebra()) {
    if (is_polynomial(b)) {
      const Eigen::EigenSolver<Mat> es(x.linear, false);
      rate = std::max(rate, es.eigenvalues().cwiseAbs().maxCoeff());
    } else {
      rate = std::max(rate, x.shift.cwiseAbs().sum());
    }
  }
  const int top = b.space.cutoff + (is_polynomial(b) ? b.degree : 0);
  return static_cast<std::size_t>(std::ceil(rate - 1e-9)) * static_cast<std::size_t>(top) + 1;
}

Mat scale(const Mat& m, const Vec& row_w, const Vec& col_w) {
  return row_w.asDiagonal() * m * col_w.cwiseInverse().asDiagonal();
}

std::vector<std::size_t> grade_indices(const FormBasis& b, int g) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.labels[i].grade == g) out.push_back(i);
  return out;
}

Mat block(const Mat& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  Mat out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
  return out;
}

constexpr double kKernelThreshold = 1e-9;

struct RankInfo {
  std::size_t rank = 0;
  double min_nonzero = std::numeric_limits<double>::infinity();
};

RankInfo svd_rank(const Mat& m) {
  RankInfo r;
  if (m.size() == 0) return r;
  const Eigen::JacobiSVD<Mat> svd(m);
  const Vec& s = svd.singularValues();
  const double thr = kKernelThreshold * std::max(1.0, s.size() ? s(0) : 0.0);
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thr) {
      ++r.rank;
      r.min_nonzero = std::min(r.min_nonzero, s(i));
    }
  return r;
}

void check_space(const ActionScenario& scn, const CoefficientSpace& space, bool cone_surrogate) {
  const auto kind = scn.manifold.kind();
  if (space.variables != scn.manifold.ambient_dimension())
    throw DomainError("coefficient space dimension does not match the chart");
  if (space.kind == CoefficientSpace::Kind::Polynomial) {
    if (kind == ManifoldKind::Sphere && !cone_surrogate)
      throw UnsupportedError("polynomial forms on spheres are only available through the cone surrogate");
    if (kind != ManifoldKind::Euclidean && kind != ManifoldKind::Sphere)
      throw UnsupportedError("polynomial forms need a Euclidean or sphere model");
  } else if (kind != ManifoldKind::Torus) {
    throw UnsupportedError("trigonometric forms need a torus model");
  }
}

}  // namespace

Mat invariance_projector(const ActionScenario& scn, const FormBasis& basis) {
  const auto quad = haar_quadrature(scn.group, std::max<std::size_t>(1, exact_resolution(scn, basis)));
  const auto n = static_cast<Eigen::Index>(basis.size());
  Mat p = Mat::Zero(n, n);
  for (const auto& node : quad.nodes) p += node.weight * pullback_matrix(basis, node.element);
  const Vec w = basis.weights();
  return scale(p, w, w);
}

Mat horizontality_projector(const ActionScenario& scn, const FormBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  const auto algebra = scn.group.lie_algebra();
  if (algebra.empty() || basis.degree == 0) return Mat::Identity(n, n);
  const auto target = form_basis(basis.space.with_cutoff(basis.space.cutoff + 1), basis.degree - 1);
  const Vec wf = basis.weights(), wt = target.weights();
  Mat stacked(0, n);
  for (const auto& x : algebra) {
    const Mat c = scale(contraction_matrix(basis, target, x), wt, wf);
    Mat grown(stacked.rows() + c.rows(), n);
    grown << stacked, c;
    stacked = std::move(grown);
  }
  Mat p = Mat::Zero(n, n);
  std::set<int> grades;
  for (const auto& l : basis.labels) grades.insert(l.grade);
  for (int g : grades) {
    const auto cols = grade_indices(basis, g);
    std::vector<std::size_t> rows(static_cast<std::size_t>(stacked.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    const Mat c = block(stacked, rows, cols);
    const Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    const double thr = kKernelThreshold * std::max(1.0, s.size() ? s(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > thr) ++rank;
    const Mat k = svd.matrixV().rightCols(static_cast<Eigen::Index>(cols.size()) - rank);
    const Mat pk = k * k.transpose();
    for (std::size_t a = 0; a < cols.size(); ++a)
      for (std::size_t b = 0; b < cols.size(); ++b)
        p(static_cast<Eigen::Index>(cols[a]), static_cast<Eigen::Index>(cols[b])) =
            pk(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  return p;
}

BasicComplex basic_complex(const ActionScenario& scn, const CoefficientSpace& space, bool cone_surrogate) {
  check_space(scn, space, cone_surrogate);
  BasicComplex c;
  c.space = space;
  const int n = space.variables;
  c.max_grade = space.cutoff;
  for (int k = 0; k <= n; ++k) c.bases.push_back(form_basis(space, k));
  for (int k = 0; k <= n; ++k) {
    c.invariance.push_back(invariance_projector(scn, c.bases[static_cast<std::size_t>(k)]));
    c.horizontality.push_back(horizontality_projector(scn, c.bases[static_cast<std::size_t>(k)]));
    const Mat& p = c.invariance.back();
    const Mat& h = c.horizontality.back();
    c.idempotence_max = std::max({c.idempotence_max, (p * p - p).cwiseAbs().maxCoeff(), (h * h - h).cwiseAbs().maxCoeff()});
    c.commutator_max = std::max(c.commutator_max, (p * h - h * p).cwiseAbs().maxCoeff());
  }
  std::vector<Mat> scaled;
  for (int k = 0; k < n; ++k) {
    const auto& from = c.bases[static_cast<std::size_t>(k)];
    const auto& to = c.bases[static_cast<std::size_t>(k + 1)];
    c.differential.push_back(exterior_derivative_matrix(from, to));
    scaled.push_back(scale(c.differential.back(), to.weights(), from.weights()));
  }
  for (int k = 0; k + 1 < n; ++k)
    c.dd_max = std::max(c.dd_max, (c.differential[static_cast<std::size_t>(k + 1)] * c.differential[static_cast<std::size_t>(k)])
                                      .cwiseAbs()
                                      .maxCoeff());

  // Basic subspaces per (degree, grade).
  std::map<std::pair<int, int>, Mat> q;
  std::map<std::pair<int, int>, std::vector<std::size_t>> idx;
  for (int k = 0; k <= n; ++k) {
    const auto& b = c.bases[static_cast<std::size_t>(k)];
    Mat full = Mat::Zero(static_cast<Eigen::Index>(b.size()), 0);
    for (int g = 0; g <= c.max_grade; ++g) {
      const auto ids = grade_indices(b, g);
      idx[{k, g}] = ids;
      if (ids.empty()) {
        q[{k, g}] = Mat(0, 0);
        continue;
      }
      const Mat pb = block(c.invariance[static_cast<std::size_t>(k)], ids, ids);
      const Mat hb = block(c.horizontality[static_cast<std::size_t>(k)], ids, ids);
      const Mat m = pb * hb;
      const Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
      std::vector<Eigen::Index> keep;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
      Mat qk(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j) qk.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
      q[{k, g}] = qk;
      Mat embedded = Mat::Zero(static_cast<Eigen::Index>(b.size()), qk.cols());
      for (std::size_t i = 0; i < ids.size(); ++i) embedded.row(static_cast<Eigen::Index>(ids[i])) = qk.row(static_cast<Eigen::Index>(i));
      Mat grown(full.rows(), full.cols() + embedded.cols());
      grown << full, embedded;
      full = std::move(grown);
    }
    c.basic.push_back(full);
  }

  c.betti.assign(static_cast<std::size_t>(n + 1), 0);
  c.betti_by_grade.assign(static_cast<std::size_t>(c.max_grade + 1), std::vector<long>(static_cast<std::size_t>(n + 1), 0));
  double min_sv = std::numeric_limits<double>::infinity();
  for (int g = 0; g <= c.max_grade; ++g) {
    std::vector<std::size_t> rank(static_cast<std::size_t>(n + 1), 0);
    for (int k = 0; k < n; ++k) {
      const Mat& qa = q[{k, g}];
      const Mat& qb = q[{k + 1, g}];
      if (qa.cols() == 0 || qb.rows() == 0) {
        c.restricted[{k, g}] = Mat::Zero(qb.cols(), qa.cols());
        continue;
      }
      const Mat db = block(scaled[static_cast<std::size_t>(k)], idx[{k + 1, g}], idx[{k, g}]);
      const Mat image = db * qa;
      const Mat r = qb.transpose() * image;
      c.restricted[{k, g}] = r;
      if (image.size() > 0) c.preservation_max = std::max(c.preservation_max, (image - qb * r).cwiseAbs().maxCoeff());
      const auto info = svd_rank(r);
      rank[static_cast<std::size_t>(k)] = info.rank;
      min_sv = std::min(min_sv, info.min_nonzero);
    }
    for (int k = 0; k <= n; ++k) {
      const long dim = q[{k, g}].cols();
      const long out = static_cast<long>(rank[static_cast<std::size_t>(k)]);
      const long in = k > 0 ? static_cast<long>(rank[static_cast<std::size_t>(k - 1)]) : 0;
      const long b = dim - out - in;
      c.betti_by_grade[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)] = b;
      c.betti[static_cast<std::size_t>(k)] += b;
    }
  }
  c.min_nonzero_singular = std::isfinite(min_sv) ? min_sv : 0.0;
  for (long b : c.betti_by_grade.back())
    if (b != 0 && c.max_grade > 0) c.truncation_warning = true;
  if (c.truncation_warning) c.warnings.push_back("cohomology found at the top retained grade; raise the cutoff");
  if (cone_surrogate)
    c.warnings.push_back("sphere scenario computed on the cone over the sphere; valid when the orbit space is acyclic");
  return c;
}

std::vector<long> basic_betti(const ActionScenario& scn, const CoefficientSpace& space, bool cone_surrogate) {
  return basic_complex(scn, space, cone_surrogate).betti;
}

VerificationReport verify_poincare_lemma(const BasicComplex& c, double tol) {
  const std::string name = "poincare_lemma";
  if (c.space.kind != CoefficientSpace::Kind::Polynomial)
    return VerificationReport::vacuous_pass(name, tol, "only defined for polynomial complexes of linear actions");
  const int n = c.space.variables;
  double worst = 0.0;
  std::size_t tested = 0;
  nlohmann::json where = nlohmann::json::object();
  for (int g = 1; g <= c.max_grade; ++g)
    for (int k = 1; k <= n; ++k) {
      const auto in_it = c.restricted.find({k - 1, g});
      if (in_it == c.restricted.end()) continue;
      const Mat& incoming = in_it->second;
      Mat closed;
      const auto out_it = c.restricted.find({k, g});
      if (out_it == c.restricted.end() || out_it->second.rows() == 0) {
        closed = Mat::Identity(incoming.rows(), incoming.rows());
      } else {
        const Mat& outgoing = out_it->second;
        const Eigen::JacobiSVD<Mat> svd(outgoing, Eigen::ComputeFullV);
        const Vec& s = svd.singularValues();
        const double thr = kKernelThreshold * std::max(1.0, s.size() ? s(0) : 0.0);
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
          if (s(i) > thr) ++rank;
        closed = svd.matrixV().rightCols(outgoing.cols() - rank);
      }
      if (closed.cols() == 0) continue;
      for (Eigen::Index j = 0; j < closed.cols(); ++j) {
        ++tested;
        double residual = closed.col(j).norm();
        if (incoming.cols() > 0) {
          const Vec beta = incoming.completeOrthogonalDecomposition().solve(closed.col(j));
          residual = (incoming * beta - closed.col(j)).norm();
        }
        if (residual > worst) {
          worst = residual;
          where = {{"degree", k}, {"grade", g}};
        }
      }
    }
  if (tested == 0) return VerificationReport::vacuous_pass(name, tol, "no closed basic forms of positive grade");
  auto r = VerificationReport::make(name, worst, tol);
  where["closed_forms_tested"] = tested;
  r.witness = where;
  return r;
}

VerificationReport derham_compare(const std::vector<long>& basic, const std::vector<long>& cech) {
  const std::size_t common = std::min(basic.size(), cech.size());
  double dev = 0.0;
  for (std::size_t k = 0; k < common; ++k) dev += std::abs(static_cast<double>(basic[k] - cech[k]));
  auto r = VerificationReport::make("derham_compare", dev, 0.0);
  r.witness = {{"basic", basic}, {"cech", cech}, {"degrees_compared", common}};
  if (common == 0) r = VerificationReport::failure("derham_compare", "no common degree");
  return r;
}

}  // namespace orbitspace
