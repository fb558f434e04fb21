#pragma once

// Graded truncations of the basic de Rham complex: polynomial forms for
// linear actions, trigonometric forms for angle translations.

#include "orbitspace/group.hpp"

#include <map>
#include <string>
#include <vector>

namespace orbitspace {

struct CoefficientSpace {
  enum class Kind { Polynomial, Trig };
  Kind kind = Kind::Polynomial;
  /// Polynomial: number of variables. Trig: number of angles.
  int variables = 1;
  /// Polynomial: max total degree D. Trig: max frequency F (max norm).
  int cutoff = 0;

  static CoefficientSpace polynomial(int n, int degree) { return {Kind::Polynomial, n, degree}; }
  static CoefficientSpace trig(int k, int frequency) { return {Kind::Trig, k, frequency}; }
  CoefficientSpace with_cutoff(int c) const { return {kind, variables, c}; }
  std::string describe() const;
};

/// Monomial x^index (parity unused) or cos / sin (parity 0 / 1) of index . theta.
struct CoefficientTerm {
  std::vector<int> index;
  int parity = 0;
  /// Polynomial degree or max-norm frequency.
  int grade = 0;
};

/// Polynomials: by degree, then descending lexicographic exponent. Trig: by
/// grade, then lexicographic frequency (first nonzero entry positive), cos before sin.
std::vector<CoefficientTerm> coefficient_basis(const CoefficientSpace& space);

struct FormLabel {
  std::size_t coefficient = 0;
  /// Sorted differential indices.
  std::vector<int> wedge;
  /// Internal grade: coefficient grade, plus the form degree for polynomials.
  int grade = 0;
};

struct FormBasis {
  CoefficientSpace space;
  int degree = 0;
  std::vector<CoefficientTerm> coefficients;
  std::vector<FormLabel> labels;

  std::size_t size() const { return labels.size(); }
  /// Position of (coefficient, wedge) or -1.
  long find(std::size_t coefficient, const std::vector<int>& wedge) const;
  std::string name(std::size_t i) const;
  /// Fischer weight sqrt(alpha!) for polynomials, 1 for trig. In coordinates
  /// scaled by these weights orthogonal linear actions act orthogonally.
  Vec weights() const;

  std::map<std::pair<std::size_t, std::vector<int>>, std::size_t> lookup;
};

/// Ordered by coefficient grade, then wedge, then coefficient. Empty when
/// degree exceeds the number of variables.
FormBasis form_basis(const CoefficientSpace& space, int degree);

/// Matrix of d from `from` to `to` in the raw (unscaled) bases; exact
/// integer entries. Throws DomainError if an image falls outside `to`.
Mat exterior_derivative_matrix(const FormBasis& from, const FormBasis& to);

/// Matrix of the contraction with the fundamental field of generator x.
Mat contraction_matrix(const FormBasis& from, const FormBasis& to, const GroupElement& x);

/// Haar-averaged pullback in Fischer-scaled coordinates (orthogonal projector).
Mat invariance_projector(const ActionScenario& scn, const FormBasis& basis);

/// Orthogonal projector onto the common kernel of the contractions, in
/// Fischer-scaled coordinates. Identity for finite groups.
Mat horizontality_projector(const ActionScenario& scn, const FormBasis& basis);

struct BasicComplex {
  CoefficientSpace space;
  std::vector<FormBasis> bases;
  /// Scaled coordinates throughout.
  std::vector<Mat> invariance;
  std::vector<Mat> horizontality;
  /// d_k : degree k -> degree k + 1.
  std::vector<Mat> differential;
  /// Orthonormal basis of the basic subspace per degree.
  std::vector<Mat> basic;
  /// Grades whose complex is complete in every degree.
  int max_grade = 0;
  std::vector<long> betti;
  /// Betti contributions per grade: betti_by_grade[g][k].
  std::vector<std::vector<long>> betti_by_grade;
  /// Differential restricted to the basic subspaces, keyed by (degree, grade).
  std::map<std::pair<int, int>, Mat> restricted;

  double dd_max = 0.0;
  double idempotence_max = 0.0;
  double commutator_max = 0.0;
  double preservation_max = 0.0;
  /// Smallest singular value counted as nonzero in the ranks.
  double min_nonzero_singular = 0.0;
  bool truncation_warning = false;
  std::vector<std::string> warnings;
};

/// Polynomial spaces need a linear action on a Euclidean model (or on the
/// cone over a sphere when cone_surrogate is set); Trig spaces need angle
/// translations on a torus.
BasicComplex basic_complex(const ActionScenario& scn, const CoefficientSpace& space, bool cone_surrogate = false);

std::vector<long> basic_betti(const ActionScenario& scn, const CoefficientSpace& space, bool cone_surrogate = false);

/// Closed basic forms of positive degree and positive grade are exact:
/// largest least-squares residual.
VerificationReport verify_poincare_lemma(const BasicComplex& c, double tol);

/// Betti numbers agree degreewise up to the smaller top degree.
VerificationReport derham_compare(const std::vector<long>& basic, const std::vector<long>& cech);

}  // namespace orbitspace
