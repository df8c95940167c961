#pragma once

#include "cubic3/tracker.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cubic3 {

class NonIsolatedSingularLocus : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotIsolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InconsistentClassification : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Analytic type of an isolated singular point.
struct SingularityType {
  enum class Family {
    A, D, E,
    T333, T334, T344, T444, Q10, S11, U12,
    CorankTwoNonADE,     // triple-root cubic term with mu >= 9, or vanishing cubic term
    CorankThreeOther,    // corank 3, not resolved
    ConeVertex,          // g2 == 0
    Unclassified
  };
  Family family = Family::Unclassified;
  int index = 0;  // n for A_n, D_n, E_n

  std::string name() const;
  bool operator==(const SingularityType&) const = default;

  static SingularityType A(int n) { return {Family::A, n}; }
  static SingularityType D(int n) { return {Family::D, n}; }
  static SingularityType E(int n) { return {Family::E, n}; }
};

/// f moved so that q = [0:0:0:0:1]: f(T y) = y4 * g2 + g3 with g2, g3 in
/// the first four variables.
struct LocalEquation {
  LinearChange change = LinearChange::identity(5);
  Form g2;
  Form g3;
};

/// Throws std::invalid_argument when q is not a singular point of f.
LocalEquation local_equation(const Form& f, const RatVector& q);

bool is_singular_at(const Form& f, const RatVector& q);

/// 4 - rank(g2).
int corank(const Form& f, const RatVector& q);

/// 4 - numerical rank of the Hessian at a floating point (threshold on
/// relative singular values).
int numeric_corank(const Form& f, const CVector& q, double tolerance = 1e-8);
int numeric_corank(const CPoly& f, const CVector& q, double tolerance = 1e-8);

/// Germ after the splitting lemma: f ~ (nondegenerate square part) + h(z)
/// with h in corank-many variables, exact up to total degree `jet`.
struct ResidualGerm {
  Form h;
  int jet = 0;
  int corank = 0;
};

ResidualGerm residual_germ(const Form& g2, const Form& g3, int jet);

/// Dimension of the local algebra of the germ h at the origin by nullities
/// of Macaulay matrices; nullopt when nullities do not stabilize by
/// max_degree. Only degrees <= h_jet - 2 are trusted, so callers pass the
/// jet order the germ is exact to.
std::optional<int> local_milnor_number(const Form& h, int h_jet, int max_degree = 20);

/// Milnor number of f at the rational singular point q.
int milnor_number(const Form& f, const RatVector& q);

/// Corank 0/1 need nothing else; corank 2 reads the cubic term of the
/// residual; corank 3 uses mu, the component count of C_q (for the
/// Q10/T344 pair) and the components of the cubic tangent cone (for
/// S11/T444).
SingularityType classify(const LocalEquation& local, int corank, int mu, std::optional<int> components,
                         std::uint64_t seed = 1);

/// Exact count of distinct roots of a binary cubic (0 if it vanishes).
int binary_cubic_distinct_roots(const Form& c);

/// Quasi-homogeneous normal form in four variables (padded with squares).
struct NormalForm {
  Form f;
  std::vector<Rat> weights;
};
std::optional<NormalForm> quasi_homogeneous_normal_form(const SingularityType& type);

struct Spectrum {
  std::vector<Rat> numbers;  // ascending
  /// s_p = #{alpha : 3 - p < alpha <= 4 - p}
  std::array<int, 4> s{0, 0, 0, 0};
};

/// Spectrum of a quasi-homogeneous isolated germ: weighted degrees of a
/// monomial basis of its Jacobian algebra, shifted by the weight sum.
Spectrum spectrum(const NormalForm& nf);

struct LocalInvariants {
  int b11 = 0;
  int l11 = 0;
  Spectrum spec;
};

/// (b11, l11) = (s1, s2 - s1); nullopt for non-quasi-homogeneous types.
std::optional<LocalInvariants> local_invariants(const SingularityType& type, int mu);

struct SingularPoint {
  CVector approx;
  std::optional<RatVector> exact;
  int cluster_multiplicity = 0;
  int corank = -1;
  bool corank_certified = false;
  int milnor = -1;
  bool milnor_certified = false;
  SingularityType type;
  std::optional<LocalInvariants> invariants;
};

/// Sing(X) by homotopy continuation on a squared-up gradient system over a
/// random patch, run twice with independent data and compared.
/// Works for forms in any number of variables >= 2.
std::vector<SingularPoint> find_singular_points(const Form& f, std::uint64_t seed,
                                                const TrackerSettings& settings = {});

/// Same for a form with floating-point coefficients: numeric points with
/// numeric coranks, nothing reconstructed.
std::vector<SingularPoint> find_singular_points(const CPoly& f, std::uint64_t seed,
                                                const TrackerSettings& settings = {});

/// Fills corank, Milnor number, type and local invariants.
void analyze_point(const Form& f, SingularPoint& p, std::optional<int> components = std::nullopt,
                   std::uint64_t seed = 1);

}  // namespace cubic3
