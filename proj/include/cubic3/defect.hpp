#pragma once

#include "cubic3/singular.hpp"
#include "cubic3/witness.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cubic3 {

/// An invariant that must hold was violated (per-point defects disagree,
/// sigma out of range, ...).
class CertificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (g2, g3) with f(Ty) = y4 g2 + g3 after moving q to [0:0:0:0:1].
std::pair<Form, Form> project(const Form& f, const RatVector& q);

/// Decomposition of C_q for one projection point.
struct Projection {
  std::optional<RatVector> point;
  CVector approx;
  int corank = -1;
  QuadricClass quadric = QuadricClass::Zero;
  /// Vertex of the quadric cone in the coordinates of the witness points
  /// (exact corank-1 projections only).
  std::optional<CVector> vertex;
  WitnessSet witness;
  ComponentPartition partition;
  int k = 0;
  int sigma = 0;
  /// Exact point, loops stabilized, every block passes the trace test.
  bool certified = false;
  std::uint64_t seed = 0;
};

/// Projects from one singular point. Numeric points use the quadric cone of
/// the Hessian and a fixed hyperplane section instead of an exact change.
Projection project_from(const Form& f, const SingularPoint& p, std::uint64_t seed,
                        const TrackerSettings& settings = {}, int max_loops = 60);

struct DefectReport {
  std::vector<SingularPoint> points;
  bool smooth = false;
  bool cone = false;
  std::optional<int> sigma;
  bool certified = false;
  /// The chosen projection first, then the recomputations.
  std::vector<Projection> projections;
  std::vector<std::string> notes;
  std::uint64_t seed = 0;

  const Projection* chosen() const { return projections.empty() ? nullptr : &projections.front(); }
};

/// Finds and classifies Sing(X), then sigma = k - 1 (corank != 2) or
/// k - 2 (corank 2) from every rational singular point. Throws
/// CertificationFailure when the points disagree.
DefectReport compute_defect(const Form& f, std::uint64_t seed, const TrackerSettings& settings = {});

/// Same, starting from already located points (analyzed in place).
DefectReport compute_defect(const Form& f, std::vector<SingularPoint> points, std::uint64_t seed,
                            const TrackerSettings& settings = {});

struct HodgeReport {
  int mu_total = 0;
  bool mu_certified = true;
  int sigma = 0;
  int h3 = 0;
  std::optional<int> B, L;
  std::optional<int> h12, h21;
};

/// h3 = 10 - mu_tot + sigma; h12 = 5 - B and h21 = 5 - (L - sigma) - B when
/// every point has known local invariants.
HodgeReport hodge_numbers(const std::vector<SingularPoint>& points, int sigma);

}  // namespace cubic3
