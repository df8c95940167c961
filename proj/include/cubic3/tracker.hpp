#pragma once

#include "cubic3/forms.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace cubic3 {

/// Path-tracking parameters. Step sizes are measured in |Δt|.
struct TrackerSettings {
  double initial_step = 0.01;
  double min_step = 1e-13;
  double max_step = 0.05;
  /// Relative Newton update size accepted by the corrector.
  double corrector_tolerance = 1e-9;
  int max_corrector_iterations = 3;
  double divergence_bound = 1e8;
  /// Distance from t = 1 where the Cauchy endgame takes over.
  double endgame_radius = 0.05;
  /// Samples per winding of the endgame circle.
  int endgame_samples = 16;
  int max_winding = 24;
  double clustering_radius = 1e-6;
  double max_failure_fraction = 0.25;

  /// Throws std::invalid_argument unless 0 < min <= initial <= max and
  /// tolerances are positive.
  void validate() const;
};

enum class PathStatus { Tracking, Converged, Diverged, SingularEndpoint, Failed };
const char* to_string(PathStatus s);

/// Square or non-square system of polynomials compiled for fast evaluation
/// of values and Jacobians in complex arithmetic.
class PolySystem {
 public:
  PolySystem() = default;
  PolySystem(std::vector<CPoly> equations, int nvars);
  static PolySystem from_forms(const std::vector<Form>& equations, int nvars);

  int size() const { return static_cast<int>(equations_.size()); }
  int nvars() const { return nvars_; }
  const std::vector<CPoly>& equations() const { return equations_; }
  std::vector<int> degrees() const;

  CVector evaluate(const CVector& x) const;
  void evaluate(const CVector& x, CVector& value, CMatrix& jacobian) const;

 private:
  struct Term {
    Complex coefficient;
    std::vector<int> exponent;
  };
  std::vector<CPoly> equations_;
  std::vector<std::vector<Term>> compiled_;
  int nvars_ = 0;
  int max_degree_ = 0;
};

/// H(x, t) with derivatives; t is complex.
class Homotopy {
 public:
  virtual ~Homotopy() = default;
  virtual int dim() const = 0;
  virtual void evaluate(const CVector& x, Complex t, CVector& h, CMatrix& hx, CVector& ht) const = 0;
};

/// H = gamma (1 - t) G + t F.
class StraightLineHomotopy final : public Homotopy {
 public:
  StraightLineHomotopy(PolySystem start, PolySystem target, Complex gamma = 1.0);
  int dim() const override { return target_.nvars(); }
  void evaluate(const CVector& x, Complex t, CVector& h, CMatrix& hx, CVector& ht) const override;
  const PolySystem& target() const { return target_; }

 private:
  PolySystem start_;
  PolySystem target_;
  Complex gamma_;
};

struct StartSystem {
  PolySystem system;
  std::vector<CVector> solutions;
};

/// g_i = x_i^{d_i} - 1 with all prod d_i solutions.
StartSystem total_degree_start(const PolySystem& target);

struct SegmentResult {
  PathStatus status = PathStatus::Tracking;
  CVector x;
  Complex t;
  int steps = 0;
};

/// Tracks x from t0 to t1 along the straight complex segment. On success
/// the status stays Tracking and t == t1. `samples`, when given, receives
/// every accepted point.
SegmentResult track_segment(const Homotopy& h, const CVector& x0, Complex t0, Complex t1,
                            const TrackerSettings& settings,
                            std::vector<std::pair<Complex, CVector>>* samples = nullptr);

struct PathResult {
  PathStatus status = PathStatus::Tracking;
  CVector x;
  Complex last_t;
  int winding = 1;
  int steps = 0;
  double residual = 0.0;
};

/// Tracks a start solution from t = 0 to t = 1, finishing with the Cauchy
/// endgame when the endpoint is singular.
PathResult track(const Homotopy& h, const CVector& start, const TrackerSettings& settings);

/// Newton refinement on a square system; returns the final update norm.
double newton_refine(const PolySystem& sys, CVector& x, int iterations, double tolerance);

struct Solution {
  CVector x;
  int multiplicity = 1;
  bool singular = false;
  double residual = 0.0;
};

struct SolveResult {
  std::vector<Solution> solutions;
  int paths = 0;
  int converged = 0;
  int singular = 0;
  int diverged = 0;
  int failed = 0;
  Complex gamma;
  std::uint64_t seed = 0;
};

class TrackingFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All isolated solutions of a square system by total-degree homotopy with
/// a random gamma; endpoints within the clustering radius are merged and the
/// cluster size is the multiplicity.
SolveResult solve_all(const PolySystem& sys, const TrackerSettings& settings, std::uint64_t seed);

/// Homogeneous equations in n+1 variables (n of them) solved on the affine
/// patch {patch . x = 1}.
SolveResult solve_on_patch(const std::vector<CPoly>& equations, const CVector& patch,
                           const TrackerSettings& settings, std::uint64_t seed);

/// Deterministic source of random complex data.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0);
  Complex unit_complex();
  Complex gaussian_complex();
  CVector gaussian_vector(int n);
  int integer(int lo, int hi);
  std::uint64_t next_seed() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Rational approximation p/q of x with q <= bound by continued fractions.
Rat best_rational(double x, std::int64_t bound);

/// Continued-fraction reconstruction of each coordinate ratio against the
/// largest coordinate. Returns a primitive integer vector, or nullopt when
/// some ratio is not within `tolerance` of a fraction with denominator at
/// most `bound` or has a non-negligible imaginary part.
std::optional<RatVector> rational_reconstruct(const CVector& p, std::int64_t bound,
                                              double tolerance = 1e-8);

/// As above, additionally requiring `verify` to accept the exact point.
std::optional<RatVector> rational_reconstruct(const CVector& p, std::int64_t bound, double tolerance,
                                              const std::function<bool(const RatVector&)>& verify);

}  // namespace cubic3
