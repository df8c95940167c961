#pragma once

#include "cubic3/tracker.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cubic3 {

class WitnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class QuadricClass { Smooth, Cone, TwoPlanes, DoublePlane, Zero };
const char* to_string(QuadricClass c);

/// Exact shape of a quadric V(g2) in P^3, plus its linear pieces.
struct QuadricStructure {
  QuadricClass kind = QuadricClass::Zero;
  int rank = 0;
  /// Rank 1: g2 = c * l^2 with l given by these coefficients.
  std::optional<RatVector> double_plane;
  /// Rank 2: the two linear factors (complex coefficients; defined over a
  /// quadratic field in general).
  std::vector<CVector> planes;
};

/// Rank of g2 decides everything. Throws WitnessError when g2 == 0.
QuadricStructure detect_nonreduced(const Form& g2);

/// Points of a curve V(equations) in P^{n-1} (n-2 equations in n variables)
/// on a random rational hyperplane, in affine coordinates of a random
/// complex patch.
struct WitnessSet {
  /// Exact equations; empty when the curve is only known numerically.
  std::vector<Form> equations;
  std::vector<CPoly> system;
  RatVector slice;
  CVector patch;
  std::vector<CVector> points;
  /// False when the curve was replaced by its reduction (double plane).
  bool reduced = true;
  int degree = 0;
  std::uint64_t seed = 0;
  int attempts = 0;
};

/// Solves equations + slice; retries with fresh slices until exactly
/// deg-many simple points appear.
WitnessSet witness_points(const std::vector<Form>& equations, std::uint64_t seed,
                          const TrackerSettings& settings = {}, int max_attempts = 6);

/// Same for numerically known equations.
WitnessSet witness_points(const std::vector<CPoly>& equations, std::uint64_t seed,
                          const TrackerSettings& settings = {}, int max_attempts = 6);

/// C_q = V(g2, g3) in P^3. A double-plane quadric is replaced by the reduced
/// curve V(l, g3) and the set is flagged non-reduced.
WitnessSet curve_witness(const Form& g2, const Form& g3, std::uint64_t seed,
                         const TrackerSettings& settings = {});

/// Max residual of the equations at the point (normalized to unit norm).
double membership_residual(const std::vector<Form>& equations, const CVector& x);
double membership_residual(const std::vector<CPoly>& equations, const CVector& x);

/// Transports points from slice `from` to slice `to` along the straight
/// segment in slice space. Fails (nullopt) if any path fails. `trails`
/// receives the per-point sample sequence when given.
std::optional<std::vector<CVector>> move_slice(const std::vector<CPoly>& equations, const CVector& patch,
                                               const std::vector<CVector>& points, const CVector& from,
                                               const CVector& to, const TrackerSettings& settings,
                                               std::vector<std::vector<CVector>>* trails = nullptr);

/// The loop L0 -> L1 -> L2 -> L0 as a permutation of the witness points
/// (perm[i] = index reached from point i); nullopt when a leg fails or the
/// endpoints do not match the start set.
std::optional<std::vector<int>> monodromy_loop(const WitnessSet& w, const CVector& l1, const CVector& l2,
                                               const TrackerSettings& settings,
                                               std::vector<std::vector<CVector>>* trails = nullptr);

struct TraceData {
  /// Per-point second differences of the affine coordinates along a
  /// parallel pencil of slices.
  std::vector<CVector> second_differences;
  double scale = 0.0;
  double delta = 0.0;
  bool ok = false;
};

TraceData trace_data(const WitnessSet& w, std::uint64_t seed, const TrackerSettings& settings = {});

struct TraceCertificate {
  bool pass = false;
  double deviation = 0.0;
  bool indeterminate = false;
};

constexpr double kTraceTolerance = 1e-6;

TraceCertificate trace_test(const std::vector<int>& block, const TraceData& data);
TraceCertificate trace_test(const std::vector<int>& block, const WitnessSet& w, std::uint64_t seed,
                            const TrackerSettings& settings = {});

struct WitnessBlock {
  std::vector<int> points;
  int degree = 0;
  TraceCertificate certificate;
};

struct ComponentPartition {
  std::vector<WitnessBlock> blocks;
  int loops = 0;
  int discarded_loops = 0;
  bool stabilized = true;
  /// Blocks were merged by trace subset search after the loop budget ran out.
  bool trace_merged = false;
  std::uint64_t seed = 0;

  int components() const { return static_cast<int>(blocks.size()); }
  std::vector<int> degrees() const;
};

/// Orbits of random triangle loops, stopped after `window` loops without a
/// merge once every block passes the trace test, or after maxloops.
ComponentPartition monodromy_partition(const WitnessSet& w, int maxloops, std::uint64_t seed,
                                       const TrackerSettings& settings = {}, int window = 5);

}  // namespace cubic3
