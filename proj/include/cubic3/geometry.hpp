#pragma once

#include "cubic3/defect.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cubic3 {

enum class Verdict { Yes, No, Undetermined };
const char* to_string(Verdict v);

// ------------------------------------------------------- planes and scrolls

/// Numerical rank of the linear span of a witness block, from at least six
/// points gathered over several slices.
struct SpanTest {
  int rank = 0;
  /// sigma_rank / sigma_{rank+1}; infinite when the rank is full.
  double gap = 0.0;
  bool determined = false;
};

constexpr double kSpanGap = 1e6;

SpanTest block_span(const WitnessSet& w, const WitnessBlock& block, std::uint64_t seed,
                    const TrackerSettings& settings = {});

struct SurfaceVerdict {
  Verdict contains_plane = Verdict::Undetermined;
  Verdict contains_scroll = Verdict::Undetermined;
  /// Which component pattern decided.
  std::string pattern;
  /// (plane or scroll) == (sigma > 0); unset when sigma is unknown.
  std::optional<bool> consistent;
};

SurfaceVerdict detect_plane_scroll(const Projection& p, std::uint64_t seed, const TrackerSettings& settings = {},
                                   std::optional<int> sigma = std::nullopt);

// ----------------------------------------------------------- line geometry

class LineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A line of P^4 through two points; exact when both points are rational.
struct Line {
  CVector p, q;
  std::optional<RatVector> exact_p, exact_q;

  static Line exact(const RatVector& a, const RatVector& b);
  static Line numeric(const CVector& a, const CVector& b);
  bool is_exact() const { return exact_p.has_value(); }
};

/// f = A x0^2 + B x0 x1 + C x1^2 + D x0 + E x1 + F after sending the line to
/// {x2 = x3 = x4 = 0}; the parts are forms in y = (x2, x3, x4).
struct ConicBundleData {
  Line line;
  CMatrix change;
  std::array<CPoly, 6> parts;  // A, B, C, D, E, F
  CPoly discriminant;          // det M, degree 5
  std::optional<RatMatrix> exact_change;
  std::optional<std::array<Form, 6>> exact_parts;
  std::optional<Form> exact_discriminant;

  /// M(y) for the residual conics.
  CMatrix matrix_at(const CVector& y) const;
};

/// Throws LineError when the line is not on X or meets Sing(X).
ConicBundleData conic_bundle(const Form& f, const Line& l);

/// det [[A, B/2, D/2], [B/2, C, E/2], [D/2, E/2, F]].
template <class S>
Poly<S> conic_discriminant(const std::array<Poly<S>, 6>& parts);

/// True when the line lies on X (exactly for exact lines).
bool line_on(const Form& f, const Line& l, double tolerance = 1e-9);

/// True when some point of the line is singular on X (exact for exact lines).
bool line_meets_singular_locus(const Form& f, const Line& l, double tolerance = 1e-9);

struct GoodVerdict {
  Verdict good = Verdict::Undetermined;
  /// A fiber y where the residual conic contains l or has rank <= 1.
  std::optional<CVector> witness;
  std::string reason;
  /// Smallest relative residual of the rank-1 system seen (for marginal cases).
  double residual = 0.0;
};

/// (i) the coefficient matrix of A, B, C is invertible, and (ii) no fiber has
/// rank <= 1, decided on two independent random squarings.
GoodVerdict good_line_test(const ConicBundleData& cb, std::uint64_t seed, const TrackerSettings& settings = {});

struct LineVerdict {
  GoodVerdict good;
  Verdict discriminant_irreducible = Verdict::Undetermined;
  bool discriminant_certified = false;
  int discriminant_components = 0;
  Verdict cover_connected = Verdict::Undetermined;
  /// A sheet swap is a proof; its absence after the budget is only likely.
  bool cover_certified = false;
  int loops = 0;
  /// Point transports that closed up unambiguously.
  int transports = 0;
  bool very_good = false;
  std::uint64_t seed = 0;
};

constexpr int kCoverLoopBudget = 24;

/// Irreducibility of D_l and connectedness of the double cover of lines.
LineVerdict very_good_test(const ConicBundleData& cb, std::uint64_t seed, const TrackerSettings& settings = {});

/// Random lines on X: the six lines through a random point of X, repeated
/// over fresh points. Lines with rational coordinates come back exact.
std::vector<Line> sample_lines(const Form& f, int count, std::uint64_t seed, const TrackerSettings& settings = {});

/// Singular points of D_l with their coranks.
std::vector<SingularPoint> discriminant_singularities(const ConicBundleData& cb, std::uint64_t seed);

}  // namespace cubic3
