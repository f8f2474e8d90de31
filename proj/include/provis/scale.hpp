#pragma once

#include <utility>

namespace provis {

enum class ScaleKind { LinearPosition, LinearColorRamp };

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Default ramp: white to dark green.
inline constexpr Rgb kRampLow{255.0, 255.0, 255.0};
inline constexpr Rgb kRampHigh{0.0, 100.0, 0.0};

/// A concrete linear scale: domain (mi, mx) onto a pixel range or a color ramp.
struct ScaleSpec {
  ScaleKind kind = ScaleKind::LinearPosition;
  double mi = 0.0;
  double mx = 1.0;
  /// Pixel range for position scales; lo may exceed hi (flipped axes).
  double lo = 0.0;
  double hi = 1.0;
  Rgb from = kRampLow;
  Rgb to = kRampHigh;
};

/// Throws InvalidArgument unless mi <= mx and all bounds are finite.
void validate(const ScaleSpec& s);

/// Position of `v`, clamped to the range; the range midpoint when mi == mx.
double apply_position(const ScaleSpec& s, double v);
/// Ramp color of `v`, clamped to the endpoints; the ramp midpoint when mi == mx.
Rgb apply_color(const ScaleSpec& s, double v);
/// Domain value whose position is `pixel` (clamped to the range). Throws
/// NotInvertible for color ramps and degenerate domains.
double invert_scale(const ScaleSpec& s, double pixel);

}  // namespace provis
