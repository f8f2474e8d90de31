#include "provis/scale.hpp"

#include <algorithm>
#include <cmath>

#include "provis/error.hpp"

namespace provis {

void validate(const ScaleSpec& s) {
  for (double v : {s.mi, s.mx, s.lo, s.hi}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "scale bounds must be finite");
  }
  if (s.mi > s.mx) throw Error(ErrorCode::InvalidArgument, "scale domain has mi > mx");
}

namespace {

/// Fraction of the domain, clamped to [0, 1].
double fraction(const ScaleSpec& s, double v) {
  if (s.mi == s.mx) return 0.5;
  return std::clamp((v - s.mi) / (s.mx - s.mi), 0.0, 1.0);
}

double lerp(double a, double b, double t) { return a + t * (b - a); }

}  // namespace

double apply_position(const ScaleSpec& s, double v) {
  if (s.kind != ScaleKind::LinearPosition) {
    throw Error(ErrorCode::InvalidArgument, "color ramp used as a position scale");
  }
  return lerp(s.lo, s.hi, fraction(s, v));
}

Rgb apply_color(const ScaleSpec& s, double v) {
  if (s.kind != ScaleKind::LinearColorRamp) {
    throw Error(ErrorCode::InvalidArgument, "position scale used as a color ramp");
  }
  const double t = fraction(s, v);
  return Rgb{lerp(s.from.r, s.to.r, t), lerp(s.from.g, s.to.g, t), lerp(s.from.b, s.to.b, t)};
}

double invert_scale(const ScaleSpec& s, double pixel) {
  if (s.kind != ScaleKind::LinearPosition) {
    throw Error(ErrorCode::NotInvertible, "color ramps are not invertible");
  }
  if (s.mi == s.mx) throw Error(ErrorCode::NotInvertible, "degenerate scale domain");
  if (s.lo == s.hi) throw Error(ErrorCode::NotInvertible, "degenerate scale range");
  const double p = std::clamp(pixel, std::min(s.lo, s.hi), std::max(s.lo, s.hi));
  if (p == s.lo) return s.mi;
  if (p == s.hi) return s.mx;
  return s.mi + (p - s.lo) / (s.hi - s.lo) * (s.mx - s.mi);
}

}  // namespace provis
