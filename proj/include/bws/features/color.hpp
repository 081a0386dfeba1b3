#pragma once

#include <cstdint>

namespace bws::features {

/// CIE L*a*b* under D65.
struct LabPixel {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// sRGB (8-bit, gamma-encoded) to CIE Lab: linearise with the piecewise
/// sRGB transfer curve, convert to XYZ (D65), then to Lab.
LabPixel srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// sRGB transfer curve, 8-bit code to linear [0, 1].
double srgb_to_linear(std::uint8_t v);

double lab_distance(const LabPixel& p, const LabPixel& q);

}  // namespace bws::features
