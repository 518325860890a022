#include "trajlab/core/rng.hpp"

#include <cmath>

namespace trajlab {

double Rng::gaussian() {
  // Box-Muller; u1 in (0,1] so log is finite.
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace trajlab
