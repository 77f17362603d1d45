#pragma once

namespace klab {

// J_nu(x) for integer nu in [0, 40], x >= 0.  Three regimes: Taylor series
// near the origin, Miller downward recurrence in the middle, Hankel
// asymptotics (orders 0 and 1, then upward recurrence) for large x.
double bessel_j(int nu, double x);

}  // namespace klab
