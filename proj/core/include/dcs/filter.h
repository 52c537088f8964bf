#pragma once

#include <vector>

#include "dcs/model.h"

namespace dcs {

// Rational transfer function b(z^-1) / a(z^-1) with a[0] = 1.
struct IirFilter {
  std::vector<double> b;
  std::vector<double> a;
};

// Chebyshev type I high-pass: analog prototype with `ripple_db` passband
// ripple, low-pass to high-pass transform at the prewarped cutoff and a
// bilinear map. `cutoff` is a fraction of the Nyquist frequency in (0, 1).
IirFilter ChebyshevHighpass(int order, double ripple_db, double cutoff);

// Direct-form II transposed difference equation from a zero initial state.
std::vector<double> ApplyFilter(const IirFilter& filter, const std::vector<double>& x);

// Filters every component of a vector sequence along time.
Sequence ApplyFilter(const IirFilter& filter, const Sequence& x);

}  // namespace dcs
