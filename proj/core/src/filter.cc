#include "dcs/filter.h"

#include <cmath>
#include <complex>

#include "dcs/error.h"

namespace dcs {
namespace {

using Complex = std::complex<double>;

// Coefficients of prod_i (x - roots_i), highest power first.
std::vector<double> Poly(const std::vector<Complex>& roots) {
  std::vector<Complex> c{1.0};
  for (const Complex& r : roots) {
    c.push_back(0.0);
    for (std::size_t i = c.size() - 1; i > 0; --i) c[i] -= r * c[i - 1];
  }
  std::vector<double> out;
  for (const Complex& v : c) out.push_back(v.real());
  return out;
}

}  // namespace

IirFilter ChebyshevHighpass(int order, double ripple_db, double cutoff) {
  if (order < 1) throw ContractError("filter order must be positive");
  if (!(ripple_db > 0.0)) throw ContractError("passband ripple must be positive");
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw ContractError("cutoff must lie in (0, 1)");

  const double eps = std::sqrt(std::pow(10.0, 0.1 * ripple_db) - 1.0);
  const double mu = std::asinh(1.0 / eps) / order;
  std::vector<Complex> poles;
  Complex gain = 1.0;
  for (int k = -order + 1; k < order; k += 2) {
    const double theta = M_PI * k / (2.0 * order);
    const Complex p = -std::sinh(Complex(mu, theta));
    poles.push_back(p);
    gain *= -p;
  }
  double k_analog = gain.real();
  if (order % 2 == 0) k_analog /= std::sqrt(1.0 + eps * eps);

  const double fs2 = 4.0;  // 2 * fs with fs = 2 (Nyquist normalized to 1)
  const double warped = fs2 * std::tan(M_PI * cutoff / 2.0);
  Complex prod_neg = 1.0;
  for (Complex& p : poles) {
    prod_neg *= -p;
    p = warped / p;
  }
  double k_hp = k_analog * (1.0 / prod_neg).real();
  std::vector<Complex> zeros(order, 0.0);

  Complex num = 1.0, den = 1.0;
  for (Complex& z : zeros) {
    num *= fs2 - z;
    z = (fs2 + z) / (fs2 - z);
  }
  for (Complex& p : poles) {
    den *= fs2 - p;
    p = (fs2 + p) / (fs2 - p);
  }
  const double k_digital = k_hp * (num / den).real();

  IirFilter f;
  f.b = Poly(zeros);
  for (double& v : f.b) v *= k_digital;
  f.a = Poly(poles);
  return f;
}

std::vector<double> ApplyFilter(const IirFilter& filter, const std::vector<double>& x) {
  if (filter.a.empty() || filter.a[0] == 0.0) throw ContractError("a[0] must be nonzero");
  const std::size_t order = std::max(filter.a.size(), filter.b.size());
  std::vector<double> b(order, 0.0), a(order, 0.0);
  for (std::size_t i = 0; i < filter.b.size(); ++i) b[i] = filter.b[i] / filter.a[0];
  for (std::size_t i = 0; i < filter.a.size(); ++i) a[i] = filter.a[i] / filter.a[0];
  std::vector<double> state(order, 0.0);
  std::vector<double> y(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double out = b[0] * x[t] + state[0];
    for (std::size_t i = 1; i < order; ++i) {
      state[i - 1] = b[i] * x[t] - a[i] * out + (i < order - 1 ? state[i] : 0.0);
    }
    y[t] = out;
  }
  return y;
}

Sequence ApplyFilter(const IirFilter& filter, const Sequence& x) {
  if (x.empty()) return {};
  const Eigen::Index dim = x[0].size();
  Sequence out(x.size(), Vector::Zero(dim));
  std::vector<double> channel(x.size());
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (std::size_t t = 0; t < x.size(); ++t) {
      if (x[t].size() != dim) throw DimensionError("sequence entries differ in length");
      channel[t] = x[t](c);
    }
    const std::vector<double> y = ApplyFilter(filter, channel);
    for (std::size_t t = 0; t < x.size(); ++t) out[t](c) = y[t];
  }
  return out;
}

}  // namespace dcs
