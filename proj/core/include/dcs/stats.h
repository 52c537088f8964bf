#pragma once

#include <vector>

namespace dcs {

double Mean(const std::vector<double>& x);
// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double StdDev(const std::vector<double>& x);

// Ranks starting at 1, ties receive their average rank.
std::vector<double> Ranks(const std::vector<double>& x);

struct Correlation {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided, Student t with n - 2 degrees of freedom
  int n = 0;
};

double Pearson(const std::vector<double>& x, const std::vector<double>& y);
// Fewer than 3 pairs give rho = 0, p = 1.
Correlation Spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dcs
