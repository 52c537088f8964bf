#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace dcs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative tolerance for singular values and for every numerical-rank
// decision in the library: sigma_i counts when
//   sigma_i > kRankRelTol * sigma_max * max(rows, cols).
inline constexpr double kRankRelTol = 1e-10;

// Throws DimensionError if `m` is empty and ContractError if any entry is
// NaN or infinite. `name` is used in the message.
void ValidateMatrix(const Matrix& m, const char* name);

bool AllFinite(const Matrix& m);

// Induced 2-norm ||D||_{i,2} = sqrt(lambda_max(D^T D)).
double OperatorNorm(const Matrix& d);

struct SpectralSummary {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  // Ascending; populated only when the summary was requested for a
  // symmetric matrix.
  std::optional<std::vector<double>> eigenvalues_symmetric;
};

// Extreme singular values of `d`. sigma_min is the smallest of the
// min(rows, cols) singular values. With `symmetric_hint` the matrix must be
// square and symmetric within 1e-12 (ContractError otherwise) and its
// eigenvalues are returned as well.
SpectralSummary ComputeSpectralSummary(const Matrix& d, bool symmetric_hint);

bool IsSymmetric(const Matrix& d, double tol = 1e-12);

// Singular values in descending order.
Vector SingularValues(const Matrix& d);

// Threshold below which a singular value is treated as zero.
double RankThreshold(const Matrix& d, double sigma_max);

int NumericalRank(const Matrix& d);

// Orthonormal basis of range(d) (columns), using the library rank rule.
Matrix RangeBasis(const Matrix& d);

// Largest / smallest eigenvalue of the symmetric matrix D^T D. These are the
// sigma_max(.) / sigma_min(.) of Gram matrices that appear in the bounds.
double GramSigmaMax(const Matrix& d);
double GramSigmaMin(const Matrix& d);

}  // namespace dcs
