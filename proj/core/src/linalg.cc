#include "dcs/linalg.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dcs/error.h"

namespace dcs {

bool AllFinite(const Matrix& m) { return m.allFinite(); }

void ValidateMatrix(const Matrix& m, const char* name) {
  if (m.rows() == 0 || m.cols() == 0) {
    std::ostringstream msg;
    msg << "matrix " << name << " is empty (" << m.rows() << "x" << m.cols()
        << ")";
    throw DimensionError(msg.str());
  }
  if (!m.allFinite()) {
    throw ContractError(std::string("matrix ") + name +
                        " has non-finite entries");
  }
}

Vector SingularValues(const Matrix& d) {
  if (d.rows() == 0 || d.cols() == 0) {
    throw DimensionError("singular values of an empty matrix");
  }
  if (std::min(d.rows(), d.cols()) > 16) {
    Eigen::BDCSVD<Matrix> svd(d);
    return svd.singularValues();
  }
  Eigen::JacobiSVD<Matrix> svd(d);
  return svd.singularValues();
}

double OperatorNorm(const Matrix& d) {
  ValidateMatrix(d, "D");
  return SingularValues(d)(0);
}

bool IsSymmetric(const Matrix& d, double tol) {
  if (d.rows() != d.cols()) return false;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
      if (std::abs(d(i, j) - d(j, i)) > tol) return false;
    }
  }
  return true;
}

SpectralSummary ComputeSpectralSummary(const Matrix& d, bool symmetric_hint) {
  ValidateMatrix(d, "D");
  SpectralSummary out;
  if (symmetric_hint) {
    if (!IsSymmetric(d)) {
      throw ContractError("symmetric_hint set for a non-symmetric matrix");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(d, Eigen::EigenvaluesOnly);
    const Vector& ev = eig.eigenvalues();
    out.eigenvalues_symmetric.emplace(ev.data(), ev.data() + ev.size());
    const Vector abs_ev = ev.cwiseAbs();
    out.sigma_max = abs_ev.maxCoeff();
    out.sigma_min = abs_ev.minCoeff();
    return out;
  }
  const Vector sv = SingularValues(d);
  out.sigma_max = sv(0);
  out.sigma_min = sv(sv.size() - 1);
  return out;
}

double RankThreshold(const Matrix& d, double sigma_max) {
  return kRankRelTol * sigma_max *
         static_cast<double>(std::max(d.rows(), d.cols()));
}

int NumericalRank(const Matrix& d) {
  if (d.rows() == 0 || d.cols() == 0) return 0;
  const Vector sv = SingularValues(d);
  const double thr = RankThreshold(d, sv(0));
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > thr) ++rank;
  }
  return rank;
}

Matrix RangeBasis(const Matrix& d) {
  if (d.rows() == 0 || d.cols() == 0) return Matrix(d.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(d, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  const double thr = RankThreshold(d, sv(0));
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > thr) ++rank;
  return svd.matrixU().leftCols(rank);
}

double GramSigmaMax(const Matrix& d) {
  const Vector sv = SingularValues(d);
  return sv(0) * sv(0);
}

double GramSigmaMin(const Matrix& d) {
  // For wide D the Gram matrix D^T D is singular.
  if (d.rows() < d.cols()) return 0.0;
  const Vector sv = SingularValues(d);
  const double s = sv(sv.size() - 1);
  return s * s;
}

}  // namespace dcs
