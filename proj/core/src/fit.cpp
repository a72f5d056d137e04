#include "deltakit/fit.hpp"

#include <Eigen/Dense>

#include "deltakit/error.hpp"

namespace deltakit {

LinearFit least_squares(const std::vector<std::vector<double>>& columns, std::span<const double> y) {
  const auto rows = static_cast<Eigen::Index>(y.size());
  const auto cols = static_cast<Eigen::Index>(columns.size());
  if (cols == 0 || rows < cols) throw NumericalError("least_squares: fewer points than unknowns");
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto& c = columns[static_cast<std::size_t>(j)];
    if (static_cast<Eigen::Index>(c.size()) != rows) {
      throw NumericalError("least_squares: column length mismatch");
    }
    for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = c[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index i = 0; i < rows; ++i) b(i) = y[static_cast<std::size_t>(i)];
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  if (qr.rank() < cols) throw NumericalError("least_squares: rank-deficient design");
  const Eigen::VectorXd c = qr.solve(b);
  const Eigen::VectorXd r = b - A * c;
  LinearFit fit;
  fit.coefficients.assign(c.data(), c.data() + cols);
  fit.residuals.assign(r.data(), r.data() + rows);
  fit.rss = r.squaredNorm();
  return fit;
}

}  // namespace deltakit
