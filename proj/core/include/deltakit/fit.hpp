#pragma once

#include <span>
#include <vector>

namespace deltakit {

struct LinearFit {
  std::vector<double> coefficients;  // one per design column
  std::vector<double> residuals;     // y - A c
  double rss = 0;
};

// Least squares y ~ sum_j c_j columns[j] by column-pivoted QR. NumericalError
// when the design is rank deficient or has fewer rows than columns.
LinearFit least_squares(const std::vector<std::vector<double>>& columns, std::span<const double> y);

}  // namespace deltakit
