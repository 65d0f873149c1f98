#pragma once

#include <complex>
#include <vector>

#include "coopdde/matrix.hpp"

namespace coopdde {

/// All eigenvalues of a real square matrix via Householder reduction to
/// Hessenberg form followed by Francis double-shift QR iteration.
/// Result is sorted by descending real part, then descending imaginary part.
/// Throws NumericalError if the QR iteration fails to converge.
std::vector<std::complex<double>> dense_eigenvalues(const Matrix& a);

/// Largest real part over the spectrum.
double max_real_part(const std::vector<std::complex<double>>& eigenvalues);

}  // namespace coopdde
