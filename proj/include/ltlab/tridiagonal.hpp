#pragma once

#include <vector>

#include "ltlab/core.hpp"

namespace ltlab {

/// Complex symmetric tridiagonal matrix: off_diagonal[i] sits at (i, i+1) and (i+1, i).
struct TridiagonalComplexMatrix {
  std::vector<Complex> diagonal;
  std::vector<Complex> off_diagonal;

  std::size_t size() const { return diagonal.size(); }
};

/// All eigenvalues of a complex symmetric tridiagonal matrix by implicit QL
/// iteration with complex orthogonal rotations, which keep the matrix
/// tridiagonal (O(n^2) in total). Throws ComputationError naming the index
/// that failed to converge.
std::vector<Complex> eig_all(const TridiagonalComplexMatrix& matrix, int max_iterations_per_eigenvalue = 60);

}  // namespace ltlab
