// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_MATRIX_HPP
#define QCOMPAT_MATRIX_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace qcompat {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Default relative tolerance for algebraic identities (double precision with
// headroom for total dimensions up to ~64). Tolerances are measured against
// 1 + ||.||_F unless stated otherwise.
inline constexpr double kAlgTol = 1e-10;
// Numerical rank cut: singular values / eigenvalues below kRankTol times the
// largest one count as zero.
inline constexpr double kRankTol = 1e-9;

inline CMatrix dagger(const CMatrix& a) { return a.adjoint(); }

double fnorm(const CMatrix& a);

// ||a - a*||_F
double herm_defect(const CMatrix& a);

bool is_hermitian(const CMatrix& a, double rel_tol = kAlgTol);

inline CMatrix hermitize(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

bool all_finite(const CMatrix& a);

CMatrix kron(const CMatrix& a, const CMatrix& b);

CMatrix matrix_unit(int n, int a, int b);

// Orthonormal (Hilbert-Schmidt) basis of the real vector space of Hermitian
// n x n matrices: diagonal units, then (E_ab+E_ba)/sqrt(2) and
// i(E_ab-E_ba)/sqrt(2) for a < b. Size n^2.
std::vector<CMatrix> hermitian_basis(int n);

// Re tr(a^* b); restricted to Hermitian arguments this is tr(ab).
double hs_inner(const CMatrix& a, const CMatrix& b);

// Partial traces of an (n*m) x (n*m) matrix viewed as an element of
// M_n (x) M_m with the first factor indexing blocks of size m.
CMatrix ptrace_first(const CMatrix& j, int n, int m);
CMatrix ptrace_second(const CMatrix& j, int n, int m);

// Deterministic random source. Gaussians come from an explicit Box-Muller
// transform over mt19937_64 output so that streams are reproducible across
// standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }
  double uniform();   // [0, 1)
  double gaussian();  // standard normal
  Complex cgaussian();

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

CMatrix random_matrix(int rows, int cols, Rng& rng);
CMatrix random_hermitian(int n, Rng& rng);
// rows >= cols; Haar-like via QR of a Gaussian matrix.
CMatrix random_isometry(int rows, int cols, Rng& rng);
CMatrix random_unitary(int n, Rng& rng);
CMatrix random_density(int n, Rng& rng);

}  // namespace qcompat

#endif
