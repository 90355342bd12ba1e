// linalg.hpp - dense Hermitian eigensolver and small numeric helpers
#pragma once

#include <Eigen/Dense>
#include <lapacke.h>

#include <complex>
#include <numbers>
#include <stdexcept>

namespace oamsim {

using cplx = std::complex<double>;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct EigenDecomposition {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // columns
};

namespace detail {
inline constexpr Eigen::Index small_eig = 96;

inline int zheevd(char jobz, Eigen::MatrixXcd& a, Eigen::VectorXd& w) {
    const auto n = static_cast<lapack_int>(a.rows());
    w.resize(a.rows());
    return LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n,
                          reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
}
}  // namespace detail

// Eigen's solver for small blocks, LAPACK divide-and-conquer above that.
inline EigenDecomposition eigh(Eigen::MatrixXcd a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eigh: matrix not square");
    if (a.rows() <= detail::small_eig) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
        if (es.info() != Eigen::Success) throw NumericalError("eigh: no convergence");
        return {es.eigenvalues(), es.eigenvectors()};
    }
    Eigen::VectorXd w;
    if (detail::zheevd('V', a, w) != 0) throw NumericalError("eigh: zheevd failed");
    return {std::move(w), std::move(a)};
}

inline Eigen::VectorXd eigvalsh(Eigen::MatrixXcd a) {
    if (a.rows() <= detail::small_eig) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericalError("eigvalsh: no convergence");
        return es.eigenvalues();
    }
    Eigen::VectorXd w;
    if (detail::zheevd('N', a, w) != 0) throw NumericalError("eigvalsh: zheevd failed");
    return w;
}

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double x) {
    x = std::remainder(x, two_pi);
    if (x <= -std::numbers::pi) x += two_pi;
    return x;
}

}  // namespace oamsim
