// gaussian.hpp — Covariance matrices of zero-mean Gaussian states
//
// Ordering is (X_1, P_1, ..., X_N, P_N) and entries are symmetrised second
// moments <{r_j, r_k}>/2, so the vacuum is identity/2.

#pragma once

#include <vector>

#include <Eigen/Dense>

namespace rcmap {
struct NormalModeBasis;
}

namespace rcmap::gaussian {

class CovarianceMatrix {
public:
    // Throws ContractError if `data` is not square, even-sized and symmetric
    // to 1e-12 relative; the stored matrix is the exact symmetric part.
    explicit CovarianceMatrix(const Eigen::MatrixXd& data);

    static CovarianceMatrix vacuum(int n_modes);

    int n_modes() const { return static_cast<int>(data_.rows() / 2); }
    const Eigen::MatrixXd& data() const { return data_; }
    double operator()(int i, int j) const { return data_(i, j); }

    double xx(int i, int j) const { return data_(2 * i, 2 * j); }
    double xp(int i, int j) const { return data_(2 * i, 2 * j + 1); }
    double pp(int i, int j) const { return data_(2 * i + 1, 2 * j + 1); }

private:
    Eigen::MatrixXd data_;
};

// Direct sum of [[0, 1], [-1, 0]] blocks.
Eigen::MatrixXd symplectic_form(int n_modes);

struct Physicality {
    bool physical{false};
    std::vector<double> symplectic_eigenvalues; // ascending
};

// Symplectic eigenvalues are the moduli of the eigenvalues of Theta * C,
// which come in +-i nu pairs.
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& C);

Physicality is_physical(const CovarianceMatrix& C, double tol = 1e-9);

// Uhlmann fidelity between zero-mean Gaussian states (squared convention:
// 1 for equal states, <psi|rho|psi> when one state is pure).
double uhlmann_fidelity(const CovarianceMatrix& C1, const CovarianceMatrix& C2);

// Partial trace: keep the (X_i, P_i) pairs listed in `keep`, in that order.
CovarianceMatrix reduce(const CovarianceMatrix& C, const std::vector<int>& keep);

// Gibbs state of the network Hamiltonian at temperature T, in node coordinates.
CovarianceMatrix thermal_covariance(const NormalModeBasis& basis, double temperature);

// Thermal state of a single oscillator of frequency omega.
CovarianceMatrix thermal_oscillator(double omega, double temperature);

// Block-diagonal product of single-mode (or multi-mode) states.
CovarianceMatrix direct_sum(const std::vector<CovarianceMatrix>& parts);

} // namespace rcmap::gaussian
