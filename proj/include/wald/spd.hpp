#pragma once

#include <Eigen/Dense>
#include <vector>

namespace wald {

// Symmetric matrix wrapper. The constructor rejects matrices whose asymmetry
// exceeds `tol` and stores the symmetrized (M + M^T)/2.
class SymMatrix {
public:
    explicit SymMatrix(const Eigen::MatrixXd& m, double tol = 1e-12);

    const Eigen::MatrixXd& mat() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }
    double operator()(int i, int j) const { return m_(i, j); }

private:
    Eigen::MatrixXd m_;
};

// Symmetric positive definite matrix. The eigendecomposition happens once at
// construction (it doubles as the definiteness check) and the square root and
// its inverse are cached, since every metric operation needs them.
class SpdMatrix {
public:
    explicit SpdMatrix(const SymMatrix& s);
    explicit SpdMatrix(const Eigen::MatrixXd& m, double sym_tol = 1e-12);

    const Eigen::MatrixXd& mat() const { return m_; }
    const Eigen::MatrixXd& sqrt() const { return sqrt_; }
    const Eigen::MatrixXd& inv_sqrt() const { return inv_sqrt_; }
    const Eigen::VectorXd& eigenvalues() const { return evals_; }
    Eigen::MatrixXd inverse() const;
    int dim() const { return static_cast<int>(m_.rows()); }
    double operator()(int i, int j) const { return m_(i, j); }

private:
    void decompose();

    Eigen::MatrixXd m_, sqrt_, inv_sqrt_, evecs_;
    Eigen::VectorXd evals_;
};

// Affine-invariant metric <X,Y>_P = tr(P^-1 X P^-1 Y).
double inner(const SpdMatrix& p, const SymMatrix& x, const SymMatrix& y);
double norm(const SpdMatrix& p, const SymMatrix& x);

// Exp_P(X) = P^1/2 exp(P^-1/2 X P^-1/2) P^1/2 and its global inverse.
SpdMatrix exp_map(const SpdMatrix& p, const SymMatrix& x);
SymMatrix log_map(const SpdMatrix& p, const SpdMatrix& q);

// Point on the geodesic from p to q at time t (t outside [0,1] extrapolates).
SpdMatrix geodesic_point(const SpdMatrix& p, const SpdMatrix& q, double t);

// d(P,Q) = ||log(P^-1/2 Q P^-1/2)||_F.
double dist(const SpdMatrix& p, const SpdMatrix& q);

// Sum of consecutive distances.
double path_length(const std::vector<SpdMatrix>& path);

}  // namespace wald
