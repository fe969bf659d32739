#include "wald/spd.hpp"

#include <cmath>
#include <stdexcept>

#include "wald/errors.hpp"

namespace wald {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_sym(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw EigenFailure("eigensolver did not converge");
    return es;
}

// V f(D) V^T; with require_positive the nonpositive part of the spectrum is an error
Eigen::MatrixXd apply_spectral(const Eigen::MatrixXd& m, double (*f)(double),
                               bool require_positive) {
    auto es = eig_sym(m);
    Eigen::VectorXd d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i) {
        if (require_positive && !(d[i] > 0.0))
            throw NotPositiveDefinite("matrix has a nonpositive eigenvalue");
        d[i] = f(d[i]);
    }
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols()) throw std::invalid_argument("SymMatrix: matrix not square");
    double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol)
        throw std::invalid_argument("SymMatrix: asymmetry " + std::to_string(asym) +
                                    " exceeds tolerance");
    m_ = symmetrized(m);
}

SpdMatrix::SpdMatrix(const SymMatrix& s) : m_(s.mat()) { decompose(); }

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& m, double sym_tol)
    : m_(SymMatrix(m, sym_tol).mat()) {
    decompose();
}

void SpdMatrix::decompose() {
    auto es = eig_sym(m_);
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
    if (!(evals_.minCoeff() > 1e-12))
        throw NotPositiveDefinite("smallest eigenvalue " + std::to_string(evals_.minCoeff()) +
                                  " is not above 1e-12");
    Eigen::VectorXd root = evals_.cwiseSqrt();
    sqrt_ = evecs_ * root.asDiagonal() * evecs_.transpose();
    inv_sqrt_ = evecs_ * root.cwiseInverse().asDiagonal() * evecs_.transpose();
}

Eigen::MatrixXd SpdMatrix::inverse() const {
    return evecs_ * evals_.cwiseInverse().asDiagonal() * evecs_.transpose();
}

double inner(const SpdMatrix& p, const SymMatrix& x, const SymMatrix& y) {
    Eigen::MatrixXd a = p.inv_sqrt() * x.mat() * p.inv_sqrt();
    Eigen::MatrixXd b = p.inv_sqrt() * y.mat() * p.inv_sqrt();
    return a.cwiseProduct(b).sum();
}

double norm(const SpdMatrix& p, const SymMatrix& x) {
    return std::sqrt(std::max(inner(p, x, x), 0.0));
}

SpdMatrix exp_map(const SpdMatrix& p, const SymMatrix& x) {
    Eigen::MatrixXd arg = symmetrized(p.inv_sqrt() * x.mat() * p.inv_sqrt());
    Eigen::MatrixXd e = apply_spectral(arg, [](double t) { return std::exp(t); }, false);
    return SpdMatrix(symmetrized(p.sqrt() * e * p.sqrt()));
}

SymMatrix log_map(const SpdMatrix& p, const SpdMatrix& q) {
    Eigen::MatrixXd arg = symmetrized(p.inv_sqrt() * q.mat() * p.inv_sqrt());
    Eigen::MatrixXd l = apply_spectral(arg, [](double t) { return std::log(t); }, true);
    return SymMatrix(symmetrized(p.sqrt() * l * p.sqrt()));
}

SpdMatrix geodesic_point(const SpdMatrix& p, const SpdMatrix& q, double t) {
    Eigen::MatrixXd arg = symmetrized(p.inv_sqrt() * q.mat() * p.inv_sqrt());
    auto es = eig_sym(arg);
    Eigen::VectorXd d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0)) throw NotPositiveDefinite("geodesic argument not positive definite");
        d[i] = std::pow(d[i], t);
    }
    Eigen::MatrixXd e = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
    return SpdMatrix(symmetrized(p.sqrt() * e * p.sqrt()));
}

double dist(const SpdMatrix& p, const SpdMatrix& q) {
    Eigen::MatrixXd arg = symmetrized(p.inv_sqrt() * q.mat() * p.inv_sqrt());
    auto es = eig_sym(arg);
    double sum = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double ev = es.eigenvalues()[i];
        if (!(ev > 0.0)) throw NotPositiveDefinite("distance argument not positive definite");
        double l = std::log(ev);
        sum += l * l;
    }
    return std::sqrt(sum);
}

double path_length(const std::vector<SpdMatrix>& path) {
    if (path.empty()) throw std::invalid_argument("path_length: need at least one point");
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) total += dist(path[i - 1], path[i]);
    return total;
}

}  // namespace wald
