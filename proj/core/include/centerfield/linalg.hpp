#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "centerfield/errors.hpp"

namespace centerfield::linalg {

/// Thin QR with the sign convention R_ii > 0, so stretch factors are the
/// positive diagonal of R and Q is uniquely determined.
struct ThinQR {
    Eigen::MatrixXd q;
    Eigen::VectorXd stretches;
};

inline ThinQR thin_qr(const Eigen::MatrixXd& m) {
    const auto rows = m.rows();
    const auto cols = m.cols();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
    Eigen::VectorXd d = qr.matrixQR().topRows(cols).diagonal();
    for (Eigen::Index i = 0; i < cols; ++i) {
        if (d[i] < 0.0) {
            q.col(i) = -q.col(i);
            d[i] = -d[i];
        }
    }
    return {std::move(q), std::move(d)};
}

/// Deterministic column signs: make the entry of largest magnitude positive.
inline Eigen::MatrixXd sign_stabilized(Eigen::MatrixXd q) {
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
        Eigen::Index imax = 0;
        q.col(c).cwiseAbs().maxCoeff(&imax);
        if (q(imax, c) < 0.0) q.col(c) = -q.col(c);
    }
    return q;
}

/// Largest principal angle between span(a) and span(b), both with
/// orthonormal columns. For dim(a) <= dim(b) this measures containment.
inline double principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.cols() == 0 || b.cols() == 0) return 0.0;
    const Eigen::MatrixXd& small = a.cols() <= b.cols() ? a : b;
    const Eigen::MatrixXd& large = a.cols() <= b.cols() ? b : a;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(large.transpose() * small);
    double smin = svd.singularValues().minCoeff();
    smin = std::clamp(smin, -1.0, 1.0);
    return std::acos(smin);
}

/// Orthonormal basis of the orthogonal complement of span(q).
inline Eigen::MatrixXd orthonormal_complement(const Eigen::MatrixXd& q) {
    const auto d = q.rows();
    const auto k = q.cols();
    if (k == 0) return Eigen::MatrixXd::Identity(d, d);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
    Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    return full.rightCols(d - k);
}

/// Orthonormal basis of the kernel of m with the expected nullity; raises
/// when the singular values do not support that nullity.
inline Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, Eigen::Index nullity,
                                    double cond_tol = 1e-8) {
    if (nullity <= 0) return Eigen::MatrixXd(m.cols(), 0);
    if (m.rows() == 0) return Eigen::MatrixXd::Identity(m.cols(), m.cols()).leftCols(nullity);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const Eigen::Index rank = m.cols() - nullity;
    if (rank > sv.size())
        raise(errc::numerical_failure, "kernel smaller than the requested nullity");
    if (rank > 0 && !(sv[rank - 1] > cond_tol * std::max(1.0, sv[0])))
        raise(errc::numerical_failure, "kernel constraint is numerically rank deficient");
    if (rank < sv.size() && sv[rank] > 1e-6 * std::max(1.0, sv[0]))
        raise(errc::numerical_failure, "kernel dimension not resolved by the singular gap");
    return svd.matrixV().rightCols(nullity);
}

inline double operator_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().maxCoeff();
}

inline double smallest_singular_value(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().minCoeff();
}

/// Least-squares solve min |a x - b|.
inline Eigen::VectorXd lsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    return a.colPivHouseholderQr().solve(b);
}

inline Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m) {
    if (m.cols() == 0) return m;
    return thin_qr(m).q;
}

} // namespace centerfield::linalg
