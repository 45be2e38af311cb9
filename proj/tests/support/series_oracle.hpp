#pragma once

// Test-side oracle: formal power-series solution of the invariance equation
// for deterministic polynomial maps with a one-dimensional neutral
// direction. Independent of the operator-based solver it checks: the map is
// re-stated here on truncated polynomials and the graph coefficients are
// obtained order by order from the eigencoordinate recursion.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

constexpr int kMaxDegree = 10;

/// Truncated polynomial in one variable, coefficients c[0..kMaxDegree].
struct Poly {
    Eigen::Matrix<double, kMaxDegree + 1, 1> c = Eigen::Matrix<double, kMaxDegree + 1, 1>::Zero();

    static Poly constant(double v) {
        Poly p;
        p.c[0] = v;
        return p;
    }
    static Poly variable(double scale = 1.0) {
        Poly p;
        p.c[1] = scale;
        return p;
    }
    double operator()(double t) const {
        double acc = 0.0;
        for (int k = kMaxDegree; k >= 0; --k) acc = acc * t + c[k];
        return acc;
    }
};

inline Poly operator+(const Poly& a, const Poly& b) {
    Poly out;
    out.c = a.c + b.c;
    return out;
}
inline Poly operator-(const Poly& a, const Poly& b) {
    Poly out;
    out.c = a.c - b.c;
    return out;
}
inline Poly operator*(double s, const Poly& a) {
    Poly out;
    out.c = s * a.c;
    return out;
}
inline Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (int i = 0; i <= kMaxDegree; ++i)
        for (int j = 0; i + j <= kMaxDegree; ++j) out.c[i + j] += a.c[i] * b.c[j];
    return out;
}

/// g(p) for scalar coefficient vector g, truncated composition (Horner).
inline Poly compose(const Eigen::VectorXd& g, const Poly& p) {
    Poly out;
    for (int k = static_cast<int>(g.size()) - 1; k >= 0; --k) {
        out = out * p;
        out.c[0] += g[k];
    }
    return out;
}

using PolyMap = std::function<std::vector<Poly>(const std::vector<Poly>&)>;

/// Manifold curve through the fixed point, parameterized by the neutral
/// eigencoordinate t: original-coordinate coefficient vectors a[k] with
/// x(t) = sum_k a[k] t^k.
struct ManifoldSeries {
    std::vector<Eigen::VectorXd> coeffs; ///< index k = 0..degree
    Eigen::VectorXd center_direction;    ///< a[1], the neutral eigenvector
    int center_slot = 0;                 ///< eigencoordinate index
    Eigen::MatrixXd basis;               ///< eigenvector matrix V
    Eigen::VectorXd eigenvalues;

    Eigen::VectorXd value(double t) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(coeffs.front().size());
        for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
            out = out * t + coeffs[static_cast<std::size_t>(k)];
        return out;
    }
};

/// Solve the invariance equation for the graph over the neutral direction
/// up to the requested degree. The map must be polynomial with fixed point
/// zero and a diagonalizable differential with real, distinct eigenvalues,
/// exactly one of them equal to one.
inline ManifoldSeries solve_series(int dimension, const PolyMap& map, int degree) {
    // Linear part column by column from the order-one coefficients.
    Eigen::MatrixXd l(dimension, dimension);
    for (int j = 0; j < dimension; ++j) {
        std::vector<Poly> curve(static_cast<std::size_t>(dimension));
        curve[static_cast<std::size_t>(j)] = Poly::variable();
        const std::vector<Poly> image = map(curve);
        for (int i = 0; i < dimension; ++i) l(i, j) = image[static_cast<std::size_t>(i)].c[1];
    }

    Eigen::EigenSolver<Eigen::MatrixXd> eigen(l);
    Eigen::VectorXd lambda(dimension);
    Eigen::MatrixXd v(dimension, dimension);
    for (int i = 0; i < dimension; ++i) {
        if (std::abs(eigen.eigenvalues()[i].imag()) > 1e-12)
            throw std::runtime_error("series oracle needs real eigenvalues");
        lambda[i] = eigen.eigenvalues()[i].real();
        v.col(i) = eigen.eigenvectors().col(i).real();
    }
    int center = 0;
    for (int i = 1; i < dimension; ++i)
        if (std::abs(lambda[i] - 1.0) < std::abs(lambda[center] - 1.0)) center = i;
    if (std::abs(lambda[center] - 1.0) > 1e-12)
        throw std::runtime_error("series oracle needs a unit eigenvalue");

    const Eigen::MatrixXd v_inverse = v.inverse();

    // Eigencoordinate graph coefficients b[k][i], with b[k][center] = 0 and
    // b[1] the unit vector in the center slot.
    std::vector<Eigen::VectorXd> b(static_cast<std::size_t>(degree) + 1,
                                   Eigen::VectorXd::Zero(dimension));
    b[1][center] = 1.0;

    for (int k = 2; k <= degree; ++k) {
        // Current curve in original coordinates as polynomials.
        std::vector<Poly> curve(static_cast<std::size_t>(dimension));
        for (int i = 0; i < dimension; ++i) {
            Poly p;
            for (int m = 1; m < k; ++m) {
                Eigen::VectorXd orig = v * b[static_cast<std::size_t>(m)];
                p.c[m] = orig[i];
            }
            curve[static_cast<std::size_t>(i)] = p;
        }
        const std::vector<Poly> image = map(curve);

        // Eigencoordinates of the image.
        std::vector<Poly> y(static_cast<std::size_t>(dimension));
        for (int i = 0; i < dimension; ++i) {
            Poly p;
            for (int j = 0; j < dimension; ++j) p = p + v_inverse(i, j) * image[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = p;
        }

        for (int i = 0; i < dimension; ++i) {
            if (i == center) continue;
            Eigen::VectorXd g(k);
            for (int m = 0; m < k; ++m) g[m] = b[static_cast<std::size_t>(m)][i];
            const Poly graph = compose(g, y[static_cast<std::size_t>(center)]);
            const double residual = y[static_cast<std::size_t>(i)].c[k] - graph.c[k];
            b[static_cast<std::size_t>(k)][i] = residual / (1.0 - lambda[i]);
        }
    }

    ManifoldSeries series;
    series.center_slot = center;
    series.basis = v;
    series.eigenvalues = lambda;
    series.center_direction = v.col(center);
    series.coeffs.assign(static_cast<std::size_t>(degree) + 1, Eigen::VectorXd::Zero(dimension));
    for (int k = 1; k <= degree; ++k)
        series.coeffs[static_cast<std::size_t>(k)] = v * b[static_cast<std::size_t>(k)];
    return series;
}

/// The benchmark maps restated on polynomials (kept independent of the
/// library's catalog on purpose).
inline PolyMap det2d_map() {
    return [](const std::vector<Poly>& x) {
        return std::vector<Poly>{x[0] + x[0] * x[1], 0.5 * x[1] + x[0] * x[0]};
    };
}

inline PolyMap det3d_map() {
    return [](const std::vector<Poly>& x) {
        return std::vector<Poly>{2.0 * x[0] + x[1] * x[1], x[1] + x[1] * x[2],
                                 0.5 * x[2] + x[1] * x[1]};
    };
}

inline PolyMap delay_map(double quad) {
    return [quad](const std::vector<Poly>& x) {
        return std::vector<Poly>{1.5 * x[0] - 0.5 * x[1] + quad * x[0] * x[0], x[0]};
    };
}

} // namespace oracle
