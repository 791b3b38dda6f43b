#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "exen/error.hpp"

namespace exen::linalg {

/// Eigendecomposition of a dense real symmetric matrix, eigenvalues sorted
/// descending with matching eigenvectors (unit columns).
struct SymmetricEigen {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};

/// Cyclic Jacobi on a row-major symmetric matrix. Deterministic: fixed
/// sweep order, fixed rotation formulas, converges for any symmetric input.
inline SymmetricEigen jacobi_symmetric_eigen(std::vector<double> a, std::size_t n) {
    if (a.size() != n * n) throw InvalidInputError("jacobi: matrix size mismatch");

    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    double norm = 0.0;
    for (double x : a) norm += x * x;
    norm = std::sqrt(norm);
    const double tol = (norm > 0.0 ? norm : 1.0) * 1e-15;

    const int max_sweeps = 100;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a[p * n + q] * a[p * n + q];
        if (std::sqrt(off) <= tol) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a[r * n + p];
                    const double arq = a[r * n + q];
                    a[r * n + p] = c * arp - s * arq;
                    a[p * n + r] = a[r * n + p];
                    a[r * n + q] = s * arp + c * arq;
                    a[q * n + r] = a[r * n + q];
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v[r * n + p];
                    const double vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - s * vrq;
                    v[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
    }
    if (sweep == max_sweeps) throw NumericError("jacobi: eigensolver did not converge");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i + 1 < n; ++i) { // stable selection sort, descending
        std::size_t best = i;
        for (std::size_t j = i + 1; j < n; ++j)
            if (a[order[j] * n + order[j]] > a[order[best] * n + order[best]]) best = j;
        std::swap(order[i], order[best]);
    }

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = order[i];
        out.values[i] = a[c * n + c];
        for (std::size_t r = 0; r < n; ++r) out.vectors[i][r] = v[r * n + c];
    }
    return out;
}

/// Leading eigenpair of a k x k complex Hermitian matrix plus the next
/// eigenvalue below it, for eigengap checks.
struct HermitianLeading {
    double value = 0.0;
    double second = 0.0;
    std::vector<std::complex<double>> vector;
};

/// Solves via the standard realification: M = A + iB maps to the symmetric
/// 2k x 2k matrix [[A, -B], [B, A]], whose spectrum is that of M with every
/// eigenvalue doubled. Any real eigenvector (u; w) of the top eigenvalue
/// recovers a complex eigenvector as u + iw.
inline HermitianLeading leading_hermitian_eigenpair(const std::vector<std::complex<double>>& m,
                                                    std::size_t k) {
    if (k == 0 || m.size() != k * k) throw InvalidInputError("hermitian eigen: size mismatch");
    const std::size_t n = 2 * k;
    std::vector<double> s(n * n, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double re = m[i * k + j].real();
            const double im = m[i * k + j].imag();
            s[i * n + j] = re;
            s[(k + i) * n + (k + j)] = re;
            s[i * n + (k + j)] = -im;
            s[(k + i) * n + j] = im;
        }
    }
    SymmetricEigen eig = jacobi_symmetric_eigen(std::move(s), n);

    HermitianLeading out;
    out.value = eig.values[0];
    out.second = n > 2 ? eig.values[2] : eig.values[n - 1];
    out.vector.resize(k);
    const std::vector<double>& lead = eig.vectors[0];
    double norm2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        out.vector[i] = {lead[i], lead[k + i]};
        norm2 += std::norm(out.vector[i]);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& z : out.vector) z *= inv;
    return out;
}

} // namespace exen::linalg
