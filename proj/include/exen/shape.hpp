#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "exen/error.hpp"
#include "exen/linalg.hpp"

namespace exen {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// An ordered configuration of k >= 3 labeled planar landmarks, one complex
/// number per landmark.
class KAd {
public:
    explicit KAd(ComplexVector landmarks) : z_(std::move(landmarks)) {
        if (z_.size() < 3) throw InvalidInputError("k-ad needs at least 3 landmarks");
        for (const Complex& c : z_)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw InvalidInputError("k-ad has non-finite landmark coordinates");
    }

    std::size_t k() const noexcept { return z_.size(); }
    const ComplexVector& landmarks() const noexcept { return z_; }
    const Complex& operator[](std::size_t i) const { return z_[i]; }

private:
    ComplexVector z_;
};

/// A centered, unit-norm complex landmark vector: the representative of a
/// Kendall shape, with rotation left as a free phase.
class Preshape {
public:
    /// Validates: k >= 3, finite, sum of coordinates within 1e-12 of zero,
    /// norm within 1e-12 of one.
    explicit Preshape(ComplexVector z) : z_(std::move(z)) {
        if (z_.size() < 3) throw InvalidInputError("preshape needs at least 3 coordinates");
        Complex sum{0.0, 0.0};
        double norm2 = 0.0;
        for (const Complex& c : z_) {
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw InvalidInputError("preshape has non-finite coordinates");
            sum += c;
            norm2 += std::norm(c);
        }
        if (std::abs(sum) > 1e-12) throw InvalidInputError("preshape is not centered");
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
            throw InvalidInputError("preshape does not have unit norm");
    }

    std::size_t k() const noexcept { return z_.size(); }
    const ComplexVector& coords() const noexcept { return z_; }
    const Complex& operator[](std::size_t i) const { return z_[i]; }

private:
    ComplexVector z_;
};

inline std::size_t point_dimension(const Preshape& p) { return p.k(); }
inline bool point_is_finite(const Preshape&) { return true; } // guaranteed on construction

/// Removes translation and scale from a k-ad: z = (w - mean(w)) / ||w - mean(w)||.
/// The k coordinates stay constrained to the hyperplane sum(z) = 0.
inline Preshape preshape(const KAd& kad) {
    const ComplexVector& w = kad.landmarks();
    const std::size_t k = w.size();
    Complex mean{0.0, 0.0};
    for (const Complex& c : w) mean += c;
    mean /= static_cast<double>(k);

    ComplexVector z(k);
    double norm2 = 0.0;
    double scale2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        z[i] = w[i] - mean;
        norm2 += std::norm(z[i]);
        scale2 += std::norm(w[i]);
    }
    const double norm = std::sqrt(norm2);
    if (norm <= 1e-12 * std::sqrt(scale2) || norm == 0.0)
        throw DegenerateConfigurationError("all landmarks coincide; shape is undefined");
    for (Complex& c : z) c /= norm;

    // Kill the centering residue left by the two floating divisions.
    Complex res{0.0, 0.0};
    for (const Complex& c : z) res += c;
    res /= static_cast<double>(k);
    for (Complex& c : z) c -= res;
    return Preshape(std::move(z));
}

/// Rank-1 Hermitian projector zz* representing an embedded shape.
/// Invariants: Hermitian, unit trace, idempotent.
class VWPoint {
public:
    /// Checked construction from a raw row-major k x k matrix.
    static VWPoint from_matrix(std::vector<Complex> m, std::size_t k) {
        if (k == 0 || m.size() != k * k) throw InvalidInputError("projector: size mismatch");
        double trace = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            trace += m[i * k + i].real();
            if (std::abs(m[i * k + i].imag()) > 1e-12)
                throw InvalidInputError("projector: diagonal not real");
            for (std::size_t j = i + 1; j < k; ++j)
                if (std::abs(m[i * k + j] - std::conj(m[j * k + i])) > 1e-12)
                    throw InvalidInputError("projector: not Hermitian");
        }
        if (std::abs(trace - 1.0) > 1e-12) throw InvalidInputError("projector: trace is not 1");
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                Complex acc{0.0, 0.0};
                for (std::size_t l = 0; l < k; ++l) acc += m[i * k + l] * m[l * k + j];
                if (std::abs(acc - m[i * k + j]) > 1e-10)
                    throw InvalidInputError("projector: not idempotent");
            }
        return VWPoint(std::move(m), k);
    }

    std::size_t dim() const noexcept { return k_; }
    Complex entry(std::size_t i, std::size_t j) const { return m_[i * k_ + j]; }
    const std::vector<Complex>& matrix() const noexcept { return m_; }

private:
    friend VWPoint vw_embed_unit(const ComplexVector&);
    VWPoint(std::vector<Complex> m, std::size_t k) : m_(std::move(m)), k_(k) {}

    std::vector<Complex> m_;
    std::size_t k_;
};

inline std::size_t point_dimension(const VWPoint& p) { return p.dim(); }
inline bool point_is_finite(const VWPoint&) { return true; }

/// Embeds any unit-norm complex vector as the projector zz*. The phase of z
/// cancels, so all rotations of one shape map to the same matrix.
inline VWPoint vw_embed_unit(const ComplexVector& z) {
    const std::size_t k = z.size();
    if (k == 0) throw InvalidInputError("embed: empty vector");
    double norm2 = 0.0;
    for (const Complex& c : z) norm2 += std::norm(c);
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
        throw InvalidInputError("embed: vector does not have unit norm");
    std::vector<Complex> m(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m[i * k + j] = z[i] * std::conj(z[j]);
    return VWPoint(std::move(m), k);
}

inline VWPoint vw_embed(const Preshape& p) { return vw_embed_unit(p.coords()); }

inline double frobenius_distance(const VWPoint& a, const VWPoint& b) {
    if (a.dim() != b.dim()) throw InvalidInputError("frobenius distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.matrix().size(); ++i) s += std::norm(a.matrix()[i] - b.matrix()[i]);
    return std::sqrt(s);
}

namespace detail {

// 1 - |<q, p>|^2 evaluated as the squared norm of the residual p - <q,p> q.
// Equivalent for unit vectors, but free of the cancellation that makes the
// direct form lose half its digits when p and q nearly coincide.
inline double chord_residual2(const Preshape& p, const Preshape& q) {
    if (p.k() != q.k()) throw InvalidInputError("chord distance: preshapes of different size");
    Complex alpha{0.0, 0.0};
    for (std::size_t i = 0; i < p.k(); ++i) alpha += std::conj(q[i]) * p[i];
    double s = 0.0;
    for (std::size_t i = 0; i < p.k(); ++i) s += std::norm(p[i] - alpha * q[i]);
    return s;
}

} // namespace detail

/// Chord distance between shapes through the projector embedding:
/// ||pp* - qq*||_F = sqrt(2 (1 - |<p,q>|^2)), computed in O(k) and clamped
/// to [0, sqrt(2)].
inline double vw_chord_distance(const Preshape& p, const Preshape& q) {
    const double d = std::sqrt(2.0 * detail::chord_residual2(p, q));
    return d < 1.4142135623730951 ? d : 1.4142135623730951;
}

/// Squared chord convention: 2 (1 - |<p,q>|^2), clamped to [0, 2].
inline double vw_chord_distance_squared(const Preshape& p, const Preshape& q) {
    const double d = 2.0 * detail::chord_residual2(p, q);
    return d < 2.0 ? d : 2.0;
}

struct ChordDistance {
    double operator()(const Preshape& p, const Preshape& q) const { return vw_chord_distance(p, q); }
};

struct SquaredChordDistance {
    double operator()(const Preshape& p, const Preshape& q) const {
        return vw_chord_distance_squared(p, q);
    }
};

struct FrobeniusDistance {
    double operator()(const VWPoint& a, const VWPoint& b) const { return frobenius_distance(a, b); }
};

/// Multiplies by a unit phase so the first entry of largest modulus becomes
/// real and positive. Deterministic representative of the shape's phase orbit.
inline ComplexVector canonicalize_phase(ComplexVector z) {
    std::size_t lead = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double a = std::abs(z[i]);
        if (a > best) {
            best = a;
            lead = i;
        }
    }
    if (best <= 0.0) return z;
    const Complex phase = std::conj(z[lead]) / best;
    for (Complex& c : z) c *= phase;
    z[lead] = Complex{std::abs(z[lead]), 0.0};
    return z;
}

/// Extrinsic mean shape: the unit leading eigenvector of the averaged
/// projector (1/n) sum zz*, re-centered and phase-canonicalized.
/// Throws NonUniqueMeanError if the eigengap is below 1e-8.
inline Preshape vw_extrinsic_mean(std::span<const Preshape> sample) {
    if (sample.empty()) throw InvalidInputError("extrinsic mean of an empty sample");
    const std::size_t k = sample.front().k();
    for (const Preshape& p : sample)
        if (p.k() != k) throw InvalidInputError("extrinsic mean: preshapes of different size");

    std::vector<Complex> mean(k * k, Complex{0.0, 0.0});
    for (const Preshape& p : sample)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) mean[i * k + j] += p[i] * std::conj(p[j]);
    const double inv_n = 1.0 / static_cast<double>(sample.size());
    for (Complex& c : mean) c *= inv_n;

    linalg::HermitianLeading eig = linalg::leading_hermitian_eigenpair(mean, k);
    if (eig.value - eig.second < 1e-8)
        throw NonUniqueMeanError("extrinsic mean is not unique: leading eigenvalue gap below 1e-8");

    ComplexVector z = std::move(eig.vector);
    Complex centroid{0.0, 0.0};
    for (const Complex& c : z) centroid += c;
    centroid /= static_cast<double>(k);
    double norm2 = 0.0;
    for (Complex& c : z) {
        c -= centroid;
        norm2 += std::norm(c);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (Complex& c : z) c *= inv;
    return Preshape(canonicalize_phase(std::move(z)));
}

inline Preshape vw_extrinsic_mean(const std::vector<Preshape>& sample) {
    return vw_extrinsic_mean(std::span<const Preshape>(sample));
}

/// Preshape coordinates flattened to 2k reals (re, im per landmark), for
/// running plain Euclidean metrics over shape data.
inline std::vector<double> flatten(const Preshape& p) {
    std::vector<double> v;
    v.reserve(2 * p.k());
    for (const Complex& c : p.coords()) {
        v.push_back(c.real());
        v.push_back(c.imag());
    }
    return v;
}

} // namespace exen
