#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "exen/error.hpp"
#include "exen/rng.hpp"
#include "exen/shape.hpp"

namespace exen {

enum class ContourKind { circle, square };

inline std::string to_string(ContourKind kind) {
    return kind == ContourKind::circle ? "circle" : "square";
}

/// Deterministic landmark template on a reference contour.
struct ContourTemplate {
    ContourKind kind;
    std::size_t k;
    KAd points;
};

/// k landmarks equally spaced by angle on the unit circle, starting at
/// angle 0: point i = (cos(2 pi i / k), sin(2 pi i / k)).
inline ContourTemplate circle_template(std::size_t k) {
    if (k < 3) throw InvalidInputError("circle template needs k >= 3");
    ComplexVector pts(k);
    const double step = 2.0 * 3.141592653589793238462643383279502884 / static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double a = step * static_cast<double>(i);
        pts[i] = {std::cos(a), std::sin(a)};
    }
    return {ContourKind::circle, k, KAd(std::move(pts))};
}

/// k landmarks equally spaced by arc length along the axis-aligned square
/// with corners (+-1, +-1), starting at (1, 1) and walking counterclockwise.
/// Perimeter is 8; landmark i sits at arc position 8 i / k.
inline ContourTemplate square_template(std::size_t k) {
    if (k < 4) throw InvalidInputError("square template needs k >= 4");
    ComplexVector pts(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double s = 8.0 * static_cast<double>(i) / static_cast<double>(k);
        if (s < 2.0)
            pts[i] = {1.0 - s, 1.0}; // top edge, right to left
        else if (s < 4.0)
            pts[i] = {-1.0, 3.0 - s}; // left edge, down
        else if (s < 6.0)
            pts[i] = {s - 5.0, -1.0}; // bottom edge, left to right
        else
            pts[i] = {1.0, s - 7.0}; // right edge, up
    }
    return {ContourKind::square, k, KAd(std::move(pts))};
}

inline ContourTemplate make_template(ContourKind kind, std::size_t k) {
    return kind == ContourKind::circle ? circle_template(k) : square_template(k);
}

/// n independent k-ads: template landmarks plus i.i.d. N(0, sigma^2) noise
/// on each coordinate. Observation o draws from rng::derive(stream_seed, o),
/// so generation order (or parallel generation) cannot change the sample.
inline std::vector<KAd> perturb_sample(const ContourTemplate& tpl, double sigma, std::size_t n,
                                       std::uint64_t stream_seed) {
    if (sigma < 0.0) throw InvalidInputError("noise scale must be nonnegative");
    if (n == 0) throw InvalidInputError("sample size must be at least 1");
    std::vector<KAd> out;
    out.reserve(n);
    const ComplexVector& base = tpl.points.landmarks();
    for (std::size_t o = 0; o < n; ++o) {
        rng::Stream stream = rng::Stream::substream(stream_seed, o);
        ComplexVector pts(tpl.k);
        for (std::size_t j = 0; j < tpl.k; ++j) {
            const double dx = sigma == 0.0 ? 0.0 : sigma * stream.normal();
            const double dy = sigma == 0.0 ? 0.0 : sigma * stream.normal();
            pts[j] = {base[j].real() + dx, base[j].imag() + dy};
        }
        out.emplace_back(std::move(pts));
    }
    return out;
}

/// Preshapes of a perturbed template sample; the common case for feeding
/// the two-sample test.
inline std::vector<Preshape> perturbed_preshapes(const ContourTemplate& tpl, double sigma,
                                                 std::size_t n, std::uint64_t stream_seed) {
    std::vector<Preshape> out;
    out.reserve(n);
    for (const KAd& kad : perturb_sample(tpl, sigma, n, stream_seed)) out.push_back(preshape(kad));
    return out;
}

} // namespace exen
