#include "manet/analytics.hpp"

#include <cmath>
#include <stdexcept>

#include "manet/quadrature.hpp"
#include "manet/rng.hpp"

namespace manet {

RectRegion::RectRegion(double a_m, double b_m) {
    if (!(a_m > 0.0) || !(b_m > 0.0))
        throw std::invalid_argument("RectRegion: dimensions must be positive");
    width_d1 = std::min(a_m, b_m);
    length_d2 = std::max(a_m, b_m);
}

double RectRegion::max_distance() const {
    return std::hypot(width_d1, length_d2);
}

// Density of the normalized pair distance in a D1 x D2 rectangle
// (zeta = D1/D2 <= 1). Derived by integrating the product of the two
// triangular coordinate-difference densities over the circle of radius xi;
// the three branches correspond to the arc being clipped by neither, one,
// or both rectangle sides. Continuous at both interior boundaries.
double link_distance_pdf(const RectRegion& region, double xi) {
    double z = region.zeta();
    if (xi < 0.0) return 0.0;
    if (xi < 1.0) {
        return z * xi * (2.0 * z * xi * xi - 4.0 * xi * (1.0 + z) + 2.0 * M_PI);
    }
    double inv_z = 1.0 / z;
    if (xi < inv_z) {
        double root = std::sqrt(xi * xi - 1.0);
        return 4.0 * z * xi * root - 2.0 * z * xi * (2.0 * xi + z) +
               4.0 * z * xi * std::asin(1.0 / xi);
    }
    double upper = std::sqrt(1.0 + inv_z * inv_z);
    if (xi < upper) {
        double root1 = std::sqrt(xi * xi - 1.0);
        double root2 = std::sqrt(std::max(0.0, xi * xi - inv_z * inv_z));
        return 4.0 * z * xi * root1 + 4.0 * z * z * xi * root2 -
               2.0 * xi * (z * z * xi * xi + 1.0 + z * z) +
               4.0 * z * xi * (std::asin(1.0 / xi) - std::acos(std::min(1.0, 1.0 / (z * xi))));
    }
    return 0.0;
}

LinkDistanceStats mean_link_distance(const RectRegion& region) {
    double z = region.zeta();
    double upper = std::sqrt(1.0 + 1.0 / (z * z));
    auto integrand = [&](double xi) { return xi * link_distance_pdf(region, xi); };
    double mean_xi = integrate_piecewise(integrand, 0.0, upper, {1.0, 1.0 / z}, 1e-8);
    return LinkDistanceStats{mean_xi, mean_xi * region.width_d1, region.max_distance()};
}

std::vector<double> sample_link_distances(const RectRegion& region, uint64_t n_pairs,
                                          uint64_t seed) {
    if (n_pairs < 1) throw std::invalid_argument("sample_link_distances: n_pairs must be >= 1");
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n_pairs);
    double w = region.width_d1, l = region.length_d2;
    for (uint64_t i = 0; i < n_pairs; ++i) {
        double ax = rng.uniform01() * w, ay = rng.uniform01() * l;
        double bx = rng.uniform01() * w, by = rng.uniform01() * l;
        out.push_back(std::hypot(ax - bx, ay - by));
    }
    return out;
}

int hop_estimate(const RectRegion& region, double range_r) {
    if (!(range_r > 0.0)) throw std::invalid_argument("hop_estimate: range must be positive");
    double mean = mean_link_distance(region).mean_distance;
    int hops = static_cast<int>(std::ceil(mean / range_r));
    return hops < 1 ? 1 : hops;
}

}  // namespace manet
