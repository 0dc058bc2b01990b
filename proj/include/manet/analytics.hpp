#pragma once

#include <cstdint>
#include <vector>

namespace manet {

/// Rectangular service area. The constructor normalizes orientation so that
/// width_d1 <= length_d2, giving a shape parameter zeta = D1/D2 in (0, 1].
struct RectRegion {
    double width_d1;
    double length_d2;

    RectRegion(double a_m, double b_m);

    double zeta() const { return width_d1 / length_d2; }
    double area() const { return width_d1 * length_d2; }
    double max_distance() const;
};

struct LinkDistanceStats {
    double mean_xi;          // mean link distance normalized by D1
    double mean_distance;    // meters
    double max_distance;     // meters, the region diagonal
};

/// Density of the normalized distance xi = d/D1 between two independent
/// uniformly placed points in the region. Zero outside [0, sqrt(1+zeta^-2)).
double link_distance_pdf(const RectRegion& region, double xi);

/// Mean link distance by quadrature of xi * pdf(xi) over the support,
/// split at the two interior branch boundaries of the density.
LinkDistanceStats mean_link_distance(const RectRegion& region);

/// Monte Carlo oracle: n_pairs independent point pairs, returning their
/// Euclidean distances in meters. Deterministic for a fixed seed.
std::vector<double> sample_link_distances(const RectRegion& region, uint64_t n_pairs,
                                          uint64_t seed);

/// Expected hop count for a packet crossing the mean link distance with
/// radio range range_r: ceil(mean / range), at least 1.
int hop_estimate(const RectRegion& region, double range_r);

}  // namespace manet
