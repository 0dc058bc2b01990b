#pragma once

#include "manet/analytics.hpp"
#include "manet/rng.hpp"
#include "manet/units.hpp"

namespace manet {

/// Physical-layer parameter set. Defaults describe a 914 MHz DSSS radio
/// with unity gains and 1 m antennas; reception threshold -64.38 dBm.
struct RadioParams {
    PowerDbm tx_power{24.50};                   // Pt
    PowerDbm rx_threshold{-64.38};              // minimum decodable level
    PowerDbm carrier_sense_threshold{-78.0};    // minimum detectable level
    double tx_gain = 1.0;
    double rx_gain = 1.0;
    double tx_height_m = 1.0;
    double rx_height_m = 1.0;
    double shadow_sigma_db = 3.0;               // log-normal shadowing deviation
    double ref_distance_m = 1.0;                // close-in reference d0
    double path_loss_exponent = 3.0;
    double carrier_freq_hz = 914e6;

    double wavelength_m() const;
    void validate() const;
};

/// Free-space loss at the reference distance d0, in dB.
double ref_path_loss_db(const RadioParams& params);

/// Distance-dependent mean of the log-distance path loss model, in dB.
/// Valid for d >= d0.
double mean_path_loss_db(const RadioParams& params, double d_m);

/// One received-power draw at distance d under log-normal shadowing:
/// Pt - (mean path loss + X), X ~ Normal(0, sigma^2) in dB.
PowerDbm sample_received_power(const RadioParams& params, double d_m, Rng& rng);

/// Gaussian density of the shadowed path loss at x dB, distance d.
/// Requires sigma > 0.
double path_loss_pdf(const RadioParams& params, double d_m, double x_db);

/// Probability that the shadowed received power at distance d exceeds the
/// reception threshold. With sigma = 0 this degenerates to a step function
/// on the deterministic margin.
double prob_above_threshold(const RadioParams& params, double d_m);

/// Two-ray ground reflection received power, Pt*Gt*Gr*ht^2*hr^2/d^4,
/// computed in watts and returned in dBm. Applied as a pure fourth-power
/// law at all distances.
PowerDbm received_power_tworay(const RadioParams& params, double d_m);

/// The unique distance where the two-ray received power equals the
/// reception threshold; closed-form fourth root.
double tworay_range(const RadioParams& params);

/// Threshold-exceedance probability evaluated at the region's mean link
/// distance, scaled by k and clamped to [0, 1].
double predicted_delivery_ratio(const RadioParams& params, const RectRegion& region, double k);

}  // namespace manet
