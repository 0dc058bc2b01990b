#include "manet/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace manet {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kSqrt2 = 1.4142135623730951;
}  // namespace

double RadioParams::wavelength_m() const { return kSpeedOfLight / carrier_freq_hz; }

void RadioParams::validate() const {
    if (!(tx_power > rx_threshold))
        throw std::invalid_argument("RadioParams: tx_power must exceed rx_threshold");
    if (shadow_sigma_db < 0.0)
        throw std::invalid_argument("RadioParams: shadow_sigma_db must be >= 0");
    if (!(ref_distance_m > 0.0))
        throw std::invalid_argument("RadioParams: ref_distance_m must be positive");
    if (!(path_loss_exponent > 0.0))
        throw std::invalid_argument("RadioParams: path_loss_exponent must be positive");
    if (!(carrier_freq_hz > 0.0))
        throw std::invalid_argument("RadioParams: carrier_freq_hz must be positive");
    if (carrier_sense_threshold > rx_threshold)
        throw std::invalid_argument("RadioParams: carrier_sense_threshold must be <= rx_threshold");
    if (!(tx_gain > 0.0) || !(rx_gain > 0.0))
        throw std::invalid_argument("RadioParams: antenna gains must be positive");
    if (!(tx_height_m > 0.0) || !(rx_height_m > 0.0))
        throw std::invalid_argument("RadioParams: antenna heights must be positive");
}

double ref_path_loss_db(const RadioParams& params) {
    double ratio = 4.0 * M_PI * params.ref_distance_m / params.wavelength_m();
    return 20.0 * std::log10(ratio);
}

double mean_path_loss_db(const RadioParams& params, double d_m) {
    if (d_m < params.ref_distance_m)
        throw std::domain_error("mean_path_loss_db: model invalid inside reference distance");
    return ref_path_loss_db(params) +
           10.0 * params.path_loss_exponent * std::log10(d_m / params.ref_distance_m);
}

PowerDbm sample_received_power(const RadioParams& params, double d_m, Rng& rng) {
    double loss = mean_path_loss_db(params, d_m);
    if (params.shadow_sigma_db > 0.0) loss += rng.gaussian(0.0, params.shadow_sigma_db);
    return PowerDbm{params.tx_power.value - loss};
}

double path_loss_pdf(const RadioParams& params, double d_m, double x_db) {
    double sigma = params.shadow_sigma_db;
    if (!(sigma > 0.0))
        throw std::domain_error("path_loss_pdf: density undefined for sigma = 0");
    double mean = mean_path_loss_db(params, d_m);
    double z = (x_db - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

double prob_above_threshold(const RadioParams& params, double d_m) {
    double margin = params.tx_power.value - mean_path_loss_db(params, d_m) -
                    params.rx_threshold.value;
    double sigma = params.shadow_sigma_db;
    if (!(sigma > 0.0)) return margin > 0.0 ? 1.0 : 0.0;
    // 1/2 - 1/2 erf((Pth - (Pt - PL)) / (sigma sqrt 2)), written with erfc
    // for accuracy in the tails.
    return 0.5 * std::erfc(-margin / (sigma * kSqrt2));
}

PowerDbm received_power_tworay(const RadioParams& params, double d_m) {
    if (!(d_m > 0.0)) throw std::domain_error("received_power_tworay: distance must be positive");
    double pt_w = to_watts(params.tx_power).value;
    double h2 = params.tx_height_m * params.tx_height_m * params.rx_height_m * params.rx_height_m;
    double pr_w = pt_w * params.tx_gain * params.rx_gain * h2 / (d_m * d_m * d_m * d_m);
    return to_dbm(PowerWatts{pr_w});
}

double tworay_range(const RadioParams& params) {
    double pt_w = to_watts(params.tx_power).value;
    double pth_w = to_watts(params.rx_threshold).value;
    double h2 = params.tx_height_m * params.tx_height_m * params.rx_height_m * params.rx_height_m;
    return std::pow(pt_w * params.tx_gain * params.rx_gain * h2 / pth_w, 0.25);
}

double predicted_delivery_ratio(const RadioParams& params, const RectRegion& region, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("predicted_delivery_ratio: k must be positive");
    double d = mean_link_distance(region).mean_distance;
    double p = k * prob_above_threshold(params, std::max(d, params.ref_distance_m));
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace manet
