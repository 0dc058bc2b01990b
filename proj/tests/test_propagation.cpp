#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "manet/propagation.hpp"
#include "manet/quadrature.hpp"
#include "manet/rng.hpp"
#include "manet/units.hpp"

using namespace manet;

TEST_CASE("dBm and watts convert both ways") {
    CHECK(to_watts(PowerDbm{24.50}).value == doctest::Approx(0.28184).epsilon(1e-4 / 0.28184));
    CHECK(to_watts(PowerDbm{27.67}).value == doctest::Approx(0.58432).epsilon(1e-3 / 0.58432));
    CHECK(to_watts(PowerDbm{0.0}).value == 0.001);
    CHECK_THROWS_AS(watts_to_dbm(0.0), std::domain_error);
    CHECK_THROWS_AS(watts_to_dbm(-1.0), std::domain_error);

    Rng rng(17);
    for (int i = 0; i < 2000; ++i) {
        double p = rng.uniform(-120.0, 40.0);
        double back = to_dbm(to_watts(PowerDbm{p})).value;
        CHECK(std::fabs(back - p) <= 1e-12 * std::max(1.0, std::fabs(p)));
    }
}

TEST_CASE("reference path loss") {
    RadioParams radio;
    CHECK(ref_path_loss_db(radio) == doctest::Approx(31.66).epsilon(0.05 / 31.66));

    RadioParams unit = radio;
    unit.ref_distance_m = radio.wavelength_m() / (4.0 * M_PI);
    CHECK(ref_path_loss_db(unit) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    RadioParams twice = radio;
    twice.ref_distance_m = 2.0;
    CHECK(ref_path_loss_db(twice) - ref_path_loss_db(radio) ==
          doctest::Approx(20.0 * std::log10(2.0)));
}

TEST_CASE("mean path loss anchors and slope") {
    RadioParams radio;
    CHECK(mean_path_loss_db(radio, 4.0) == doctest::Approx(50.0).epsilon(1.0 / 50.0));
    CHECK(mean_path_loss_db(radio, 40.0) == doctest::Approx(80.0).epsilon(1.0 / 80.0));
    CHECK(mean_path_loss_db(radio, 80.0) == doctest::Approx(88.0).epsilon(1.0 / 88.0));
    CHECK(mean_path_loss_db(radio, 186.0) == doctest::Approx(100.0).epsilon(1.0 / 100.0));
    CHECK(mean_path_loss_db(radio, radio.ref_distance_m) == ref_path_loss_db(radio));
    CHECK_THROWS_AS(mean_path_loss_db(radio, 0.5), std::domain_error);

    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        double d = rng.uniform(1.0, 400.0);
        double decade = mean_path_loss_db(radio, 10.0 * d) - mean_path_loss_db(radio, d);
        CHECK(decade == doctest::Approx(10.0 * radio.path_loss_exponent).epsilon(1e-12));
    }
}

TEST_CASE("shadowed samples: deterministic degenerate case and sample mean") {
    RadioParams radio;
    radio.shadow_sigma_db = 0.0;
    Rng rng(1);
    for (double d : {1.0, 10.0, 80.0, 200.0}) {
        double expected = radio.tx_power.value - mean_path_loss_db(radio, d);
        CHECK(sample_received_power(radio, d, rng).value == expected);
    }
    CHECK_THROWS_AS(sample_received_power(radio, 0.1, rng), std::domain_error);

    RadioParams shadowed;  // sigma 3 dB
    Rng rng2(99);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += sample_received_power(shadowed, 80.0, rng2).value;
    double expected = shadowed.tx_power.value - mean_path_loss_db(shadowed, 80.0);
    CHECK(sum / n == doctest::Approx(expected).scale(1.0).epsilon(0.05));
}

TEST_CASE("path loss pdf: peak, symmetry, normalization") {
    RadioParams radio;
    double mean = mean_path_loss_db(radio, 40.0);
    double sigma = radio.shadow_sigma_db;
    CHECK(path_loss_pdf(radio, 40.0, mean) ==
          doctest::Approx(1.0 / (sigma * std::sqrt(2.0 * M_PI))));
    for (double delta : {0.3, 1.1, 2.9, 7.7}) {
        CHECK(path_loss_pdf(radio, 40.0, mean + delta) ==
              doctest::Approx(path_loss_pdf(radio, 40.0, mean - delta)));
    }
    double integral = adaptive_simpson(
        [&](double x) { return path_loss_pdf(radio, 40.0, x); }, mean - 8.0 * sigma,
        mean + 8.0 * sigma, 1e-10);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));

    RadioParams degenerate;
    degenerate.shadow_sigma_db = 0.0;
    CHECK_THROWS_AS(path_loss_pdf(degenerate, 40.0, 80.0), std::domain_error);
}

TEST_CASE("threshold exceedance: anchors and degenerate step") {
    RadioParams radio;
    // Distance where the mean received power sits exactly on the threshold.
    double margin_db = radio.tx_power.value - radio.rx_threshold.value - ref_path_loss_db(radio);
    double d_half = radio.ref_distance_m * std::pow(10.0, margin_db / (10.0 * radio.path_loss_exponent));
    CHECK(prob_above_threshold(radio, d_half) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(prob_above_threshold(radio, 40.0) == doctest::Approx(0.999).epsilon(0.001));

    RadioParams step = radio;
    step.shadow_sigma_db = 0.0;
    CHECK(prob_above_threshold(step, d_half - 1.0) == 1.0);
    CHECK(prob_above_threshold(step, d_half + 1.0) == 0.0);
}

TEST_CASE("threshold exceedance: monotone in d and Pt, offset invariant") {
    RadioParams radio;
    Rng rng(23);
    for (int i = 0; i < 1000; ++i) {
        double d1 = rng.uniform(1.0, 300.0), d2 = rng.uniform(1.0, 300.0);
        if (d1 > d2) std::swap(d1, d2);
        double p1 = prob_above_threshold(radio, d1), p2 = prob_above_threshold(radio, d2);
        // Strictly decreasing wherever the doubles have room to move; the
        // probability saturates to exactly 1 or 0 many sigma out.
        if (d2 - d1 > 1e-9) {
            CHECK(p1 >= p2);
            if (p1 < 1.0 && p2 > 0.0) CHECK(p1 > p2);
        }

        RadioParams more_power = radio;
        more_power.tx_power = PowerDbm{radio.tx_power.value + rng.uniform(0.1, 10.0)};
        double boosted = prob_above_threshold(more_power, d2);
        CHECK(boosted >= p2);
        if (boosted < 1.0 && p2 > 0.0) CHECK(boosted > p2);

        RadioParams shifted = radio;
        double off = rng.uniform(-20.0, 20.0);
        shifted.tx_power = PowerDbm{radio.tx_power.value + off};
        shifted.rx_threshold = PowerDbm{radio.rx_threshold.value + off};
        shifted.carrier_sense_threshold = PowerDbm{radio.carrier_sense_threshold.value + off};
        CHECK(prob_above_threshold(shifted, d2) ==
              doctest::Approx(prob_above_threshold(radio, d2)).epsilon(1e-12));
    }
}

TEST_CASE("closed form matches the sampling rate") {
    RadioParams radio;
    Rng rng(31);
    for (double d : {20.0, 60.0, 81.0, 100.0, 140.0, 200.0}) {
        const int n = 200'000;
        int above = 0;
        for (int i = 0; i < n; ++i)
            if (sample_received_power(radio, d, rng).value > radio.rx_threshold.value) ++above;
        double p = prob_above_threshold(radio, d);
        double se = std::sqrt(std::max(p * (1.0 - p), 1e-9) / n);
        CHECK(std::fabs(static_cast<double>(above) / n - p) < std::max(3.0 * se, 1e-3));
    }
}

TEST_CASE("two-ray power: law checks and range") {
    RadioParams radio;
    CHECK_THROWS_AS(received_power_tworay(radio, 0.0), std::domain_error);

    // Unit gains and heights at 1 m return the transmit power unchanged.
    CHECK(received_power_tworay(radio, 1.0).value == doctest::Approx(radio.tx_power.value));

    Rng rng(41);
    for (int i = 0; i < 500; ++i) {
        double d = rng.uniform(1.0, 500.0);
        double drop = received_power_tworay(radio, d).value -
                      received_power_tworay(radio, 2.0 * d).value;
        CHECK(drop == doctest::Approx(40.0 * std::log10(2.0)).epsilon(1e-9));
    }

    // Closed-form inverse from first principles.
    double expected = std::pow(to_watts(radio.tx_power).value / to_watts(radio.rx_threshold).value,
                               0.25);
    double range = tworay_range(radio);
    CHECK(range == doctest::Approx(expected).epsilon(1e-12));
    CHECK(range == doctest::Approx(166.7).epsilon(0.1 / 166.7));
    CHECK(received_power_tworay(radio, range).value ==
          doctest::Approx(radio.rx_threshold.value).epsilon(1e-9));

    RadioParams tall = radio;  // the 250 m preset uses 1.5 m antennas
    tall.tx_height_m = tall.rx_height_m = 1.5;
    CHECK(tworay_range(tall) == doctest::Approx(250.0).epsilon(5.0 / 250.0));

    RadioParams boosted = tall;
    boosted.tx_power = PowerDbm{27.67};
    CHECK(tworay_range(boosted) == doctest::Approx(300.0).epsilon(5.0 / 300.0));

    RadioParams doubled = radio;
    doubled.tx_power = PowerDbm{radio.tx_power.value + 40.0 * std::log10(2.0)};
    CHECK(tworay_range(doubled) == doctest::Approx(2.0 * range).epsilon(1e-9));
}

TEST_CASE("predicted delivery ratio") {
    RadioParams radio;
    // Small region: mean link distance well under 40 m, probability near 1.
    CHECK(predicted_delivery_ratio(radio, RectRegion(40.0, 40.0), 1.0) ==
          doctest::Approx(1.0).epsilon(0.01));
    CHECK_THROWS_AS(predicted_delivery_ratio(radio, RectRegion(40.0, 40.0), 0.0),
                    std::invalid_argument);

    // Monotone: growing the region never raises the prediction.
    double last = 1.0;
    for (double side : {100.0, 200.0, 300.0, 400.0, 600.0}) {
        double p = predicted_delivery_ratio(radio, RectRegion(side, side), 5.0);
        CHECK(p <= last + 1e-12);
        last = p;
    }

    // Clamped to [0, 1] even for large k.
    CHECK(predicted_delivery_ratio(radio, RectRegion(40.0, 40.0), 1e9) == 1.0);
}

TEST_CASE("radio parameter invariants") {
    RadioParams bad;
    bad.tx_power = PowerDbm{-70.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    RadioParams cs;
    cs.carrier_sense_threshold = PowerDbm{-10.0};  // above the rx threshold
    CHECK_THROWS_AS(cs.validate(), std::invalid_argument);

    RadioParams ok;
    CHECK_NOTHROW(ok.validate());
}
