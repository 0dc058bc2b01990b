#pragma once

#include <cmath>
#include <stdexcept>

namespace manet {

struct PowerWatts;

/// Power level referenced to 1 mW, logarithmic.
struct PowerDbm {
    double value = 0.0;

    constexpr PowerDbm() = default;
    constexpr explicit PowerDbm(double dbm) : value(dbm) {}

    PowerWatts watts() const;

    friend constexpr bool operator==(PowerDbm a, PowerDbm b) { return a.value == b.value; }
    friend constexpr auto operator<=>(PowerDbm a, PowerDbm b) { return a.value <=> b.value; }
};

/// Linear power. Any physically received signal has value > 0.
struct PowerWatts {
    double value = 0.0;

    constexpr PowerWatts() = default;
    constexpr explicit PowerWatts(double w) : value(w) {}

    PowerDbm dbm() const;

    friend constexpr bool operator==(PowerWatts a, PowerWatts b) { return a.value == b.value; }
    friend constexpr auto operator<=>(PowerWatts a, PowerWatts b) { return a.value <=> b.value; }
};

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

inline double watts_to_dbm(double watts) {
    if (!(watts > 0.0)) throw std::domain_error("watts_to_dbm: power must be positive");
    return 10.0 * std::log10(watts / 1e-3);
}

inline PowerWatts PowerDbm::watts() const { return PowerWatts{dbm_to_watts(value)}; }
inline PowerDbm PowerWatts::dbm() const { return PowerDbm{watts_to_dbm(value)}; }

inline PowerWatts to_watts(PowerDbm p) { return p.watts(); }
inline PowerDbm to_dbm(PowerWatts p) { return p.dbm(); }

}  // namespace manet
