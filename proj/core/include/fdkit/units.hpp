#pragma once

// Fits are in SI (s, m, m/s); fundamental-diagram quantities use traffic
// units (km/h, veh/km, veh/h). All conversions go through here.
namespace fdkit::units {

inline constexpr double kMpsPerKmh = 1.0 / 3.6;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kMetersPerKm = 1000.0;

constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }
constexpr double mps_to_kmh(double mps) { return mps * 3.6; }
constexpr double per_m_to_per_km(double per_m) { return per_m * kMetersPerKm; }
constexpr double per_s_to_per_h(double per_s) { return per_s * kSecondsPerHour; }

}  // namespace fdkit::units
