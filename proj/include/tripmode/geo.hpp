#pragma once

#include <cmath>
#include <numbers>

namespace tripmode::geo {

inline constexpr double kEarthRadiusM = 6371008.8;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;
/// Meters per degree of latitude on the mean sphere.
inline constexpr double kMetersPerDegree = kEarthRadiusM * kDegToRad;

inline constexpr double kMeterPerMile = 1609.344;
inline constexpr double kMpsPerMph = 0.44704;

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

/// Great-circle distance in meters.
inline double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double sdphi = std::sin((lat2 - lat1) * kDegToRad * 0.5);
    const double sdlam = std::sin((lon2 - lon1) * kDegToRad * 0.5);
    double a = sdphi * sdphi + std::cos(phi1) * std::cos(phi2) * sdlam * sdlam;
    if (a > 1.0) a = 1.0;
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(a));
}

inline double haversine_m(LatLon a, LatLon b) { return haversine_m(a.lat, a.lon, b.lat, b.lon); }

/// Unit-sphere position; squared chord between two of these is 4 * haversine term.
struct UnitVec {
    double x, y, z;
};

inline UnitVec to_unit(double lat, double lon) {
    const double phi = lat * kDegToRad;
    const double lam = lon * kDegToRad;
    const double c = std::cos(phi);
    return {c * std::cos(lam), c * std::sin(lam), std::sin(phi)};
}

/// Squared unit-sphere chord for a great-circle distance.
inline double chord2_for_distance(double meters) {
    const double s = std::sin(meters / (2.0 * kEarthRadiusM));
    return 4.0 * s * s;
}

/// Local equirectangular scale (meters per degree lon, meters per degree lat) at a latitude.
struct LocalScale {
    double kx;
    double ky;
};

inline LocalScale local_scale(double lat) {
    return {kMetersPerDegree * std::cos(lat * kDegToRad), kMetersPerDegree};
}

}  // namespace tripmode::geo
