#pragma once

#include <compare>

// Spherical-earth geodesy for mile-square catchment boxes. The study area is
// Florida and the Caribbean, so boxes never cross the antimeridian and poles
// are rejected rather than wrapped.

namespace camxref::geo {

/// Mean Earth radius in statute miles.
inline constexpr double kEarthRadiusMiles = 3958.7613;

/// Box construction uses cos(lat); at or beyond this latitude it is refused.
inline constexpr double kMaxBoxLatitude = 89.0;

struct GeoPoint {
    double lat_deg = 0.0;
    double lon_deg = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p);

/// Closed, axis-aligned lat/lon rectangle.
struct BoundingBox {
    double min_lat = 0.0;
    double max_lat = 0.0;
    double min_lon = 0.0;
    double max_lon = 0.0;

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

bool is_valid(const BoundingBox& b);

/// Side length of a square search area in statute miles.
class CatchmentScale {
public:
    /// Throws ValidationError unless side_miles > 0 and finite.
    explicit CatchmentScale(double side_miles);

    double side_miles() const { return side_miles_; }
    double half_side_miles() const { return side_miles_ / 2.0; }

    friend auto operator<=>(const CatchmentScale&, const CatchmentScale&) = default;

private:
    double side_miles_;
};

double miles_per_degree_lat();
double miles_to_degrees_lat(double miles);
double degrees_lat_to_miles(double degrees);

/// Square of `scale` centred on `center` using the local equirectangular
/// approximation: dLat = h / mpd, dLon = h / (mpd * cos(lat)).
/// Throws ValidationError for invalid centres or |lat| >= 89.
BoundingBox bounding_box(const GeoPoint& center, const CatchmentScale& scale);

/// Boundary points are inside.
bool contains(const BoundingBox& box, const GeoPoint& p);

/// box `inner` lies within `outer` (closed).
bool encloses(const BoundingBox& outer, const BoundingBox& inner);

/// Great-circle distance on the kEarthRadiusMiles sphere.
double haversine_miles(const GeoPoint& a, const GeoPoint& b);

} // namespace camxref::geo
