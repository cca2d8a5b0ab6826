#include "camxref/geo.hpp"

#include "camxref/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace camxref::geo {

namespace {

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

} // namespace

bool is_valid(const GeoPoint& p)
{
    return std::isfinite(p.lat_deg) && std::isfinite(p.lon_deg) && p.lat_deg >= -90.0 &&
           p.lat_deg <= 90.0 && p.lon_deg >= -180.0 && p.lon_deg <= 180.0;
}

bool is_valid(const BoundingBox& b)
{
    return is_valid(GeoPoint{b.min_lat, b.min_lon}) && is_valid(GeoPoint{b.max_lat, b.max_lon}) &&
           b.min_lat <= b.max_lat && b.min_lon <= b.max_lon;
}

CatchmentScale::CatchmentScale(double side_miles) : side_miles_(side_miles)
{
    if (!(side_miles > 0.0) || !std::isfinite(side_miles)) {
        throw ValidationError("catchment scale must be a positive number of miles, got " +
                              std::to_string(side_miles));
    }
}

double miles_per_degree_lat() { return 2.0 * std::numbers::pi * kEarthRadiusMiles / 360.0; }

double miles_to_degrees_lat(double miles) { return miles / miles_per_degree_lat(); }

double degrees_lat_to_miles(double degrees) { return degrees * miles_per_degree_lat(); }

BoundingBox bounding_box(const GeoPoint& center, const CatchmentScale& scale)
{
    if (!is_valid(center)) {
        throw ValidationError("bounding box centre is not a valid coordinate");
    }
    if (std::abs(center.lat_deg) >= kMaxBoxLatitude) {
        throw ValidationError("bounding box centre latitude " + std::to_string(center.lat_deg) +
                              " is too close to a pole");
    }
    const double h = scale.half_side_miles();
    const double d_lat = h / miles_per_degree_lat();
    const double d_lon = h / (miles_per_degree_lat() * std::cos(deg2rad(center.lat_deg)));
    const BoundingBox box{center.lat_deg - d_lat, center.lat_deg + d_lat,
                          center.lon_deg - d_lon, center.lon_deg + d_lon};
    if (box.min_lon < -180.0 || box.max_lon > 180.0) {
        throw ValidationError("bounding box would cross the antimeridian");
    }
    return box;
}

bool contains(const BoundingBox& box, const GeoPoint& p)
{
    return box.min_lat <= p.lat_deg && p.lat_deg <= box.max_lat && box.min_lon <= p.lon_deg &&
           p.lon_deg <= box.max_lon;
}

bool encloses(const BoundingBox& outer, const BoundingBox& inner)
{
    return outer.min_lat <= inner.min_lat && inner.max_lat <= outer.max_lat &&
           outer.min_lon <= inner.min_lon && inner.max_lon <= outer.max_lon;
}

double haversine_miles(const GeoPoint& a, const GeoPoint& b)
{
    const double lat1 = deg2rad(a.lat_deg);
    const double lat2 = deg2rad(b.lat_deg);
    const double s_lat = std::sin((lat2 - lat1) / 2.0);
    const double s_lon = std::sin(deg2rad(b.lon_deg - a.lon_deg) / 2.0);
    const double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
    return 2.0 * kEarthRadiusMiles * std::asin(std::sqrt(std::min(1.0, h)));
}

} // namespace camxref::geo
