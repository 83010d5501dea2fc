#ifndef FIRECAST_GRID_HPP
#define FIRECAST_GRID_HPP

#include <cmath>
#include <cstdint>

#include "firecast/common.hpp"

namespace firecast {

/// Regular lat-lon grid of cell centers, row-major, row 0 at the southern
/// edge. Longitudes wrap modulo 360.
struct GridSpec {
    int64_t height = 0;
    int64_t width = 0;
    double lat_start = 0;  // center of row 0, degrees
    double lat_step = 0;
    double lon_start = 0;  // center of col 0, degrees
    double lon_step = 0;

    /// Uniform global grid of h x w cells.
    static GridSpec global(int64_t h, int64_t w) {
        GridSpec g;
        g.height = h;
        g.width = w;
        g.lat_step = 180.0 / static_cast<double>(h);
        g.lon_step = 360.0 / static_cast<double>(w);
        g.lat_start = -90.0 + g.lat_step / 2.0;
        g.lon_start = -180.0 + g.lon_step / 2.0;
        return g;
    }

    /// The 0.25-degree grid used at full scale: latitudes -89.875..89.875,
    /// longitudes -179.875..179.875.
    static GridSpec quarter_degree() { return global(720, 1440); }

    int64_t cells() const { return height * width; }

    double lat(int64_t i) const { return lat_start + lat_step * static_cast<double>(i); }
    double lon(int64_t j) const {
        double l = lon_start + lon_step * static_cast<double>(j);
        while (l > 180.0) l -= 360.0;
        while (l < -180.0) l += 360.0;
        return l;
    }

    /// Row index of the cell containing latitude `la` (clamped).
    int64_t row_of(double la) const {
        double edge = lat_start - lat_step / 2.0;
        auto i = static_cast<int64_t>(std::floor((la - edge) / lat_step));
        if (i < 0) i = 0;
        if (i >= height) i = height - 1;
        return i;
    }

    /// Column index of the cell containing longitude `lo` (wrapped).
    int64_t col_of(double lo) const {
        double edge = lon_start - lon_step / 2.0;
        double d = lo - edge;
        d -= 360.0 * std::floor(d / 360.0);
        auto j = static_cast<int64_t>(std::floor(d / lon_step));
        if (j >= width) j = width - 1;
        return j;
    }

    bool operator==(const GridSpec& o) const {
        return height == o.height && width == o.width && lat_start == o.lat_start &&
               lat_step == o.lat_step && lon_start == o.lon_start &&
               lon_step == o.lon_step;
    }
};

}  // namespace firecast

#endif  // FIRECAST_GRID_HPP
