#ifndef FIRECAST_REGION_HPP
#define FIRECAST_REGION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "firecast/grid.hpp"

namespace firecast {

/// Boolean lat-lon mask, e.g. a GFED region.
struct RegionMask {
    std::string name;
    GridSpec grid;
    std::vector<uint8_t> mask;  // [H*W], row-major like GridSpec

    int64_t count_true() const {
        int64_t n = 0;
        for (uint8_t m : mask) n += m ? 1 : 0;
        return n;
    }

    bool at(int64_t i, int64_t j) const {
        return mask[static_cast<size_t>(i * grid.width + j)] != 0;
    }

    bool contains(double lat, double lon) const {
        return at(grid.row_of(lat), grid.col_of(lon));
    }

    /// Rectangular region in degrees (lat_lo..lat_hi, lon_lo..lon_hi).
    static RegionMask rectangle(std::string name, const GridSpec& g, double lat_lo,
                                double lat_hi, double lon_lo, double lon_hi) {
        RegionMask r;
        r.name = std::move(name);
        r.grid = g;
        r.mask.assign(static_cast<size_t>(g.cells()), 0);
        for (int64_t i = 0; i < g.height; ++i)
            for (int64_t j = 0; j < g.width; ++j) {
                double la = g.lat(i), lo = g.lon(j);
                if (la >= lat_lo && la <= lat_hi && lo >= lon_lo && lo <= lon_hi)
                    r.mask[static_cast<size_t>(i * g.width + j)] = 1;
            }
        return r;
    }
};

}  // namespace firecast

#endif  // FIRECAST_REGION_HPP
