#ifndef FIRECAST_DATA_HPP
#define FIRECAST_DATA_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "firecast/grid.hpp"
#include "firecast/io.hpp"
#include "firecast/region.hpp"
#include "firecast/tensor.hpp"

namespace firecast {

/// Fixed variable schema: 10 dynamic inputs, 1 static input, 1 target.
inline const std::vector<std::string>& cube_variable_names() {
    static const std::vector<std::string> names = {
        "mslp", "tp",      "vpd",  "sst",      "t2m_mean", "ssrd",
        "swvl1", "lst_day", "ndvi", "pop_dens", "lsm",      "gwis_ba"};
    return names;
}

inline constexpr int kDynamicInputs = 10;   // indices 0..9
inline constexpr int kLsmIndex = 10;        // static land-sea mask
inline constexpr int kTargetIndex = 11;     // gwis_ba
inline constexpr int kInputChannels = 14;   // 10 dynamic + lsm + 3 positional
inline constexpr int kPeriodsPerYear = 46;  // 8-day periods, synthetic calendar

struct CubeVariable {
    std::string name;
    bool is_static = false;
    double mean = 0.0;  // training-split statistics (0/1 before standardize)
    double stdev = 1.0;
    Tensor<float> values;  // [T,H,W] dynamic, [H,W] static
};

struct DatacubeSlab {
    GridSpec grid;
    std::vector<std::string> times;  // ISO-8601 dates, one per 8-day period
    std::vector<CubeVariable> vars;  // exactly cube_variable_names() order
    bool standardized = false;

    int64_t t() const { return static_cast<int64_t>(times.size()); }
    int64_t h() const { return grid.height; }
    int64_t w() const { return grid.width; }

    const CubeVariable& var(const std::string& name) const {
        for (const auto& v : vars)
            if (v.name == name) return v;
        throw error("unknown variable: " + name);
    }

    int year_of(int64_t t_idx) const {
        return std::stoi(times[static_cast<size_t>(t_idx)].substr(0, 4));
    }

    /// Land cells: lsm > 0.5 (exactly 0/1 after standardize()).
    std::vector<uint8_t> land_mask() const {
        const auto& lsm = var("lsm").values;
        std::vector<uint8_t> m(lsm.data.size());
        for (size_t i = 0; i < m.size(); ++i) m[i] = lsm.data[i] > 0.5f ? 1 : 0;
        return m;
    }
};

/// ISO date of synthetic period p (0-based) in `year`: day-of-year 1+8p on
/// a fixed non-leap calendar.
inline std::string synth_period_date(int year, int period) {
    require(period >= 0 && period < kPeriodsPerYear, "period out of range");
    static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                  31, 31, 30, 31, 30, 31};
    int doy = 1 + 8 * period;
    int month = 0;
    while (doy > kDays[static_cast<size_t>(month)]) {
        doy -= kDays[static_cast<size_t>(month)];
        ++month;
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month + 1, doy);
    return buf;
}

// ---- SFDC0001 container ----

inline void save_cube(const DatacubeSlab& slab, const std::string& path) {
    auto f = io::open_out(path);
    io::write_magic(f, "SFDC0001");
    io::json hdr;
    hdr["dims"] = {slab.t(), slab.h(), slab.w()};
    hdr["grid"] = {{"height", slab.grid.height},       {"width", slab.grid.width},
                   {"lat_start", slab.grid.lat_start}, {"lat_step", slab.grid.lat_step},
                   {"lon_start", slab.grid.lon_start}, {"lon_step", slab.grid.lon_step}};
    hdr["times"] = slab.times;
    io::json vars = io::json::array();
    for (const auto& v : slab.vars)
        vars.push_back({{"name", v.name},
                        {"static", v.is_static},
                        {"mean", v.mean},
                        {"std", v.stdev}});
    hdr["variables"] = vars;
    hdr["standardized"] = slab.standardized;
    hdr["endianness"] = "LE";
    hdr["dtype"] = "f32";
    io::write_json_header(f, hdr);
    for (const auto& v : slab.vars) io::write_vec(f, v.values.data);
    require(f.good(), "write failure: " + path);
}

inline DatacubeSlab load_cube(const std::string& path) {
    auto f = io::open_in(path);
    io::check_magic(f, "SFDC0001", path);
    io::json hdr = io::read_json_header(f);
    require(hdr.at("dtype").get<std::string>() == "f32" &&
                hdr.at("endianness").get<std::string>() == "LE",
            path + ": unsupported dtype/endianness");
    DatacubeSlab slab;
    auto dims = hdr.at("dims");
    int64_t t = dims[0].get<int64_t>(), h = dims[1].get<int64_t>(),
            w = dims[2].get<int64_t>();
    const auto& gj = hdr.at("grid");
    slab.grid.height = gj.at("height").get<int64_t>();
    slab.grid.width = gj.at("width").get<int64_t>();
    slab.grid.lat_start = gj.at("lat_start").get<double>();
    slab.grid.lat_step = gj.at("lat_step").get<double>();
    slab.grid.lon_start = gj.at("lon_start").get<double>();
    slab.grid.lon_step = gj.at("lon_step").get<double>();
    require(slab.grid.height == h && slab.grid.width == w,
            path + ": grid dims disagree with payload dims");
    slab.times = hdr.at("times").get<std::vector<std::string>>();
    require(static_cast<int64_t>(slab.times.size()) == t,
            path + ": times length disagrees with dims");
    slab.standardized = hdr.value("standardized", false);

    const auto& expect = cube_variable_names();
    const auto& vj = hdr.at("variables");
    for (size_t i = 0; i < expect.size(); ++i) {
        require(i < vj.size(),
                path + ": schema error, missing variable \"" + expect[i] + "\"");
        require(vj[i].at("name").get<std::string>() == expect[i],
                path + ": schema error, expected variable \"" + expect[i] +
                    "\" at position " + std::to_string(i) + ", found \"" +
                    vj[i].at("name").get<std::string>() + "\"");
    }
    if (vj.size() != expect.size())
        throw error(path + ": schema error, unknown extra variable \"" +
                    vj[expect.size()].at("name").get<std::string>() + "\"");

    for (const auto& vdesc : vj) {
        CubeVariable v;
        v.name = vdesc.at("name").get<std::string>();
        v.is_static = vdesc.at("static").get<bool>();
        v.mean = vdesc.at("mean").get<double>();
        v.stdev = vdesc.at("std").get<double>();
        size_t n = static_cast<size_t>((v.is_static ? 1 : t) * h * w);
        Shape shape = v.is_static ? Shape{h, w} : Shape{t, h, w};
        v.values = Tensor<float>(shape, io::read_vec<float>(f, n));
        slab.vars.push_back(std::move(v));
    }
    return slab;
}

// ---- SFRM0001 region masks ----

inline void save_region(const RegionMask& r, const std::string& path) {
    auto f = io::open_out(path);
    io::write_magic(f, "SFRM0001");
    io::json hdr;
    hdr["name"] = r.name;
    hdr["dims"] = {r.grid.height, r.grid.width};
    hdr["grid"] = {{"height", r.grid.height},       {"width", r.grid.width},
                   {"lat_start", r.grid.lat_start}, {"lat_step", r.grid.lat_step},
                   {"lon_start", r.grid.lon_start}, {"lon_step", r.grid.lon_step}};
    io::write_json_header(f, hdr);
    // packed bit rows, each padded to a whole byte
    size_t row_bytes = static_cast<size_t>((r.grid.width + 7) / 8);
    std::vector<uint8_t> packed(row_bytes * static_cast<size_t>(r.grid.height), 0);
    for (int64_t i = 0; i < r.grid.height; ++i)
        for (int64_t j = 0; j < r.grid.width; ++j)
            if (r.at(i, j))
                packed[static_cast<size_t>(i) * row_bytes + static_cast<size_t>(j / 8)] |=
                    static_cast<uint8_t>(1u << (j % 8));
    io::write_vec(f, packed);
    require(f.good(), "write failure: " + path);
}

inline RegionMask load_region(const std::string& path) {
    auto f = io::open_in(path);
    io::check_magic(f, "SFRM0001", path);
    io::json hdr = io::read_json_header(f);
    RegionMask r;
    r.name = hdr.at("name").get<std::string>();
    const auto& gj = hdr.at("grid");
    r.grid.height = gj.at("height").get<int64_t>();
    r.grid.width = gj.at("width").get<int64_t>();
    r.grid.lat_start = gj.at("lat_start").get<double>();
    r.grid.lat_step = gj.at("lat_step").get<double>();
    r.grid.lon_start = gj.at("lon_start").get<double>();
    r.grid.lon_step = gj.at("lon_step").get<double>();
    size_t row_bytes = static_cast<size_t>((r.grid.width + 7) / 8);
    auto packed = io::read_vec<uint8_t>(f, row_bytes * static_cast<size_t>(r.grid.height));
    r.mask.assign(static_cast<size_t>(r.grid.cells()), 0);
    for (int64_t i = 0; i < r.grid.height; ++i)
        for (int64_t j = 0; j < r.grid.width; ++j)
            r.mask[static_cast<size_t>(i * r.grid.width + j)] =
                (packed[static_cast<size_t>(i) * row_bytes +
                        static_cast<size_t>(j / 8)] >>
                 (j % 8)) &
                1;
    return r;
}

// ---- normalization ----

/// Standardize input variables in place with statistics over the given
/// training time indices: v -> (v - mean)/std, non-finite values -> 0
/// afterwards; lsm thresholded at 0.5 to exact 0/1; target untouched.
inline void standardize(DatacubeSlab& slab, const std::vector<int64_t>& train_times) {
    require(!slab.standardized, "cube is already standardized");
    require(!train_times.empty(), "standardize: empty training time set");
    int64_t hw = slab.h() * slab.w();
    for (int vi = 0; vi < kDynamicInputs; ++vi) {
        auto& v = slab.vars[static_cast<size_t>(vi)];
        double sum = 0, sum2 = 0;
        int64_t n = 0;
        for (int64_t t : train_times)
            for (int64_t g = 0; g < hw; ++g) {
                float x = v.values.data[t * hw + g];
                if (!std::isfinite(x)) continue;
                sum += x;
                sum2 += double(x) * x;
                ++n;
            }
        require(n > 0, "standardize: variable \"" + v.name + "\" has no finite "
                       "training values");
        double mean = sum / double(n);
        double var = sum2 / double(n) - mean * mean;
        require(var > 1e-12, "standardize: variable \"" + v.name +
                                 "\" is constant on the training split");
        double stdev = std::sqrt(var);
        v.mean = mean;
        v.stdev = stdev;
        for (auto& x : v.values.data) {
            double z = (double(x) - mean) / stdev;
            x = std::isfinite(z) ? static_cast<float>(z) : 0.0f;
        }
    }
    auto& lsm = slab.vars[kLsmIndex];
    for (auto& x : lsm.values.data) x = x > 0.5f ? 1.0f : 0.0f;
    slab.standardized = true;
}

/// [3,H,W]: cos(lat), sin(lon), cos(lon) per cell.
inline Tensor<float> positional_channels(const GridSpec& grid) {
    int64_t h = grid.height, w = grid.width;
    Tensor<float> p = Tensor<float>::zeros({3, h, w});
    for (int64_t i = 0; i < h; ++i)
        for (int64_t j = 0; j < w; ++j) {
            double la = deg2rad(grid.lat(i)), lo = deg2rad(grid.lon(j));
            p.data[0 * h * w + i * w + j] = static_cast<float>(std::cos(la));
            p.data[1 * h * w + i * w + j] = static_cast<float>(std::sin(lo));
            p.data[2 * h * w + i * w + j] = static_cast<float>(std::cos(lo));
        }
    return p;
}

// ---- samples ----

/// Index-level sample: input window [t_start, t_start+ts), target at
/// t_start+ts-1+horizon.
struct SampleIdx {
    int64_t t_start = 0;
    int ts = 6;
    int horizon = 1;

    int64_t target_t() const { return t_start + ts - 1 + horizon; }
};

/// Sliding windows advancing by `stride` = ts - overlap.
inline std::vector<SampleIdx> make_samples(const DatacubeSlab& slab, int ts,
                                           int horizon, int64_t stride) {
    require(ts == 6 || ts == 12 || ts == 24, "ts must be one of {6,12,24}");
    require(horizon == 1 || horizon == 2 || horizon == 4 || horizon == 8 ||
                horizon == 16 || horizon == 24,
            "horizon must be one of {1,2,4,8,16,24}");
    require(stride >= 1, "stride must be >= 1 (overlap must be < ts)");
    require(slab.t() >= ts + horizon, "ts + horizon exceeds available times");
    std::vector<SampleIdx> out;
    for (int64_t s = 0; s + ts - 1 + horizon < slab.t(); s += stride)
        out.push_back({s, ts, horizon});
    return out;
}

struct SplitIdx {
    std::vector<SampleIdx> train, val, test;
};

/// Membership by the target timestamp's year.
inline SplitIdx split_by_years(const DatacubeSlab& slab,
                               const std::vector<SampleIdx>& samples,
                               int train_lo, int train_hi, int val_year,
                               int test_year) {
    SplitIdx s;
    for (const auto& smp : samples) {
        int y = slab.year_of(smp.target_t());
        if (y >= train_lo && y <= train_hi)
            s.train.push_back(smp);
        else if (y == val_year)
            s.val.push_back(smp);
        else if (y == test_year)
            s.test.push_back(smp);
    }
    return s;
}

/// Training time indices for statistics: all periods whose own year is in
/// the training range.
inline std::vector<int64_t> train_time_indices(const DatacubeSlab& slab,
                                               int train_lo, int train_hi) {
    std::vector<int64_t> out;
    for (int64_t t = 0; t < slab.t(); ++t) {
        int y = slab.year_of(t);
        if (y >= train_lo && y <= train_hi) out.push_back(t);
    }
    return out;
}

/// Materialize the [ts,14,H,W] input tensor: 10 standardized dynamic
/// variables, the land-sea mask, and 3 positional channels (static
/// channels replicated across time).
inline Tensor<float> make_input(const DatacubeSlab& slab, const SampleIdx& s,
                                const Tensor<float>& positional) {
    int64_t h = slab.h(), w = slab.w(), hw = h * w;
    require(s.t_start >= 0 && s.target_t() < slab.t(), "sample out of range");
    Tensor<float> x = Tensor<float>::zeros({s.ts, kInputChannels, h, w});
    for (int64_t k = 0; k < s.ts; ++k) {
        int64_t t = s.t_start + k;
        float* step = x.ptr() + k * kInputChannels * hw;
        for (int vi = 0; vi < kDynamicInputs; ++vi) {
            const float* src = slab.vars[static_cast<size_t>(vi)].values.ptr() + t * hw;
            std::copy(src, src + hw, step + vi * hw);
        }
        const float* lsm = slab.vars[kLsmIndex].values.ptr();
        std::copy(lsm, lsm + hw, step + kLsmIndex * hw);
        std::copy(positional.ptr(), positional.ptr() + 3 * hw,
                  step + (kLsmIndex + 1) * hw);
    }
    return x;
}

/// Binary target grid at the sample's target time: gwis_ba > 0.
inline Tensor<float> make_target(const DatacubeSlab& slab, const SampleIdx& s) {
    int64_t hw = slab.h() * slab.w();
    const auto& ba = slab.vars[kTargetIndex].values;
    Tensor<float> y = Tensor<float>::zeros({slab.h(), slab.w()});
    const float* src = ba.ptr() + s.target_t() * hw;
    for (int64_t g = 0; g < hw; ++g) y.data[g] = src[g] > 0.0f ? 1.0f : 0.0f;
    return y;
}

// ---- synthetic generator ----

namespace detail {

/// Smooth random field on the grid: a small sum of low-frequency
/// spherical harmonics-like sinusoids with seeded coefficients.
inline std::vector<double> smooth_field(const GridSpec& g, Rng& rng, int modes) {
    std::vector<double> f(static_cast<size_t>(g.cells()), 0.0);
    for (int m = 0; m < modes; ++m) {
        double a = rng.normal();
        double kla = 1.0 + std::floor(rng.uniform() * 3.0);   // 1..3
        double klo = 1.0 + std::floor(rng.uniform() * 4.0);   // 1..4
        double pla = rng.uniform() * 2.0 * kPi;
        double plo = rng.uniform() * 2.0 * kPi;
        for (int64_t i = 0; i < g.height; ++i) {
            double la = deg2rad(g.lat(i));
            double sla = std::sin(kla * la + pla);
            for (int64_t j = 0; j < g.width; ++j) {
                double lo = deg2rad(g.lon(j));
                f[static_cast<size_t>(i * g.width + j)] +=
                    a * sla * std::sin(klo * lo + plo);
            }
        }
    }
    return f;
}

}  // namespace detail

/// Seeded procedural datacube. Dynamic variables combine per-cell seasonal
/// harmonics, smooth interannual anomalies, and white noise; the fire
/// target is a thresholded danger index driven by the trailing two-year
/// mean of the vpd/ndvi latents so that long input windows carry strictly
/// more signal than short ones. Land variables are NaN over ocean.
inline DatacubeSlab synth_cube(uint64_t seed, int year_lo, int year_hi, int64_t h,
                               int64_t w) {
    require(year_hi >= year_lo, "synth_cube: bad year range");
    DatacubeSlab slab;
    slab.grid = GridSpec::global(h, w);
    int years = year_hi - year_lo + 1;
    int64_t t = static_cast<int64_t>(years) * kPeriodsPerYear;
    int64_t hw = h * w;
    for (int y = year_lo; y <= year_hi; ++y)
        for (int p = 0; p < kPeriodsPerYear; ++p)
            slab.times.push_back(synth_period_date(y, p));

    Rng root(seed);
    Rng land_rng = root.fork(1);
    Rng field_rng = root.fork(2);
    Rng noise_rng = root.fork(3);
    Rng fire_rng = root.fork(4);

    // Land mask: smooth field thresholded for ~35% land.
    auto land_field = detail::smooth_field(slab.grid, land_rng, 6);
    std::vector<double> sorted = land_field;
    std::sort(sorted.begin(), sorted.end());
    double land_thr = sorted[static_cast<size_t>(0.65 * double(hw - 1))];
    std::vector<uint8_t> land(static_cast<size_t>(hw));
    for (int64_t g = 0; g < hw; ++g) land[size_t(g)] = land_field[size_t(g)] > land_thr;

    // Shared structures.
    // Seasonal phase follows the hemisphere (fire season half a year apart).
    std::vector<double> season_phase(static_cast<size_t>(hw));
    for (int64_t i = 0; i < h; ++i)
        for (int64_t j = 0; j < w; ++j)
            season_phase[static_cast<size_t>(i * w + j)] =
                slab.grid.lat(i) >= 0 ? 0.0 : kPi;

    // Latent drivers with interannual memory: one AR(1) scalar per year
    // loading onto a smooth spatial pattern, per latent.
    struct Latent {
        std::vector<double> pattern;      // [H*W]
        std::vector<double> year_coef;    // [years]
        double season_amp;
    };
    auto make_latent = [&](double season_amp) {
        Latent l;
        l.pattern = detail::smooth_field(slab.grid, field_rng, 5);
        l.year_coef.resize(static_cast<size_t>(years));
        double c = field_rng.normal();
        for (int y = 0; y < years; ++y) {
            l.year_coef[static_cast<size_t>(y)] = c;
            c = 0.6 * c + 0.8 * field_rng.normal();
        }
        l.season_amp = season_amp;
        return l;
    };
    Latent vpd_l = make_latent(1.0);
    Latent ndvi_l = make_latent(0.8);

    auto latent_value = [&](const Latent& l, int64_t ti, int64_t g) {
        int y = static_cast<int>(ti / kPeriodsPerYear);
        int p = static_cast<int>(ti % kPeriodsPerYear);
        double seas = l.season_amp *
                      std::sin(2.0 * kPi * double(p) / kPeriodsPerYear +
                               season_phase[static_cast<size_t>(g)]);
        return seas + 0.8 * l.pattern[static_cast<size_t>(g)] *
                          l.year_coef[static_cast<size_t>(y)];
    };

    // Materialize the ten dynamic variables. Each gets its own offset,
    // scale, seasonal phase shift and noise level; vpd and ndvi embed the
    // danger latents so inputs carry the target's signal.
    struct VarGen {
        const char* name;
        bool land_only;
        double offset, scale, noise;
        const Latent* latent;  // nullptr -> independent harmonic
        double latent_sign;
    };
    const VarGen gens[kDynamicInputs] = {
        {"mslp", false, 101325.0, 800.0, 0.6, nullptr, 0},
        {"tp", false, 2.5e-4, 1.5e-4, 0.8, nullptr, 0},
        {"vpd", true, 1.2, 0.5, 0.35, &vpd_l, +1.0},
        {"sst", false, 290.0, 8.0, 0.3, nullptr, 0},
        {"t2m_mean", false, 287.0, 12.0, 0.4, nullptr, 0},
        {"ssrd", false, 1.6e7, 6e6, 0.5, nullptr, 0},
        {"swvl1", true, 0.25, 0.1, 0.5, nullptr, 0},
        {"lst_day", true, 295.0, 14.0, 0.4, nullptr, 0},
        {"ndvi", true, 0.45, 0.2, 0.35, &ndvi_l, +1.0},
        {"pop_dens", true, 40.0, 25.0, 0.2, nullptr, 0},
    };

    for (const auto& gen : gens) {
        CubeVariable v;
        v.name = gen.name;
        v.values = Tensor<float>::zeros({t, h, w});
        auto pattern = detail::smooth_field(slab.grid, field_rng, 4);
        double phase = field_rng.uniform() * 2.0 * kPi;
        for (int64_t ti = 0; ti < t; ++ti) {
            int p = static_cast<int>(ti % kPeriodsPerYear);
            for (int64_t g = 0; g < hw; ++g) {
                if (gen.land_only && !land[static_cast<size_t>(g)]) {
                    v.values.data[ti * hw + g] =
                        std::numeric_limits<float>::quiet_NaN();
                    continue;
                }
                double z;
                if (gen.latent) {
                    z = gen.latent_sign * latent_value(*gen.latent, ti, g) +
                        0.3 * pattern[static_cast<size_t>(g)];
                } else {
                    z = std::sin(2.0 * kPi * double(p) / kPeriodsPerYear +
                                 season_phase[static_cast<size_t>(g)] + phase) +
                        0.5 * pattern[static_cast<size_t>(g)];
                }
                z += gen.noise * noise_rng.normal();
                v.values.data[ti * hw + g] =
                    static_cast<float>(gen.offset + gen.scale * z);
            }
        }
        slab.vars.push_back(std::move(v));
    }

    // Static land-sea mask.
    {
        CubeVariable v;
        v.name = "lsm";
        v.is_static = true;
        v.values = Tensor<float>::zeros({h, w});
        for (int64_t g = 0; g < hw; ++g)
            v.values.data[g] = land[static_cast<size_t>(g)] ? 1.0f : 0.0f;
        slab.vars.push_back(std::move(v));
    }

    // Fire target: danger = trailing-24-period mean of (vpd latent - ndvi
    // latent)/2 + seasonal harmonic; per-period threshold at the ~98th
    // land percentile; burned area proportional to the exceedance.
    {
        CubeVariable v;
        v.name = "gwis_ba";
        v.values = Tensor<float>::zeros({t, h, w});
        std::vector<double> danger(static_cast<size_t>(hw));
        std::vector<double> trail(static_cast<size_t>(hw), 0.0);
        constexpr int kWindow = 24;
        std::vector<std::vector<double>> ring;  // last kWindow driver grids
        for (int64_t ti = 0; ti < t; ++ti) {
            int p = static_cast<int>(ti % kPeriodsPerYear);
            std::vector<double> driver(static_cast<size_t>(hw), 0.0);
            for (int64_t g = 0; g < hw; ++g)
                if (land[static_cast<size_t>(g)])
                    driver[static_cast<size_t>(g)] =
                        0.5 * (latent_value(vpd_l, ti, g) -
                               latent_value(ndvi_l, ti, g));
            ring.push_back(driver);
            if (static_cast<int>(ring.size()) > kWindow) ring.erase(ring.begin());
            std::vector<double> land_vals;
            for (int64_t g = 0; g < hw; ++g) {
                if (!land[static_cast<size_t>(g)]) continue;
                double m = 0;
                for (const auto& grid : ring) m += grid[static_cast<size_t>(g)];
                m /= double(ring.size());
                double d = m +
                           0.8 * std::sin(2.0 * kPi * double(p) / kPeriodsPerYear +
                                          season_phase[static_cast<size_t>(g)]) +
                           0.15 * fire_rng.normal();
                danger[static_cast<size_t>(g)] = d;
                land_vals.push_back(d);
            }
            std::sort(land_vals.begin(), land_vals.end());
            double thr = land_vals[static_cast<size_t>(0.98 * double(land_vals.size() - 1))];
            for (int64_t g = 0; g < hw; ++g) {
                if (!land[static_cast<size_t>(g)]) continue;
                double ex = danger[static_cast<size_t>(g)] - thr;
                if (ex > 0)
                    v.values.data[ti * hw + g] = static_cast<float>(100.0 * ex);
            }
            (void)trail;
        }
        slab.vars.push_back(std::move(v));
    }
    return slab;
}

/// Fraction of land cells burning, averaged over periods.
inline double fire_prevalence(const DatacubeSlab& slab) {
    auto land = slab.land_mask();
    int64_t nland = 0;
    for (uint8_t m : land) nland += m;
    require(nland > 0, "no land cells");
    const auto& ba = slab.var("gwis_ba").values;
    int64_t hw = slab.h() * slab.w();
    double acc = 0;
    for (int64_t ti = 0; ti < slab.t(); ++ti) {
        int64_t burn = 0;
        for (int64_t g = 0; g < hw; ++g)
            if (land[static_cast<size_t>(g)] && ba.data[ti * hw + g] > 0.0f) ++burn;
        acc += double(burn) / double(nland);
    }
    return acc / double(slab.t());
}

}  // namespace firecast

#endif  // FIRECAST_DATA_HPP
