#ifndef FIRECAST_EVAL_HPP
#define FIRECAST_EVAL_HPP

/// Average precision (AUPRC), naive seasonal baselines, and masked
/// global/per-region evaluation reports.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "firecast/common.hpp"
#include "firecast/data.hpp"
#include "firecast/io.hpp"
#include "firecast/region.hpp"
#include "firecast/tensor.hpp"

namespace firecast {

/// Average precision of a score pool. With no positive labels the value is
/// undefined; `valid` is false and `note` carries the diagnostic.
struct ApResult {
    bool valid = false;
    double value = 0.0;
    std::string note;
};

inline io::json ap_to_json(const ApResult& r) {
    io::json j;
    j["valid"] = r.valid;
    if (r.valid)
        j["value"] = r.value;
    else
        j["value"] = nullptr;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

/// AP = sum_t (R_t - R_{t-1}) * P_t over descending distinct-score
/// thresholds, with tied scores grouped into a single threshold and R_0 = 0.
inline ApResult average_precision(const std::vector<double>& scores,
                                  const std::vector<uint8_t>& labels) {
    require(scores.size() == labels.size(), "average_precision: size mismatch");
    require(!scores.empty(), "average_precision: empty input");
    int64_t total_pos = 0;
    for (uint8_t l : labels) total_pos += l ? 1 : 0;
    if (total_pos == 0)
        return {false, 0.0, "no positive labels; AP undefined"};

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t(0));
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return scores[a] > scores[b];
    });

    double ap = 0.0;
    double prev_recall = 0.0;
    int64_t tp = 0, seen = 0;
    size_t i = 0;
    while (i < order.size()) {
        // group all indices sharing this score into one threshold
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            tp += labels[order[j]] ? 1 : 0;
            ++seen;
            ++j;
        }
        double precision = double(tp) / double(seen);
        double recall = double(tp) / double(total_pos);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return {true, ap, ""};
}

inline ApResult average_precision(const std::vector<float>& scores,
                                  const std::vector<uint8_t>& labels) {
    std::vector<double> s(scores.begin(), scores.end());
    return average_precision(s, labels);
}

// ---- naive seasonal baselines ----

namespace detail {

/// Count of prior years (strictly before `test_year`, within the cube) with
/// fire at grid cell `g`, period `p`, and the count of prior years total.
inline std::pair<int, int> prior_fire_years(const DatacubeSlab& cube, int64_t g,
                                            int period, int test_year) {
    const auto& ba = cube.var("gwis_ba").values;
    int64_t hw = cube.h() * cube.w();
    int fire = 0, years = 0;
    for (int64_t t = 0; t < cube.t(); ++t) {
        if (cube.year_of(t) >= test_year) break;
        if (t % kPeriodsPerYear != period) continue;
        ++years;
        if (ba.data[t * hw + g] > 0.0f) ++fire;
    }
    return {fire, years};
}

}  // namespace detail

/// 1 iff any prior year (before test_year) had fire at (cell, period).
inline int naive_anyfire(const DatacubeSlab& cube, int64_t g, int period,
                         int test_year) {
    auto [fire, years] = detail::prior_fire_years(cube, g, period, test_year);
    require(years >= 1, "naive_anyfire: no prior years before test year");
    return fire > 0 ? 1 : 0;
}

/// 1 iff strictly more prior years had fire than had none (tie -> 0).
inline int naive_majority(const DatacubeSlab& cube, int64_t g, int period,
                          int test_year) {
    auto [fire, years] = detail::prior_fire_years(cube, g, period, test_year);
    require(years >= 1, "naive_majority: no prior years before test year");
    return fire > (years - fire) ? 1 : 0;
}

// ---- evaluation report ----

struct EvalReport {
    std::string model_id;
    int horizon = 0;
    ApResult global, global_anyfire, global_majority;
    int64_t global_n = 0;
    int64_t global_positives = 0;

    struct RegionRow {
        ApResult model, anyfire, majority;
        int64_t n = 0;
        int64_t positives = 0;
    };
    std::map<std::string, RegionRow> regions;  // ordered by region name

    io::json to_json() const {
        io::json j;
        j["model_id"] = model_id;
        j["horizon"] = horizon;
        j["global"] = {{"auprc", ap_to_json(global)},
                       {"anyfire_auprc", ap_to_json(global_anyfire)},
                       {"majority_auprc", ap_to_json(global_majority)},
                       {"n", global_n},
                       {"positives", global_positives},
                       {"positive_rate",
                        global_n > 0 ? double(global_positives) / double(global_n)
                                     : 0.0}};
        io::json rj = io::json::object();
        for (const auto& [name, row] : regions) {
            rj[name] = {{"auprc", ap_to_json(row.model)},
                        {"anyfire_auprc", ap_to_json(row.anyfire)},
                        {"majority_auprc", ap_to_json(row.majority)},
                        {"n", row.n},
                        {"positives", row.positives},
                        {"positive_rate",
                         row.n > 0 ? double(row.positives) / double(row.n)
                                   : 0.0}};
        }
        j["regions"] = rj;
        return j;
    }
};

/// Pool all (cell, time) pairs within land (and each region mask ∧ land),
/// compute model AP per pool, and the two naive-baseline APs on identical
/// pools. Predictions map target time index -> [H,W] score grid.
inline EvalReport evaluate(const DatacubeSlab& cube,
                           const std::map<int64_t, Tensor<float>>& preds,
                           int horizon, const std::string& model_id,
                           const std::vector<RegionMask>& region_masks) {
    require(!preds.empty(), "evaluate: no predictions");
    int64_t hw = cube.h() * cube.w();
    auto land = cube.land_mask();
    const auto& ba = cube.var("gwis_ba").values;

    struct Pool {
        std::vector<double> model, anyfire, majority;
        std::vector<uint8_t> label;
    };
    Pool global;
    std::map<std::string, Pool> region_pools;
    for (const auto& rm : region_masks) {
        require(rm.grid == cube.grid, "evaluate: region grid mismatch");
        region_pools[rm.name];
    }

    for (const auto& [t, grid] : preds) {
        require(t >= 0 && t < cube.t(), "evaluate: prediction time out of range");
        require(grid.shape == Shape{cube.h(), cube.w()},
                "evaluate: prediction shape mismatch at t=" + std::to_string(t));
        int period = int(t % kPeriodsPerYear);
        int year = cube.year_of(t);
        for (int64_t g = 0; g < hw; ++g) {
            if (!land[size_t(g)]) continue;
            double score = grid.data[g];
            double any = naive_anyfire(cube, g, period, year);
            double maj = naive_majority(cube, g, period, year);
            uint8_t y = ba.data[t * hw + g] > 0.0f ? 1 : 0;
            global.model.push_back(score);
            global.anyfire.push_back(any);
            global.majority.push_back(maj);
            global.label.push_back(y);
            for (const auto& rm : region_masks) {
                if (!rm.mask[size_t(g)]) continue;
                auto& p = region_pools[rm.name];
                p.model.push_back(score);
                p.anyfire.push_back(any);
                p.majority.push_back(maj);
                p.label.push_back(y);
            }
        }
    }

    auto fill = [](const Pool& p, ApResult& model, ApResult& any, ApResult& maj,
                   int64_t& n, int64_t& pos) {
        n = int64_t(p.label.size());
        pos = 0;
        for (uint8_t l : p.label) pos += l;
        if (p.label.empty()) {
            model = any = maj = {false, 0.0, "empty pool"};
            return;
        }
        model = average_precision(p.model, p.label);
        any = average_precision(p.anyfire, p.label);
        maj = average_precision(p.majority, p.label);
    };

    EvalReport rep;
    rep.model_id = model_id;
    rep.horizon = horizon;
    fill(global, rep.global, rep.global_anyfire, rep.global_majority,
         rep.global_n, rep.global_positives);
    for (const auto& [name, p] : region_pools) {
        auto& row = rep.regions[name];
        fill(p, row.model, row.anyfire, row.majority, row.n, row.positives);
    }
    return rep;
}

// ---- prediction files ----

/// One score grid with its sidecar metadata. On disk: `<stem>.f32` holds the
/// row-major float32 grid; `<stem>.json` holds {time, date, horizon,
/// model_id, h, w, run_config}.
struct Prediction {
    int64_t time = 0;
    std::string date;
    int horizon = 0;
    std::string model_id;
    Tensor<float> scores;  // [H,W]
    io::json run_config;
};

inline void save_prediction(const Prediction& p, const std::string& stem) {
    require(p.scores.ndim() == 2, "save_prediction: scores must be [H,W]");
    {
        auto f = io::open_out(stem + ".f32");
        io::write_vec(f, p.scores.data);
    }
    io::json j;
    j["time"] = p.time;
    j["date"] = p.date;
    j["horizon"] = p.horizon;
    j["model_id"] = p.model_id;
    j["h"] = p.scores.dim(0);
    j["w"] = p.scores.dim(1);
    j["run_config"] = p.run_config;
    std::ofstream sf(stem + ".json");
    require(sf.good(), "cannot open " + stem + ".json");
    sf << j.dump(2) << "\n";
}

inline Prediction load_prediction(const std::string& stem) {
    std::ifstream sf(stem + ".json");
    require(sf.good(), "cannot open " + stem + ".json");
    io::json j = io::json::parse(sf);
    Prediction p;
    p.time = j.at("time").get<int64_t>();
    p.date = j.value("date", "");
    p.horizon = j.at("horizon").get<int>();
    p.model_id = j.at("model_id").get<std::string>();
    p.run_config = j.value("run_config", io::json::object());
    int64_t h = j.at("h").get<int64_t>(), w = j.at("w").get<int64_t>();
    auto f = io::open_in(stem + ".f32");
    p.scores = Tensor<float>{{h, w},
                             io::read_vec<float>(f, static_cast<size_t>(h * w))};
    return p;
}

/// 8-bit grayscale danger-map rendering (binary portable pixmap family, P5):
/// score 0 -> black, score 1 -> white.
inline void export_danger_map(const Tensor<float>& scores,
                              const std::string& path) {
    require(scores.ndim() == 2, "export_danger_map: scores must be [H,W]");
    int64_t h = scores.dim(0), w = scores.dim(1);
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "cannot open " + path);
    f << "P5\n" << w << " " << h << "\n255\n";
    // image rows run top-down; grid row 0 is the southernmost latitude
    for (int64_t i = h - 1; i >= 0; --i)
        for (int64_t j = 0; j < w; ++j) {
            float v = scores.data[i * w + j];
            v = std::min(1.0f, std::max(0.0f, v));
            unsigned char b = static_cast<unsigned char>(std::lround(v * 255.0f));
            f.write(reinterpret_cast<const char*>(&b), 1);
        }
    require(f.good(), "short write to " + path);
}

}  // namespace firecast

#endif  // FIRECAST_EVAL_HPP
