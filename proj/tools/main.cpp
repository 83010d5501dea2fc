// firecast: mesh, data, train, predict, eval, baseline, and attribute
// subcommands over the custom SFMESH/SFDC/SFRM/SFCKPT containers.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "firecast/attribution.hpp"
#include "firecast/coupling.hpp"
#include "firecast/data.hpp"
#include "firecast/eval.hpp"
#include "firecast/geomesh.hpp"
#include "firecast/mesh_io.hpp"
#include "firecast/model.hpp"
#include "firecast/region.hpp"
#include "firecast/training.hpp"

extern "C" void openblas_set_num_threads(int);

namespace fs = std::filesystem;
using namespace firecast;
using io::json;

namespace {

constexpr const char* kVersion = "0.1.0";

/// Canonical resolved configuration, echoed into every output artifact.
json run_config(const std::string& subcommand, const json& flags) {
    json j;
    j["subcommand"] = subcommand;
    j["flags"] = flags;
    j["version"] = kVersion;
    return j;
}

void print_config(const json& rc) { std::cout << rc.dump() << "\n"; }

int resolve_threads(int flag_value) {
    if (flag_value <= 0) {
        const char* env = std::getenv("FIRECAST_THREADS");
        flag_value = env ? std::atoi(env) : 1;
        if (flag_value <= 0) flag_value = 1;
    }
    openblas_set_num_threads(flag_value);
    return flag_value;
}

std::pair<int, int> parse_range(const std::string& s, char sep,
                                const std::string& what) {
    auto pos = s.find(sep);
    require(pos != std::string::npos,
            what + ": expected A" + std::string(1, sep) + "B, got '" + s + "'");
    return {std::stoi(s.substr(0, pos)), std::stoi(s.substr(pos + 1))};
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream f(path);
    require(f.good(), "cannot open " + path);
    f << j.dump(2) << "\n";
}

// ---- mesh ----

void cmd_mesh_build(int levels, const std::string& out) {
    MeshFile mf;
    mf.kind = MeshFile::Kind::Multi;
    mf.multi = build_multimesh(levels);
    save_mesh(mf, out);
    std::cout << "wrote " << out << " nodes=" << mf.multi.nodes.size()
              << " edges=" << mf.multi.edge_list.size() << "\n";
}

void cmd_mesh_build_lam(const std::string& region_path, int fine, int coarse,
                        const std::string& buffer_km, const std::string& out) {
    auto [lo, hi] = parse_range(buffer_km, ',', "--buffer-km");
    RegionMask region = load_region(region_path);
    MeshFile mf;
    mf.kind = MeshFile::Kind::Lam;
    mf.lam = build_lam_mesh(region, fine, coarse,
                            {double(lo), double(hi)});
    save_mesh(mf, out);
    std::cout << "wrote " << out << " nodes=" << mf.lam.nodes.size()
              << " faces=" << mf.lam.faces.size() << "\n";
}

void cmd_mesh_stats(const std::string& path) {
    MeshFile mf = load_mesh(path);
    MeshRef ref = mf.ref();
    std::cout << "kind=" << (mf.kind == MeshFile::Kind::Multi ? "multi" : "lam")
              << "\n";
    std::cout << "nodes=" << ref.nodes->size() << "\n";
    std::cout << "faces=" << ref.faces->size() << "\n";
    std::cout << "edges=" << ref.edges->size() << "\n";
    if (mf.kind == MeshFile::Kind::Multi) {
        // per-level V/E/F and the Euler characteristic
        for (int l = 0; l <= mf.multi.finest_level; ++l) {
            int64_t v = 10 * (int64_t(1) << (2 * l)) + 2;
            int64_t e = 0;
            for (const auto& te : mf.multi.edge_list)
                if (te.level == l) ++e;
            int64_t f = 20 * (int64_t(1) << (2 * l));
            std::cout << "level " << l << ": V=" << v << " E=" << e
                      << " F=" << f << " V-E+F=" << (v - e + f) << "\n";
        }
    } else {
        std::cout << "region=" << mf.lam.region_name
                  << " fine=" << mf.lam.fine_level
                  << " coarse=" << mf.lam.coarse_level << "\n";
    }
    std::cout << "couplings=" << mf.couplings.size() << "\n";
}

void cmd_mesh_couple(const std::string& grid_str, const std::string& mesh_path,
                     const std::string& out) {
    auto [h, w] = parse_range(grid_str, 'x', "--grid");
    MeshFile mf = load_mesh(mesh_path);
    GridSpec g = GridSpec::global(h, w);
    MeshRef ref = mf.ref();
    mf.couplings.push_back(grid_to_mesh_edges(g, ref));
    mf.couplings.push_back(mesh_to_grid_edges(g, ref));
    save_mesh(mf, out);
    std::cout << "wrote " << out << " couplings=" << mf.couplings.size()
              << "\n";
}

// ---- data ----

void cmd_data_synth(uint64_t seed, const std::string& years, int64_t h,
                    int64_t w, const std::string& out) {
    auto [lo, hi] = parse_range(years, ':', "--years");
    DatacubeSlab cube = synth_cube(seed, lo, hi, h, w);
    save_cube(cube, out);
    std::cout << "wrote " << out << " T=" << cube.t() << " H=" << cube.h()
              << " W=" << cube.w()
              << " prevalence=" << fire_prevalence(cube) << "\n";
}

void cmd_data_stats(const std::string& path) {
    DatacubeSlab cube = load_cube(path);
    std::cout << "dims T=" << cube.t() << " H=" << cube.h()
              << " W=" << cube.w() << "\n";
    std::cout << "years " << cube.year_of(0) << ".."
              << cube.year_of(cube.t() - 1) << "\n";
    std::cout << "fire prevalence (land) = " << fire_prevalence(cube) << "\n";
    for (const auto& v : cube.vars) {
        double sum = 0, sum2 = 0;
        int64_t n = 0;
        for (float x : v.values.data)
            if (std::isfinite(x)) {
                sum += x;
                sum2 += double(x) * double(x);
                ++n;
            }
        double mean = n ? sum / double(n) : 0;
        double var = n ? sum2 / double(n) - mean * mean : 0;
        std::cout << v.name << (v.is_static ? " [static]" : "")
                  << ": finite=" << n << " mean=" << mean
                  << " std=" << std::sqrt(std::max(0.0, var)) << "\n";
    }
}

void cmd_data_validate(const std::string& path) {
    DatacubeSlab cube = load_cube(path);
    require(cube.t() % kPeriodsPerYear == 0,
            "validate: time axis is not whole years");
    auto land = cube.land_mask();
    int64_t nland = 0;
    for (uint8_t m : land) nland += m;
    require(nland > 0, "validate: no land cells");
    for (float v : cube.var("gwis_ba").values.data)
        require(!(v < 0.0f), "validate: negative burned area");
    std::cout << "ok\n";
}

// ---- shared pipeline helpers ----

struct LoadedMesh {
    MeshFile file;
    CouplingGraph g2m, m2g;
};

/// Load the mesh and find or compute its couplings for the reduced grid.
LoadedMesh load_mesh_for(const std::string& path, const GridSpec& embed_grid) {
    LoadedMesh lm;
    lm.file = load_mesh(path);
    MeshRef ref = lm.file.ref();
    bool have_g2m = false, have_m2g = false;
    for (const auto& c : lm.file.couplings) {
        if (!(c.grid == embed_grid)) continue;
        if (c.direction == CouplingGraph::Dir::GridToMesh && !have_g2m) {
            lm.g2m = c;
            have_g2m = true;
        }
        if (c.direction == CouplingGraph::Dir::MeshToGrid && !have_m2g) {
            lm.m2g = c;
            have_m2g = true;
        }
    }
    if (!have_g2m) lm.g2m = grid_to_mesh_edges(embed_grid, ref);
    if (!have_m2g) lm.m2g = mesh_to_grid_edges(embed_grid, ref);
    return lm;
}

std::vector<uint8_t> build_loss_mask(const DatacubeSlab& cube,
                                     const std::string& region_path) {
    std::vector<uint8_t> mask = cube.land_mask();
    if (!region_path.empty()) {
        RegionMask region = load_region(region_path);
        require(region.grid == cube.grid, "region grid mismatch with cube");
        for (size_t i = 0; i < mask.size(); ++i)
            mask[i] = (mask[i] && region.mask[i]) ? 1 : 0;
    }
    return mask;
}

// ---- train ----

void cmd_train(const json& rc, const std::string& cube_path,
               const std::string& mesh_path, int ts, int horizon, int overlap,
               int epochs, double lr, double weight_decay, uint64_t seed,
               const std::string& region_path, const std::string& out_dir,
               const std::string& train_years, int val_year, int test_year,
               int embed_channels, int mesh_hidden, int layers,
               int batch_size) {
    require(horizon == 1 || horizon == 2 || horizon == 4 || horizon == 8 ||
                horizon == 16 || horizon == 24,
            "train: --horizon must be one of {1,2,4,8,16,24}");
    require(overlap >= 0 && overlap < ts,
            "train: --overlap must be in [0, ts)");
    auto [ty_lo, ty_hi] = parse_range(train_years, ':', "--train-years");

    DatacubeSlab cube = load_cube(cube_path);
    auto train_t = train_time_indices(cube, ty_lo, ty_hi);
    require(!train_t.empty(), "train: no training years in cube");
    standardize(cube, train_t);

    FireCastNetConfig cfg;
    cfg.ts = ts;
    cfg.grid_h = cube.h();
    cfg.grid_w = cube.w();
    cfg.embed_channels = embed_channels;
    cfg.mesh_hidden = mesh_hidden;
    cfg.processor_layers = layers;
    cfg.validate();

    LoadedMesh lm = load_mesh_for(mesh_path, cfg.embed_grid());
    auto ctx = MeshContext<float>::build(lm.file.ref(), lm.g2m, lm.m2g);

    auto samples = make_samples(cube, ts, horizon, ts - overlap);
    auto split = split_by_years(cube, samples, ty_lo, ty_hi, val_year,
                                test_year);
    require(!split.train.empty(), "train: empty training split");

    std::vector<uint8_t> mask = build_loss_mask(cube, region_path);

    TrainConfig tc;
    tc.epochs = epochs;
    tc.base_lr = lr;
    tc.weight_decay = weight_decay;
    tc.seed = seed;
    tc.batch_size = batch_size;
    if (epochs < 50) tc.sgdr_cycles = {epochs};  // short runs: single cycle
    tc.validate();

    fs::create_directories(out_dir);
    write_json_file(out_dir + "/run_config.json", rc);
    std::ofstream log(out_dir + "/metrics.jsonl");
    require(log.good(), "cannot open " + out_dir + "/metrics.jsonl");

    ParamStore<float> ps = firecastnet_params<float>(cfg);
    ps.init(seed);

    TrainResult res = train_loop(cfg, ps, ctx, cube, split.train, split.val,
                                 tc, mask, &log);

    json extra = rc;
    extra["train_years"] = {ty_lo, ty_hi};
    extra["val_year"] = val_year;
    extra["test_year"] = test_year;
    extra["horizon"] = horizon;
    extra["overlap"] = overlap;
    extra["model_id"] = "firecastnet";
    json best_extra = extra;
    best_extra["best_epoch"] = res.best_epoch;
    best_extra["best_val_auprc"] = res.best_val_auprc;
    save_checkpoint(out_dir + "/best.ckpt", cfg.to_json(), seed,
                    res.best_epoch, res.best_params, best_extra);
    save_checkpoint(out_dir + "/last.ckpt", cfg.to_json(), seed, epochs - 1,
                    ps, extra);
    std::cout << "best epoch " << res.best_epoch << " val_auprc "
              << res.best_val_auprc << "\n";
}

// ---- predict ----

void cmd_predict(const json& rc, const std::string& ckpt_path,
                 const std::string& cube_path, const std::string& mesh_path,
                 int horizon, const std::string& out_dir, bool export_map) {
    Checkpoint ck = load_checkpoint(ckpt_path);
    FireCastNetConfig cfg = FireCastNetConfig::from_json(ck.config);
    if (horizon <= 0) horizon = ck.extra.at("horizon").get<int>();
    int ty_lo = ck.extra.at("train_years")[0].get<int>();
    int ty_hi = ck.extra.at("train_years")[1].get<int>();
    int test_year = ck.extra.at("test_year").get<int>();
    int overlap = ck.extra.value("overlap", 0);

    DatacubeSlab cube = load_cube(cube_path);
    require(cube.h() == cfg.grid_h && cube.w() == cfg.grid_w,
            "predict: cube dims do not match the checkpoint config");
    auto train_t = train_time_indices(cube, ty_lo, ty_hi);
    require(!train_t.empty(), "predict: checkpoint train years not in cube");
    standardize(cube, train_t);

    LoadedMesh lm = load_mesh_for(mesh_path, cfg.embed_grid());
    auto ctx = MeshContext<float>::build(lm.file.ref(), lm.g2m, lm.m2g);

    auto samples = make_samples(cube, cfg.ts, horizon, cfg.ts - overlap);
    std::vector<SampleIdx> test;
    for (const auto& s : samples)
        if (cube.year_of(s.target_t()) == test_year) test.push_back(s);
    require(!test.empty(), "predict: no samples target the test year");

    Tensor<float> pos = positional_channels(cube.grid);
    fs::create_directories(out_dir);
    std::string model_id = ck.extra.value("model_id", "firecastnet");
    for (const auto& s : test) {
        Tensor<float> x = make_input(cube, s, pos);
        Tape<float> t;
        TapeParams<float> p(t, ck.params);
        auto logits = firecastnet_forward(t, cfg, ctx, p, t.leaf(x));
        Tensor<float> z = t.val(logits);
        Prediction pred;
        pred.time = s.target_t();
        pred.date = cube.times[static_cast<size_t>(s.target_t())];
        pred.horizon = horizon;
        pred.model_id = model_id;
        pred.run_config = rc;
        pred.scores = Tensor<float>::zeros({cube.h(), cube.w()});
        for (int64_t i = 0; i < z.numel(); ++i)
            pred.scores.data[i] =
                1.0f / (1.0f + std::exp(-z.data[i]));  // sigmoid probabilities
        std::ostringstream stem;
        stem << out_dir << "/pred_" << std::setw(6) << std::setfill('0')
             << s.target_t();
        save_prediction(pred, stem.str());
        if (export_map) export_danger_map(pred.scores, stem.str() + ".pgm");
    }
    std::cout << "wrote " << test.size() << " prediction grids to " << out_dir
              << "\n";
}

// ---- eval / baseline ----

std::map<int64_t, Tensor<float>> load_prediction_dir(const std::string& dir,
                                                     int* horizon,
                                                     std::string* model_id) {
    std::map<int64_t, Tensor<float>> preds;
    std::vector<std::string> stems;
    for (const auto& e : fs::directory_iterator(dir)) {
        auto p = e.path();
        if (p.extension() == ".json" && p.stem().string().rfind("pred_", 0) == 0)
            stems.push_back((p.parent_path() / p.stem()).string());
    }
    require(!stems.empty(), "no pred_*.json files in " + dir);
    std::sort(stems.begin(), stems.end());
    for (const auto& stem : stems) {
        Prediction p = load_prediction(stem);
        preds[p.time] = p.scores;
        if (horizon) *horizon = p.horizon;
        if (model_id) *model_id = p.model_id;
    }
    return preds;
}

void cmd_eval(const json& rc, const std::string& pred_dir,
              const std::string& cube_path,
              const std::vector<std::string>& region_paths,
              const std::string& out) {
    DatacubeSlab cube = load_cube(cube_path);
    int horizon = 0;
    std::string model_id;
    auto preds = load_prediction_dir(pred_dir, &horizon, &model_id);
    std::vector<RegionMask> regions;
    for (const auto& rp : region_paths) {
        regions.push_back(load_region(rp));
        require(regions.back().grid == cube.grid,
                "eval: region grid mismatch: " + rp);
    }
    EvalReport rep = evaluate(cube, preds, horizon, model_id, regions);
    json j = rep.to_json();
    j["run_config"] = rc;
    write_json_file(out, j);
    std::cout << "global auprc "
              << (rep.global.valid ? std::to_string(rep.global.value) : "null")
              << "\n";
}

void cmd_baseline(const json& rc, const std::string& cube_path,
                  const std::string& kind, int test_year,
                  const std::string& out) {
    DatacubeSlab cube = load_cube(cube_path);
    if (test_year <= 0) test_year = cube.year_of(cube.t() - 1);
    require(cube.year_of(0) < test_year,
            "baseline: no years precede the test year");
    auto land = cube.land_mask();
    const auto& ba = cube.var("gwis_ba").values;
    int64_t hw = cube.h() * cube.w();
    std::vector<double> scores;
    std::vector<uint8_t> labels;
    for (int64_t t = 0; t < cube.t(); ++t) {
        if (cube.year_of(t) != test_year) continue;
        int period = int(t % kPeriodsPerYear);
        for (int64_t g = 0; g < hw; ++g) {
            if (!land[size_t(g)]) continue;
            int p = kind == "anyfire"
                        ? naive_anyfire(cube, g, period, test_year)
                        : naive_majority(cube, g, period, test_year);
            scores.push_back(double(p));
            labels.push_back(ba.data[t * hw + g] > 0.0f ? 1 : 0);
        }
    }
    ApResult ap = average_precision(scores, labels);
    json j;
    j["kind"] = kind;
    j["test_year"] = test_year;
    j["auprc"] = ap_to_json(ap);
    j["n"] = scores.size();
    j["run_config"] = rc;
    write_json_file(out, j);
    std::cout << kind << " auprc "
              << (ap.valid ? std::to_string(ap.value) : "null") << "\n";
}

// ---- attribute ----

void cmd_attribute(const json& rc, const std::string& ckpt_path,
                   const std::string& cube_path, const std::string& mesh_path,
                   int horizon, int steps, const std::string& out) {
    Checkpoint ck = load_checkpoint(ckpt_path);
    FireCastNetConfig cfg = FireCastNetConfig::from_json(ck.config);
    if (horizon <= 0) horizon = ck.extra.at("horizon").get<int>();
    int ty_lo = ck.extra.at("train_years")[0].get<int>();
    int ty_hi = ck.extra.at("train_years")[1].get<int>();
    int test_year = ck.extra.at("test_year").get<int>();

    DatacubeSlab cube = load_cube(cube_path);
    require(cube.h() == cfg.grid_h && cube.w() == cfg.grid_w,
            "attribute: cube dims do not match the checkpoint config");
    auto train_t = train_time_indices(cube, ty_lo, ty_hi);
    standardize(cube, train_t);

    LoadedMesh lm = load_mesh_for(mesh_path, cfg.embed_grid());
    auto ctx = MeshContext<double>::build(lm.file.ref(), lm.g2m, lm.m2g);
    ParamStore<double> ps = ck.params.cast<double>();

    // first sample targeting the test year at this horizon
    auto samples = make_samples(cube, cfg.ts, horizon, cfg.ts);
    const SampleIdx* pick = nullptr;
    for (const auto& s : samples)
        if (cube.year_of(s.target_t()) == test_year) {
            pick = &s;
            break;
        }
    require(pick != nullptr, "attribute: no sample targets the test year");

    Tensor<float> pos = positional_channels(cube.grid);
    Tensor<float> xf = make_input(cube, *pick, pos);
    Tensor<double> x = Tensor<double>::zeros(xf.shape);
    for (int64_t i = 0; i < xf.numel(); ++i) x.data[i] = double(xf.data[i]);

    AttributionReport rep =
        attribute_sample(cfg, ctx, ps, x, steps, cube.land_mask());
    json j = rep.to_json();
    j["horizon"] = horizon;
    j["target_time"] = pick->target_t();
    j["run_config"] = rc;
    write_json_file(out, j);
    std::cout << "wrote " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seasonal fire-danger forecasting toolkit"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");  // frees -h for `data synth --h`
    int threads = 0;
    app.add_option("--threads", threads,
                   "worker threads (1 = bitwise deterministic; env "
                   "FIRECAST_THREADS as fallback)");

    // mesh
    auto* mesh = app.add_subcommand("mesh", "icosahedral mesh tools");
    mesh->require_subcommand(1);
    int levels = 6;
    std::string mesh_out, region_path, buffer_km = "400,800", mesh_path;
    int fine = 6, coarse = 3;
    auto* mb = mesh->add_subcommand("build", "build a uniform multi-mesh");
    mb->add_option("--levels", levels, "finest refinement level")
        ->check(CLI::Range(0, 8));
    mb->add_option("--out", mesh_out, "output SFMESH path")->required();
    auto* ml = mesh->add_subcommand("build-lam", "build a local-area mesh");
    ml->add_option("--region", region_path, "SFRM region mask")->required();
    ml->add_option("--fine", fine, "level inside the region")->required();
    ml->add_option("--coarse", coarse, "level outside the buffer")->required();
    ml->add_option("--buffer-km", buffer_km, "ring distances MIN,MAX in km");
    ml->add_option("--out", mesh_out, "output SFMESH path")->required();
    std::string stats_path;
    auto* ms = mesh->add_subcommand("stats", "print mesh statistics");
    ms->add_option("path", stats_path, "SFMESH path")->required();
    std::string couple_grid;
    auto* mc = mesh->add_subcommand("couple", "attach grid couplings");
    mc->add_option("--grid", couple_grid, "grid as HxW")->required();
    mc->add_option("--mesh", mesh_path, "input SFMESH path")->required();
    mc->add_option("--out", mesh_out, "output SFMESH path")->required();

    // data
    auto* data = app.add_subcommand("data", "datacube tools");
    data->require_subcommand(1);
    uint64_t seed = 7;
    std::string years = "2002:2019", data_out, data_path;
    int64_t gh = 64, gw = 128;
    auto* ds = data->add_subcommand("synth", "generate a synthetic datacube");
    ds->add_option("--seed", seed, "generator seed");
    ds->add_option("--years", years, "year range A:B inclusive");
    ds->add_option("--h", gh, "grid height");
    ds->add_option("--w", gw, "grid width");
    ds->add_option("--out", data_out, "output SFDC path")->required();
    auto* dst = data->add_subcommand("stats", "print datacube statistics");
    dst->add_option("path", data_path, "SFDC path")->required();
    auto* dv = data->add_subcommand("validate", "validate a datacube file");
    dv->add_option("path", data_path, "SFDC path")->required();

    // train
    auto* tr = app.add_subcommand("train", "train FireCastNet");
    std::string cube_path, tr_mesh, tr_region, tr_out, train_years = "2002:2017";
    int ts = 6, horizon = 1, overlap = 0, epochs = 50;
    int val_year = 2018, test_year = 2019;
    int embed_channels = 64, mesh_hidden = 64, layers = 12, batch_size = 1;
    double lr = 1e-3, weight_decay = 1e-7;
    uint64_t tr_seed = 17;
    tr->add_option("--cube", cube_path, "SFDC datacube")->required();
    tr->add_option("--mesh", tr_mesh, "SFMESH mesh")->required();
    tr->add_option("--ts", ts, "input window length")
        ->check(CLI::IsMember({6, 12, 24}));
    tr->add_option("--horizon", horizon, "lead time in periods")
        ->check(CLI::IsMember({1, 2, 4, 8, 16, 24}));
    tr->add_option("--overlap", overlap, "periods shared by adjacent windows");
    tr->add_option("--epochs", epochs, "training epochs");
    tr->add_option("--lr", lr, "base learning rate");
    tr->add_option("--weight-decay", weight_decay, "decoupled weight decay");
    tr->add_option("--seed", tr_seed, "training seed");
    tr->add_option("--region", tr_region, "SFRM region mask for LAM loss");
    tr->add_option("--out", tr_out, "output directory")->required();
    tr->add_option("--train-years", train_years, "training year range A:B");
    tr->add_option("--val-year", val_year, "validation year");
    tr->add_option("--test-year", test_year, "test year");
    tr->add_option("--embed-channels", embed_channels, "cube embedding width");
    tr->add_option("--mesh-hidden", mesh_hidden, "mesh latent width");
    tr->add_option("--layers", layers, "processor layers");
    tr->add_option("--batch", batch_size, "batch size");

    // predict
    auto* pr = app.add_subcommand("predict", "write test-year predictions");
    std::string pr_ckpt, pr_cube, pr_mesh, pr_out;
    int pr_horizon = 0;
    bool export_map = false;
    pr->add_option("--ckpt", pr_ckpt, "SFCKPT checkpoint")->required();
    pr->add_option("--cube", pr_cube, "SFDC datacube")->required();
    pr->add_option("--mesh", pr_mesh, "SFMESH mesh")->required();
    pr->add_option("--horizon", pr_horizon,
                   "lead time (default: from checkpoint)");
    pr->add_option("--out", pr_out, "output directory")->required();
    pr->add_flag("--export-map", export_map,
                 "also write 8-bit grayscale danger maps");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate predictions");
    std::string ev_pred, ev_cube, ev_out = "report.json";
    std::vector<std::string> ev_regions;
    ev->add_option("--pred", ev_pred, "prediction directory")->required();
    ev->add_option("--cube", ev_cube, "SFDC datacube")->required();
    ev->add_option("--regions", ev_regions, "SFRM region masks");
    ev->add_option("--out", ev_out, "output report path");

    // baseline
    auto* bl = app.add_subcommand("baseline", "naive seasonal baselines");
    std::string bl_cube, bl_kind, bl_out = "report.json";
    int bl_test_year = 0;
    bl->add_option("--cube", bl_cube, "SFDC datacube")->required();
    bl->add_option("--kind", bl_kind, "baseline kind")
        ->check(CLI::IsMember({"anyfire", "majority"}))
        ->required();
    bl->add_option("--test-year", bl_test_year,
                   "test year (default: last cube year)");
    bl->add_option("--out", bl_out, "output report path");

    // attribute
    auto* at = app.add_subcommand("attribute", "integrated-gradients report");
    std::string at_ckpt, at_cube, at_mesh, at_out = "report.json";
    int at_horizon = 0, at_steps = 200;
    at->add_option("--ckpt", at_ckpt, "SFCKPT checkpoint")->required();
    at->add_option("--cube", at_cube, "SFDC datacube")->required();
    at->add_option("--mesh", at_mesh, "SFMESH mesh")->required();
    at->add_option("--horizon", at_horizon,
                   "lead time (default: from checkpoint)");
    at->add_option("--steps", at_steps, "Riemann steps")->check(CLI::Range(1, 100000));
    at->add_option("--out", at_out, "output report path");

    // let --threads reach the top-level option from any subcommand
    for (auto* sc : {mesh, data, tr, pr, ev, bl, at}) sc->fallthrough();
    for (auto* sc : {mb, ml, ms, mc, ds, dst, dv}) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints the message / help text
        return code == 0 ? 0 : 1;
    }

    try {
        resolve_threads(threads);
        if (mb->parsed()) {
            json rc = run_config("mesh build",
                                 {{"levels", levels}, {"out", mesh_out}});
            print_config(rc);
            cmd_mesh_build(levels, mesh_out);
        } else if (ml->parsed()) {
            json rc = run_config("mesh build-lam",
                                 {{"region", region_path},
                                  {"fine", fine},
                                  {"coarse", coarse},
                                  {"buffer_km", buffer_km},
                                  {"out", mesh_out}});
            print_config(rc);
            cmd_mesh_build_lam(region_path, fine, coarse, buffer_km, mesh_out);
        } else if (ms->parsed()) {
            print_config(run_config("mesh stats", {{"path", stats_path}}));
            cmd_mesh_stats(stats_path);
        } else if (mc->parsed()) {
            json rc = run_config("mesh couple", {{"grid", couple_grid},
                                                {"mesh", mesh_path},
                                                {"out", mesh_out}});
            print_config(rc);
            cmd_mesh_couple(couple_grid, mesh_path, mesh_out);
        } else if (ds->parsed()) {
            json rc = run_config("data synth", {{"seed", seed},
                                                {"years", years},
                                                {"h", gh},
                                                {"w", gw},
                                                {"out", data_out}});
            print_config(rc);
            cmd_data_synth(seed, years, gh, gw, data_out);
        } else if (dst->parsed()) {
            print_config(run_config("data stats", {{"path", data_path}}));
            cmd_data_stats(data_path);
        } else if (dv->parsed()) {
            print_config(run_config("data validate", {{"path", data_path}}));
            cmd_data_validate(data_path);
        } else if (tr->parsed()) {
            json rc = run_config(
                "train",
                {{"cube", cube_path},       {"mesh", tr_mesh},
                 {"ts", ts},                {"horizon", horizon},
                 {"overlap", overlap},      {"epochs", epochs},
                 {"lr", lr},                {"weight_decay", weight_decay},
                 {"seed", tr_seed},         {"region", tr_region},
                 {"out", tr_out},           {"train_years", train_years},
                 {"val_year", val_year},    {"test_year", test_year},
                 {"embed_channels", embed_channels},
                 {"mesh_hidden", mesh_hidden},
                 {"layers", layers},        {"batch", batch_size},
                 {"threads", threads}});
            print_config(rc);
            cmd_train(rc, cube_path, tr_mesh, ts, horizon, overlap, epochs, lr,
                      weight_decay, tr_seed, tr_region, tr_out, train_years,
                      val_year, test_year, embed_channels, mesh_hidden, layers,
                      batch_size);
        } else if (pr->parsed()) {
            json rc = run_config("predict", {{"ckpt", pr_ckpt},
                                             {"cube", pr_cube},
                                             {"mesh", pr_mesh},
                                             {"horizon", pr_horizon},
                                             {"out", pr_out},
                                             {"export_map", export_map}});
            print_config(rc);
            cmd_predict(rc, pr_ckpt, pr_cube, pr_mesh, pr_horizon, pr_out,
                        export_map);
        } else if (ev->parsed()) {
            json rc = run_config("eval", {{"pred", ev_pred},
                                          {"cube", ev_cube},
                                          {"regions", ev_regions},
                                          {"out", ev_out}});
            print_config(rc);
            cmd_eval(rc, ev_pred, ev_cube, ev_regions, ev_out);
        } else if (bl->parsed()) {
            json rc = run_config("baseline", {{"cube", bl_cube},
                                              {"kind", bl_kind},
                                              {"test_year", bl_test_year},
                                              {"out", bl_out}});
            print_config(rc);
            cmd_baseline(rc, bl_cube, bl_kind, bl_test_year, bl_out);
        } else if (at->parsed()) {
            json rc = run_config("attribute", {{"ckpt", at_ckpt},
                                               {"cube", at_cube},
                                               {"mesh", at_mesh},
                                               {"horizon", at_horizon},
                                               {"steps", at_steps},
                                               {"out", at_out}});
            print_config(rc);
            cmd_attribute(rc, at_ckpt, at_cube, at_mesh, at_horizon, at_steps,
                          at_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
