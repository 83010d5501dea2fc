#ifndef FIRECAST_MODEL_HPP
#define FIRECAST_MODEL_HPP

#include <map>
#include <string>
#include <vector>

#include "firecast/coupling.hpp"
#include "firecast/data.hpp"
#include "firecast/geomesh.hpp"
#include "firecast/io.hpp"
#include "firecast/tape.hpp"

namespace firecast {

struct FireCastNetConfig {
    int ts = 6;
    int in_channels = kInputChannels;  // 14
    int embed_channels = 64;           // C'
    int spatial_reduction = 4;         // r
    int mesh_hidden = 64;              // C_mesh
    int processor_layers = 12;
    int mesh_node_in = 3;
    int mesh_edge_in = 4;
    int decoder_out_channels = 16;  // r^2
    int64_t grid_h = 64;
    int64_t grid_w = 128;

    void validate() const {
        require(ts == 6 || ts == 12 || ts == 24, "config: ts must be in {6,12,24}");
        require(decoder_out_channels == spatial_reduction * spatial_reduction,
                "config: decoder_out_channels must equal spatial_reduction^2");
        require(grid_h % spatial_reduction == 0 && grid_w % spatial_reduction == 0,
                "config: grid dims must be divisible by spatial_reduction");
        require(processor_layers >= 0, "config: negative processor layer count");
    }

    GridSpec embed_grid() const {
        return GridSpec::global(grid_h / spatial_reduction,
                                grid_w / spatial_reduction);
    }

    io::json to_json() const {
        return io::json{{"ts", ts},
                        {"in_channels", in_channels},
                        {"embed_channels", embed_channels},
                        {"spatial_reduction", spatial_reduction},
                        {"mesh_hidden", mesh_hidden},
                        {"processor_layers", processor_layers},
                        {"mesh_node_in", mesh_node_in},
                        {"mesh_edge_in", mesh_edge_in},
                        {"decoder_out_channels", decoder_out_channels},
                        {"grid_h", grid_h},
                        {"grid_w", grid_w}};
    }

    static FireCastNetConfig from_json(const io::json& j) {
        FireCastNetConfig c;
        c.ts = j.at("ts").get<int>();
        c.in_channels = j.at("in_channels").get<int>();
        c.embed_channels = j.at("embed_channels").get<int>();
        c.spatial_reduction = j.at("spatial_reduction").get<int>();
        c.mesh_hidden = j.at("mesh_hidden").get<int>();
        c.processor_layers = j.at("processor_layers").get<int>();
        c.mesh_node_in = j.at("mesh_node_in").get<int>();
        c.mesh_edge_in = j.at("mesh_edge_in").get<int>();
        c.decoder_out_channels = j.at("decoder_out_channels").get<int>();
        c.grid_h = j.at("grid_h").get<int64_t>();
        c.grid_w = j.at("grid_w").get<int64_t>();
        return c;
    }
};

/// Named parameter collection with deterministic iteration order (the
/// registration order). `kind` selects the initialization rule.
template <class T>
class ParamStore {
public:
    enum class Kind : uint8_t { Weight = 0, Bias = 1, LnScale = 2, LnShift = 3 };

    struct Entry {
        std::string name;
        Kind kind;
        int64_t fan_in;  // weights only
        Tensor<T> value;
    };

    void add(const std::string& name, Shape shape, Kind kind, int64_t fan_in = 0) {
        require(index_.find(name) == index_.end(), "duplicate parameter: " + name);
        index_[name] = entries_.size();
        entries_.push_back({name, kind, fan_in, Tensor<T>::zeros(std::move(shape))});
    }

    Tensor<T>& at(const std::string& name) {
        auto it = index_.find(name);
        require(it != index_.end(), "unknown parameter: " + name);
        return entries_[it->second].value;
    }
    const Tensor<T>& at(const std::string& name) const {
        auto it = index_.find(name);
        require(it != index_.end(), "unknown parameter: " + name);
        return entries_[it->second].value;
    }
    bool has(const std::string& name) const { return index_.count(name) > 0; }

    std::vector<Entry>& entries() { return entries_; }
    const std::vector<Entry>& entries() const { return entries_; }
    size_t size() const { return entries_.size(); }

    int64_t total_scalars() const {
        int64_t n = 0;
        for (const auto& e : entries_) n += e.value.numel();
        return n;
    }

    /// Uniform [-1/sqrt(fan_in), +1/sqrt(fan_in)] weights, zero biases,
    /// LayerNorm scale 1 / shift 0; fully determined by seed and the
    /// registration order.
    void init(uint64_t seed) {
        Rng rng(seed);
        for (auto& e : entries_) {
            switch (e.kind) {
                case Kind::Weight: {
                    require(e.fan_in > 0, "weight without fan_in: " + e.name);
                    double bound = 1.0 / std::sqrt(static_cast<double>(e.fan_in));
                    for (auto& v : e.value.data)
                        v = static_cast<T>(rng.uniform(-bound, bound));
                    break;
                }
                case Kind::Bias:
                case Kind::LnShift:
                    for (auto& v : e.value.data) v = T(0);
                    break;
                case Kind::LnScale:
                    for (auto& v : e.value.data) v = T(1);
                    break;
            }
        }
    }

    template <class U>
    ParamStore<U> cast() const {
        ParamStore<U> out;
        for (const auto& e : entries_)
            out.add_cast(e.name, static_cast<typename ParamStore<U>::Kind>(
                                     static_cast<uint8_t>(e.kind)),
                         e.fan_in, e.value.template cast<U>());
        return out;
    }

    void add_cast(const std::string& name, Kind kind, int64_t fan_in,
                  Tensor<T> value) {
        require(index_.find(name) == index_.end(), "duplicate parameter: " + name);
        index_[name] = entries_.size();
        entries_.push_back({name, kind, fan_in, std::move(value)});
    }

private:
    std::vector<Entry> entries_;
    std::map<std::string, size_t> index_;
};

/// All parameters pushed onto a tape as leaves, addressable by name.
template <class T>
class TapeParams {
public:
    TapeParams(Tape<T>& tape, const ParamStore<T>& store) : tape_(&tape) {
        for (const auto& e : store.entries()) {
            ids_[e.name] = tape.leaf(e.value);
            order_.push_back(e.name);
        }
    }

    typename Tape<T>::Id id(const std::string& name) const {
        auto it = ids_.find(name);
        require(it != ids_.end(), "unknown parameter: " + name);
        return it->second;
    }

    const std::vector<std::string>& order() const { return order_; }

    /// Substitute an externally created leaf (e.g. to differentiate with
    /// respect to one parameter).
    void override(const std::string& name, typename Tape<T>::Id id) {
        require(ids_.count(name) > 0, "unknown parameter: " + name);
        ids_[name] = id;
    }

private:
    Tape<T>* tape_;
    std::map<std::string, typename Tape<T>::Id> ids_;
    std::vector<std::string> order_;
};

namespace detail {

/// Register a Linear -> SiLU -> Linear [-> LayerNorm] block.
template <class T>
void add_mlp(ParamStore<T>& ps, const std::string& prefix, int64_t in,
             int64_t hidden, int64_t out, bool layer_norm) {
    using K = typename ParamStore<T>::Kind;
    ps.add(prefix + ".w1", {in, hidden}, K::Weight, in);
    ps.add(prefix + ".b1", {hidden}, K::Bias);
    ps.add(prefix + ".w2", {hidden, out}, K::Weight, hidden);
    ps.add(prefix + ".b2", {out}, K::Bias);
    if (layer_norm) {
        ps.add(prefix + ".ln_g", {out}, K::LnScale);
        ps.add(prefix + ".ln_b", {out}, K::LnShift);
    }
}

template <class T>
typename Tape<T>::Id mlp(Tape<T>& t, const TapeParams<T>& p,
                         const std::string& prefix, typename Tape<T>::Id x,
                         bool layer_norm) {
    auto h = t.silu(t.linear(x, p.id(prefix + ".w1"), p.id(prefix + ".b1")));
    auto y = t.linear(h, p.id(prefix + ".w2"), p.id(prefix + ".b2"));
    if (layer_norm) y = t.layer_norm(y, p.id(prefix + ".ln_g"), p.id(prefix + ".ln_b"));
    return y;
}

}  // namespace detail

/// Directed message-passing view of a tagged undirected edge union: both
/// directions of every edge, with sign-flipped displacement features.
struct DirectedMesh {
    std::vector<int32_t> src, tgt;  // [2E]
    Tensor<double> edge_features;   // [2E,4]
    int64_t num_nodes = 0;

    static DirectedMesh from(const MeshRef& mesh) {
        DirectedMesh d;
        d.num_nodes = static_cast<int64_t>(mesh.num_nodes());
        auto e = static_cast<int64_t>(mesh.edges->size());
        d.src.reserve(static_cast<size_t>(2 * e));
        d.tgt.reserve(static_cast<size_t>(2 * e));
        d.edge_features = Tensor<double>::zeros({2 * e, 4});
        for (int64_t i = 0; i < e; ++i) {
            const auto& ed = (*mesh.edges)[static_cast<size_t>(i)];
            const double* f = mesh.edge_features->ptr() + i * 4;
            d.src.push_back(ed.u);
            d.tgt.push_back(ed.v);
            double* fwd = d.edge_features.ptr() + (2 * i) * 4;
            fwd[0] = f[0];
            fwd[1] = f[1];
            fwd[2] = f[2];
            fwd[3] = f[3];
            d.src.push_back(ed.v);
            d.tgt.push_back(ed.u);
            double* rev = d.edge_features.ptr() + (2 * i + 1) * 4;
            rev[0] = f[0];
            rev[1] = -f[1];
            rev[2] = -f[2];
            rev[3] = -f[3];
        }
        return d;
    }
};

/// Precomputed immutable geometry consumed by the forward pass.
template <class T>
struct MeshContext {
    DirectedMesh directed;
    Tensor<T> node_features;      // [V,3]
    Tensor<T> mesh_edge_feats;    // [2E,4]
    std::vector<int32_t> g2m_src, g2m_tgt;
    Tensor<T> g2m_feats;          // [Eg,4]
    std::vector<int32_t> m2g_src, m2g_tgt;
    Tensor<T> m2g_feats;          // [Em,4]
    int64_t num_nodes = 0;
    int64_t embed_cells = 0;

    static MeshContext build(const MeshRef& mesh, const CouplingGraph& g2m,
                             const CouplingGraph& m2g) {
        require(g2m.direction == CouplingGraph::Dir::GridToMesh,
                "encoder coupling has the wrong direction");
        require(m2g.direction == CouplingGraph::Dir::MeshToGrid,
                "decoder coupling has the wrong direction");
        MeshContext ctx;
        ctx.directed = DirectedMesh::from(mesh);
        ctx.node_features = mesh.node_features->template cast<T>();
        ctx.mesh_edge_feats = ctx.directed.edge_features.template cast<T>();
        for (const auto& [s, t2] : g2m.edges) {
            ctx.g2m_src.push_back(s);
            ctx.g2m_tgt.push_back(t2);
        }
        ctx.g2m_feats = g2m.edge_features.template cast<T>();
        for (const auto& [s, t2] : m2g.edges) {
            ctx.m2g_src.push_back(s);
            ctx.m2g_tgt.push_back(t2);
        }
        ctx.m2g_feats = m2g.edge_features.template cast<T>();
        ctx.num_nodes = static_cast<int64_t>(mesh.num_nodes());
        ctx.embed_cells = g2m.grid.cells();
        return ctx;
    }
};

/// Register every FireCastNet parameter in deterministic order.
template <class T>
ParamStore<T> firecastnet_params(const FireCastNetConfig& cfg) {
    cfg.validate();
    using K = typename ParamStore<T>::Kind;
    ParamStore<T> ps;
    int64_t cp = cfg.embed_channels, cm = cfg.mesh_hidden;
    int64_t r = cfg.spatial_reduction;
    // cube embedding
    int64_t conv_fan = static_cast<int64_t>(cfg.ts) * cfg.in_channels * r * r;
    ps.add("embed.conv.w", {cp, cfg.ts, cfg.in_channels, r, r}, K::Weight, conv_fan);
    ps.add("embed.conv.b", {cp}, K::Bias);
    ps.add("embed.ln_g", {cp}, K::LnScale);
    ps.add("embed.ln_b", {cp}, K::LnShift);
    // encoder
    detail::add_mlp(ps, "enc.node_embed", cfg.mesh_node_in, cm, cm, true);
    detail::add_mlp(ps, "enc.edge", cp + cm + cfg.mesh_edge_in, cm, cm, true);
    detail::add_mlp(ps, "enc.update", 2 * cm, cm, cm, true);
    // processor
    detail::add_mlp(ps, "proc.edge_embed", cfg.mesh_edge_in, cm, cm, true);
    for (int l = 0; l < cfg.processor_layers; ++l) {
        std::string p = "proc." + std::to_string(l);
        detail::add_mlp(ps, p + ".edge", 3 * cm, cm, cm, true);
        detail::add_mlp(ps, p + ".node", 2 * cm, cm, cm, true);
    }
    // decoder (no LayerNorm on the logit-producing head)
    detail::add_mlp(ps, "dec.edge", cm + cfg.mesh_edge_in, cm, cm, true);
    detail::add_mlp(ps, "dec.update", cm + cp, cm, cfg.decoder_out_channels, false);
    return ps;
}

/// Full forward pass: cube embedding -> grid-to-mesh encoder -> mesh
/// processor -> mesh-to-grid decoder -> sub-pixel upscale. Returns the
/// tape id of the [H,W] logit map.
template <class T>
typename Tape<T>::Id firecastnet_forward(Tape<T>& t, const FireCastNetConfig& cfg,
                                         const MeshContext<T>& ctx,
                                         const TapeParams<T>& p,
                                         typename Tape<T>::Id x) {
    cfg.validate();
    const auto& xv = t.val(x);
    require(xv.ndim() == 4 && xv.dim(0) == cfg.ts && xv.dim(1) == cfg.in_channels &&
                xv.dim(2) == cfg.grid_h && xv.dim(3) == cfg.grid_w,
            "forward: input shape " + shape_str(xv.shape) +
                " does not match config");
    int64_t r = cfg.spatial_reduction;
    int64_t hp = cfg.grid_h / r, wp = cfg.grid_w / r;
    require(ctx.embed_cells == hp * wp,
            "forward: coupling graphs were built for a different grid");

    // cube embedding: [ts,14,H,W] -> [C',H',W'] -> rows + LayerNorm
    auto emb = t.conv3d_patch(x, p.id("embed.conv.w"), p.id("embed.conv.b"),
                              cfg.ts, r, r);
    auto grid_rows = t.layer_norm(t.chw_to_rows(emb), p.id("embed.ln_g"),
                                  p.id("embed.ln_b"));

    // encoder
    auto node_feats = t.leaf(ctx.node_features);
    auto node_embed = detail::mlp(t, p, "enc.node_embed", node_feats, true);
    auto g2m_feats = t.leaf(ctx.g2m_feats);
    auto enc_in = t.concat_cols({t.gather_rows(grid_rows, ctx.g2m_src),
                                 t.gather_rows(node_embed, ctx.g2m_tgt), g2m_feats});
    auto enc_msg = detail::mlp(t, p, "enc.edge", enc_in, true);
    auto enc_agg = t.scatter_sum(enc_msg, ctx.g2m_tgt, ctx.num_nodes);
    auto h = detail::mlp(t, p, "enc.update", t.concat_cols({node_embed, enc_agg}),
                         true);

    // processor with persistent edge latents and residual updates
    auto edge_latent = detail::mlp(t, p, "proc.edge_embed",
                                   t.leaf(ctx.mesh_edge_feats), true);
    for (int l = 0; l < cfg.processor_layers; ++l) {
        std::string pre = "proc." + std::to_string(l);
        auto msg_in = t.concat_cols({t.gather_rows(h, ctx.directed.src),
                                     t.gather_rows(h, ctx.directed.tgt), edge_latent});
        auto msg = detail::mlp(t, p, pre + ".edge", msg_in, true);
        edge_latent = t.add(edge_latent, msg);
        auto agg = t.scatter_sum(msg, ctx.directed.tgt, ctx.num_nodes);
        auto upd = detail::mlp(t, p, pre + ".node", t.concat_cols({h, agg}), true);
        h = t.add(h, upd);
    }

    // decoder: 3 messages per cell, conditioned on the cell's embedded input
    auto m2g_feats = t.leaf(ctx.m2g_feats);
    auto dec_in = t.concat_cols({t.gather_rows(h, ctx.m2g_src), m2g_feats});
    auto dec_msg = detail::mlp(t, p, "dec.edge", dec_in, true);
    auto dec_agg = t.scatter_sum(dec_msg, ctx.m2g_tgt, ctx.embed_cells);
    auto cells = detail::mlp(t, p, "dec.update", t.concat_cols({dec_agg, grid_rows}),
                             false);

    // sub-pixel upscale to full resolution
    auto maps = t.rows_to_chw(cells, hp, wp);
    auto up = t.pixel_shuffle(maps, r);
    return t.reshape(up, {cfg.grid_h, cfg.grid_w});
}

// ---- recurrent baseline cells ----

/// Register Conv-GRU parameters: 6 kernels [Ch,Cin|Ch,k,k] + 3 biases.
template <class T>
ParamStore<T> conv_gru_params(int64_t cin, int64_t ch, int64_t k) {
    using K = typename ParamStore<T>::Kind;
    ParamStore<T> ps;
    auto addw = [&](const std::string& n, int64_t ci) {
        ps.add(n, {ch, ci, k, k}, K::Weight, ci * k * k);
    };
    addw("w_xz", cin);
    addw("w_hz", ch);
    addw("w_xr", cin);
    addw("w_hr", ch);
    addw("w_xh", cin);
    addw("w_hh", ch);
    ps.add("b_z", {ch}, K::Bias);
    ps.add("b_r", {ch}, K::Bias);
    ps.add("b_h", {ch}, K::Bias);
    return ps;
}

/// z = sigma(Wxz*x + Whz*h + bz); r = sigma(Wxr*x + Whr*h + br);
/// h~ = tanh(Wxh*x + r (.) (Whh*h) + bh); h' = (1-z)(.)h + z(.)h~.
template <class T>
typename Tape<T>::Id conv_gru_step(Tape<T>& t, const TapeParams<T>& p,
                                   typename Tape<T>::Id x, typename Tape<T>::Id h) {
    auto z = t.sigmoid(t.add(t.conv2d_same(x, p.id("w_xz"), p.id("b_z")),
                             t.conv2d_same(h, p.id("w_hz"))));
    auto r = t.sigmoid(t.add(t.conv2d_same(x, p.id("w_xr"), p.id("b_r")),
                             t.conv2d_same(h, p.id("w_hr"))));
    auto cand = t.tanh_(t.add(t.conv2d_same(x, p.id("w_xh"), p.id("b_h")),
                              t.mul(r, t.conv2d_same(h, p.id("w_hh")))));
    // (1-z).h + z.h~  ==  h + z.(h~ - h)
    return t.add(h, t.mul(z, t.sub(cand, h)));
}

/// Register Conv-LSTM parameters: 8 kernels + 4 biases (gates i,f,o,g).
template <class T>
ParamStore<T> conv_lstm_params(int64_t cin, int64_t ch, int64_t k) {
    using K = typename ParamStore<T>::Kind;
    ParamStore<T> ps;
    for (const char* g : {"i", "f", "o", "g"}) {
        ps.add(std::string("w_x") + g, {ch, cin, k, k}, K::Weight, cin * k * k);
        ps.add(std::string("w_h") + g, {ch, ch, k, k}, K::Weight, ch * k * k);
        ps.add(std::string("b_") + g, {ch}, K::Bias);
    }
    return ps;
}

template <class T>
struct LstmState {
    typename Tape<T>::Id h, c;
};

template <class T>
LstmState<T> conv_lstm_step(Tape<T>& t, const TapeParams<T>& p,
                            typename Tape<T>::Id x, LstmState<T> s) {
    auto gate = [&](const char* g) {
        return t.add(t.conv2d_same(x, p.id(std::string("w_x") + g),
                                   p.id(std::string("b_") + g)),
                     t.conv2d_same(s.h, p.id(std::string("w_h") + g)));
    };
    auto i = t.sigmoid(gate("i"));
    auto f = t.sigmoid(gate("f"));
    auto o = t.sigmoid(gate("o"));
    auto g = t.tanh_(gate("g"));
    auto c = t.add(t.mul(f, s.c), t.mul(i, g));
    auto h = t.mul(o, t.tanh_(c));
    return {h, c};
}

/// Dense GRU for the per-pixel baseline: x [N,I], h [N,Hd].
template <class T>
ParamStore<T> gru_params(int64_t in, int64_t hidden) {
    using K = typename ParamStore<T>::Kind;
    ParamStore<T> ps;
    auto addw = [&](const std::string& n, int64_t fi, int64_t fo) {
        ps.add(n, {fi, fo}, K::Weight, fi);
    };
    addw("w_xz", in, hidden);
    addw("w_hz", hidden, hidden);
    addw("w_xr", in, hidden);
    addw("w_hr", hidden, hidden);
    addw("w_xh", in, hidden);
    addw("w_hh", hidden, hidden);
    ps.add("b_z", {hidden}, K::Bias);
    ps.add("b_r", {hidden}, K::Bias);
    ps.add("b_h", {hidden}, K::Bias);
    return ps;
}

template <class T>
typename Tape<T>::Id gru_step(Tape<T>& t, const TapeParams<T>& p,
                              typename Tape<T>::Id x, typename Tape<T>::Id h) {
    auto z = t.sigmoid(t.add(t.linear(x, p.id("w_xz"), p.id("b_z")),
                             t.linear(h, p.id("w_hz"))));
    auto r = t.sigmoid(t.add(t.linear(x, p.id("w_xr"), p.id("b_r")),
                             t.linear(h, p.id("w_hr"))));
    auto cand = t.tanh_(t.add(t.linear(x, p.id("w_xh"), p.id("b_h")),
                              t.mul(r, t.linear(h, p.id("w_hh")))));
    return t.add(h, t.mul(z, t.sub(cand, h)));
}

/// Spatial flatten -> two-layer MLP halving the width -> scalar logit.
template <class T>
ParamStore<T> baseline_head_params(int64_t flat) {
    using K = typename ParamStore<T>::Kind;
    ParamStore<T> ps;
    int64_t mid = std::max<int64_t>(1, flat / 2);
    ps.add("head.w1", {flat, mid}, K::Weight, flat);
    ps.add("head.b1", {mid}, K::Bias);
    ps.add("head.w2", {mid, 1}, K::Weight, mid);
    ps.add("head.b2", {1}, K::Bias);
    return ps;
}

template <class T>
typename Tape<T>::Id baseline_head(Tape<T>& t, const TapeParams<T>& p,
                                   typename Tape<T>::Id h_flat) {
    auto mid = t.silu(t.linear(h_flat, p.id("head.w1"), p.id("head.b1")));
    return t.linear(mid, p.id("head.w2"), p.id("head.b2"));
}

// ---- checkpoint IO ----

inline void save_checkpoint(const std::string& path, const io::json& config,
                            uint64_t seed, int epoch,
                            const ParamStore<float>& ps,
                            const io::json& extra = io::json::object()) {
    auto f = io::open_out(path);
    io::write_magic(f, "SFCKPT01");
    io::json hdr;
    hdr["config"] = config;
    hdr["seed"] = seed;
    hdr["epoch"] = epoch;
    hdr["extra"] = extra;
    io::json reg = io::json::array();
    for (const auto& e : ps.entries())
        reg.push_back({{"name", e.name},
                       {"kind", static_cast<int>(e.kind)},
                       {"fan_in", e.fan_in},
                       {"shape", e.value.shape}});
    hdr["registry"] = reg;
    io::write_json_header(f, hdr);
    for (const auto& e : ps.entries()) io::write_vec(f, e.value.data);
    require(f.good(), "write failure: " + path);
}

struct Checkpoint {
    io::json config;
    uint64_t seed = 0;
    int epoch = 0;
    io::json extra;
    ParamStore<float> params;
};

inline Checkpoint load_checkpoint(const std::string& path) {
    auto f = io::open_in(path);
    io::check_magic(f, "SFCKPT01", path);
    io::json hdr = io::read_json_header(f);
    Checkpoint ck;
    ck.config = hdr.at("config");
    ck.seed = hdr.at("seed").get<uint64_t>();
    ck.epoch = hdr.at("epoch").get<int>();
    ck.extra = hdr.value("extra", io::json::object());
    for (const auto& r : hdr.at("registry")) {
        Shape shape = r.at("shape").get<Shape>();
        auto kind = static_cast<ParamStore<float>::Kind>(r.at("kind").get<int>());
        auto n = static_cast<size_t>(shape_numel(shape));
        ck.params.add_cast(r.at("name").get<std::string>(), kind,
                           r.at("fan_in").get<int64_t>(),
                           Tensor<float>(shape, io::read_vec<float>(f, n)));
    }
    return ck;
}

}  // namespace firecast

#endif  // FIRECAST_MODEL_HPP
