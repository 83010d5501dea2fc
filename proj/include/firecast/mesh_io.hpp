#ifndef FIRECAST_MESH_IO_HPP
#define FIRECAST_MESH_IO_HPP

#include <string>
#include <vector>

#include "firecast/coupling.hpp"
#include "firecast/geomesh.hpp"
#include "firecast/io.hpp"

namespace firecast {

/// On-disk mesh bundle: a uniform multi-mesh or a LAM mesh, plus any
/// number of attached coupling graphs. Container magic "SFMESH01".
struct MeshFile {
    enum class Kind : uint8_t { Multi = 0, Lam = 1 };

    Kind kind = Kind::Multi;
    MultiMesh multi;
    LamMesh lam;
    std::vector<CouplingGraph> couplings;

    MeshRef ref() const {
        return kind == Kind::Multi ? MeshRef(multi) : MeshRef(lam);
    }
};

namespace detail {

inline io::json grid_to_json(const GridSpec& g) {
    return io::json{{"height", g.height},       {"width", g.width},
                    {"lat_start", g.lat_start}, {"lat_step", g.lat_step},
                    {"lon_start", g.lon_start}, {"lon_step", g.lon_step}};
}

inline GridSpec grid_from_json(const io::json& j) {
    GridSpec g;
    g.height = j.at("height").get<int64_t>();
    g.width = j.at("width").get<int64_t>();
    g.lat_start = j.at("lat_start").get<double>();
    g.lat_step = j.at("lat_step").get<double>();
    g.lon_start = j.at("lon_start").get<double>();
    g.lon_step = j.at("lon_step").get<double>();
    return g;
}

inline void write_mesh_arrays(std::ostream& s, const std::vector<Vec3>& nodes,
                              const std::vector<Face>& faces,
                              const std::vector<TaggedEdge>& edges,
                              const Tensor<double>& node_feat,
                              const Tensor<double>& edge_feat) {
    std::vector<double> coords;
    coords.reserve(nodes.size() * 3);
    for (const auto& v : nodes) {
        coords.push_back(v.x);
        coords.push_back(v.y);
        coords.push_back(v.z);
    }
    io::write_vec(s, coords);
    std::vector<uint32_t> ftri;
    ftri.reserve(faces.size() * 3);
    for (const auto& f : faces)
        for (int32_t v : f) ftri.push_back(static_cast<uint32_t>(v));
    io::write_vec(s, ftri);
    std::vector<uint32_t> epairs;
    std::vector<uint8_t> etags;
    epairs.reserve(edges.size() * 2);
    etags.reserve(edges.size());
    for (const auto& e : edges) {
        epairs.push_back(static_cast<uint32_t>(e.u));
        epairs.push_back(static_cast<uint32_t>(e.v));
        etags.push_back(e.level);
    }
    io::write_vec(s, epairs);
    io::write_vec(s, etags);
    io::write_vec(s, node_feat.cast<float>().data);
    io::write_vec(s, edge_feat.cast<float>().data);
}

inline void read_mesh_arrays(std::istream& s, size_t nv, size_t nf, size_t ne,
                             std::vector<Vec3>& nodes, std::vector<Face>& faces,
                             std::vector<TaggedEdge>& edges,
                             Tensor<double>& node_feat, Tensor<double>& edge_feat) {
    auto coords = io::read_vec<double>(s, nv * 3);
    nodes.resize(nv);
    for (size_t i = 0; i < nv; ++i)
        nodes[i] = {coords[i * 3], coords[i * 3 + 1], coords[i * 3 + 2]};
    auto ftri = io::read_vec<uint32_t>(s, nf * 3);
    faces.resize(nf);
    for (size_t i = 0; i < nf; ++i)
        faces[i] = {static_cast<int32_t>(ftri[i * 3]),
                    static_cast<int32_t>(ftri[i * 3 + 1]),
                    static_cast<int32_t>(ftri[i * 3 + 2])};
    auto epairs = io::read_vec<uint32_t>(s, ne * 2);
    auto etags = io::read_vec<uint8_t>(s, ne);
    edges.resize(ne);
    for (size_t i = 0; i < ne; ++i)
        edges[i] = {static_cast<int32_t>(epairs[i * 2]),
                    static_cast<int32_t>(epairs[i * 2 + 1]), etags[i]};
    node_feat = Tensor<float>({static_cast<int64_t>(nv), 3},
                              io::read_vec<float>(s, nv * 3))
                    .cast<double>();
    edge_feat = Tensor<float>({static_cast<int64_t>(ne), 4},
                              io::read_vec<float>(s, ne * 4))
                    .cast<double>();
}

}  // namespace detail

inline void save_mesh(const MeshFile& mf, const std::string& path) {
    auto f = io::open_out(path);
    io::write_magic(f, "SFMESH01");
    io::json hdr;
    hdr["node_feature_channels"] = {"cos_lat", "sin_lon", "cos_lon"};
    hdr["edge_feature_channels"] = {"norm_length", "dx", "dy", "dz"};
    io::json cj = io::json::array();
    for (const auto& c : mf.couplings)
        cj.push_back({{"direction", c.direction == CouplingGraph::Dir::GridToMesh
                                        ? "grid_to_mesh"
                                        : "mesh_to_grid"},
                      {"grid", detail::grid_to_json(c.grid)},
                      {"edges", c.edges.size()}});
    hdr["couplings"] = cj;
    if (mf.kind == MeshFile::Kind::Multi) {
        const auto& m = mf.multi;
        hdr["kind"] = "multimesh";
        hdr["finest_level"] = m.finest_level;
        hdr["counts"] = {{"nodes", m.nodes.size()},
                         {"faces", m.faces.size()},
                         {"edges", m.edge_list.size()}};
        hdr["norm_len"] = m.norm_len;
        hdr["max_edge_arc"] = m.max_edge_arc;
        io::write_json_header(f, hdr);
        detail::write_mesh_arrays(f, m.nodes, m.faces, m.edge_list, m.node_features,
                                  m.edge_features);
    } else {
        const auto& m = mf.lam;
        hdr["kind"] = "lam";
        hdr["region_name"] = m.region_name;
        hdr["fine_level"] = m.fine_level;
        hdr["coarse_level"] = m.coarse_level;
        hdr["buffer_km"] = {m.buffer_km[0], m.buffer_km[1]};
        hdr["counts"] = {{"nodes", m.nodes.size()},
                         {"faces", m.faces.size()},
                         {"edges", m.edge_list.size()}};
        hdr["norm_len"] = m.norm_len;
        io::write_json_header(f, hdr);
        detail::write_mesh_arrays(f, m.nodes, m.faces, m.edge_list, m.node_features,
                                  m.edge_features);
        io::write_vec(f, m.face_levels);
        io::write_vec(f, m.face_depths);
    }
    for (const auto& c : mf.couplings) {
        std::vector<int32_t> pairs;
        pairs.reserve(c.edges.size() * 2);
        for (const auto& [src, tgt] : c.edges) {
            pairs.push_back(src);
            pairs.push_back(tgt);
        }
        io::write_vec(f, pairs);
        io::write_vec(f, c.edge_features.cast<float>().data);
    }
    require(f.good(), "write failure: " + path);
}

inline MeshFile load_mesh(const std::string& path) {
    auto f = io::open_in(path);
    io::check_magic(f, "SFMESH01", path);
    io::json hdr = io::read_json_header(f);
    MeshFile mf;
    auto nv = hdr.at("counts").at("nodes").get<size_t>();
    auto nf = hdr.at("counts").at("faces").get<size_t>();
    auto ne = hdr.at("counts").at("edges").get<size_t>();
    std::string kind = hdr.at("kind").get<std::string>();
    if (kind == "multimesh") {
        mf.kind = MeshFile::Kind::Multi;
        auto& m = mf.multi;
        m.finest_level = hdr.at("finest_level").get<int>();
        m.norm_len = hdr.at("norm_len").get<double>();
        m.max_edge_arc = hdr.at("max_edge_arc").get<double>();
        detail::read_mesh_arrays(f, nv, nf, ne, m.nodes, m.faces, m.edge_list,
                                 m.node_features, m.edge_features);
    } else if (kind == "lam") {
        mf.kind = MeshFile::Kind::Lam;
        auto& m = mf.lam;
        m.region_name = hdr.at("region_name").get<std::string>();
        m.fine_level = hdr.at("fine_level").get<int>();
        m.coarse_level = hdr.at("coarse_level").get<int>();
        m.buffer_km = {hdr.at("buffer_km")[0].get<double>(),
                       hdr.at("buffer_km")[1].get<double>()};
        m.norm_len = hdr.at("norm_len").get<double>();
        detail::read_mesh_arrays(f, nv, nf, ne, m.nodes, m.faces, m.edge_list,
                                 m.node_features, m.edge_features);
        m.face_levels = io::read_vec<uint8_t>(f, nf);
        m.face_depths = io::read_vec<uint8_t>(f, nf);
    } else {
        throw error(path + ": unknown mesh kind \"" + kind + "\"");
    }
    for (const auto& cj : hdr.at("couplings")) {
        CouplingGraph c;
        c.direction = cj.at("direction").get<std::string>() == "grid_to_mesh"
                          ? CouplingGraph::Dir::GridToMesh
                          : CouplingGraph::Dir::MeshToGrid;
        c.grid = detail::grid_from_json(cj.at("grid"));
        auto ce = cj.at("edges").get<size_t>();
        auto pairs = io::read_vec<int32_t>(f, ce * 2);
        c.edges.resize(ce);
        for (size_t i = 0; i < ce; ++i)
            c.edges[i] = {pairs[i * 2], pairs[i * 2 + 1]};
        c.edge_features = Tensor<float>({static_cast<int64_t>(ce), 4},
                                        io::read_vec<float>(f, ce * 4))
                              .cast<double>();
        mf.couplings.push_back(std::move(c));
    }
    return mf;
}

}  // namespace firecast

#endif  // FIRECAST_MESH_IO_HPP
