#ifndef FIRECAST_COUPLING_HPP
#define FIRECAST_COUPLING_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "firecast/geomesh.hpp"
#include "firecast/grid.hpp"

namespace firecast {

/// Directed bipartite graph between lat-lon grid cells and mesh nodes.
struct CouplingGraph {
    enum class Dir : uint8_t { GridToMesh = 0, MeshToGrid = 1 };

    Dir direction = Dir::GridToMesh;
    GridSpec grid;
    std::vector<std::pair<int32_t, int32_t>> edges;  // (source, target) indices
    Tensor<double> edge_features;                    // [E,4]: |d|/norm, dx, dy, dz
};

namespace detail {

/// Index of the mesh face whose spherical triangle contains p, resolved
/// by sign-consistent triple products; ties (edges/vertices) go to the
/// lowest face index.
inline size_t containing_face(const MeshRef& mesh, const Vec3& p) {
    constexpr double kEps = 1e-9;
    double best_slack = -1e18;
    size_t best = 0;
    for (size_t f = 0; f < mesh.faces->size(); ++f) {
        const auto& fc = (*mesh.faces)[f];
        const Vec3& a = (*mesh.nodes)[static_cast<size_t>(fc[0])];
        const Vec3& b = (*mesh.nodes)[static_cast<size_t>(fc[1])];
        const Vec3& c = (*mesh.nodes)[static_cast<size_t>(fc[2])];
        double s = std::min({triple(a, b, p), triple(b, c, p), triple(c, a, p)});
        if (s > best_slack) {
            best_slack = s;
            best = f;
        }
        if (s > kEps) return f;  // strictly interior, no tie possible
    }
    require(best_slack > -kEps, "containment failure: point outside every face "
                                "(geometry bug on a closed mesh)");
    return best;
}

inline void push_edge_features(std::vector<double>& feat, const Vec3& src,
                               const Vec3& dst, double norm_len) {
    Vec3 d = dst - src;
    feat.push_back(d.norm() / norm_len);
    feat.push_back(d.x);
    feat.push_back(d.y);
    feat.push_back(d.z);
}

}  // namespace detail

/// Encoder graph: each grid cell center connects to every mesh node
/// within radius_factor times the longest finest-level mesh edge (the
/// locally assigned face's longest edge on adaptive meshes). Edge order
/// is grid-major.
inline CouplingGraph grid_to_mesh_edges(const GridSpec& grid, const MeshRef& mesh,
                                        double radius_factor = 0.6) {
    require(grid.cells() > 0, "grid_to_mesh_edges: degenerate grid");
    require(radius_factor > 0, "grid_to_mesh_edges: radius_factor must be > 0");
    CouplingGraph g;
    g.direction = CouplingGraph::Dir::GridToMesh;
    g.grid = grid;
    std::vector<double> feat;
    bool adaptive = mesh.face_levels != nullptr;
    for (int64_t i = 0; i < grid.height; ++i)
        for (int64_t j = 0; j < grid.width; ++j) {
            Vec3 p = latlon_to_unit(grid.lat(i), grid.lon(j));
            double radius = radius_factor * mesh.max_edge_arc;
            if (adaptive)
                radius = radius_factor *
                         mesh.face_max_edge_arc(detail::containing_face(mesh, p));
            auto cell = static_cast<int32_t>(i * grid.width + j);
            for (size_t v = 0; v < mesh.num_nodes(); ++v) {
                if (arc_between(p, (*mesh.nodes)[v]) <= radius) {
                    g.edges.emplace_back(cell, static_cast<int32_t>(v));
                    detail::push_edge_features(feat, p, (*mesh.nodes)[v], mesh.norm_len);
                }
            }
        }
    g.edge_features = Tensor<double>({static_cast<int64_t>(g.edges.size()), 4},
                                     std::move(feat));
    return g;
}

/// Decoder graph: each grid cell connects to the 3 vertices of the face
/// containing its center, so every cell has in-degree exactly 3.
inline CouplingGraph mesh_to_grid_edges(const GridSpec& grid, const MeshRef& mesh) {
    require(grid.cells() > 0, "mesh_to_grid_edges: degenerate grid");
    require(!mesh.faces->empty(), "mesh_to_grid_edges: mesh has no faces");
    CouplingGraph g;
    g.direction = CouplingGraph::Dir::MeshToGrid;
    g.grid = grid;
    std::vector<double> feat;
    for (int64_t i = 0; i < grid.height; ++i)
        for (int64_t j = 0; j < grid.width; ++j) {
            Vec3 p = latlon_to_unit(grid.lat(i), grid.lon(j));
            size_t f = detail::containing_face(mesh, p);
            auto cell = static_cast<int32_t>(i * grid.width + j);
            for (int k = 0; k < 3; ++k) {
                int32_t v = (*mesh.faces)[f][static_cast<size_t>(k)];
                g.edges.emplace_back(v, cell);
                detail::push_edge_features(feat, (*mesh.nodes)[static_cast<size_t>(v)],
                                           p, mesh.norm_len);
            }
        }
    g.edge_features = Tensor<double>({static_cast<int64_t>(g.edges.size()), 4},
                                     std::move(feat));
    return g;
}

}  // namespace firecast

#endif  // FIRECAST_COUPLING_HPP
