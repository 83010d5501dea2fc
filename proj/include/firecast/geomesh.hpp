#ifndef FIRECAST_GEOMESH_HPP
#define FIRECAST_GEOMESH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "firecast/region.hpp"
#include "firecast/tensor.hpp"

namespace firecast {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        return {x / n, y / n, z / n};
    }
};

inline Vec3 latlon_to_unit(double lat_deg, double lon_deg) {
    double la = deg2rad(lat_deg), lo = deg2rad(lon_deg);
    return {std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)};
}

inline double unit_to_lat(const Vec3& v) { return rad2deg(std::asin(std::clamp(v.z, -1.0, 1.0))); }
inline double unit_to_lon(const Vec3& v) { return rad2deg(std::atan2(v.y, v.x)); }

/// Great-circle angle between unit vectors, radians.
inline double arc_between(const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

/// Great-circle distance between two lat-lon points, kilometers.
inline double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    require(lat1 >= -90.0 && lat1 <= 90.0 && lat2 >= -90.0 && lat2 <= 90.0,
            "haversine_km: latitude out of [-90,90]");
    double p1 = deg2rad(lat1), p2 = deg2rad(lat2);
    double dp = deg2rad(lat2 - lat1), dl = deg2rad(lon2 - lon1);
    double a = std::sin(dp / 2) * std::sin(dp / 2) +
               std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

using Face = std::array<int32_t, 3>;
using EdgePair = std::pair<int32_t, int32_t>;  // u < v

/// One refinement level of the icosahedral sphere mesh.
struct TriMesh {
    int level = 0;
    std::vector<Vec3> vertices;   // unit vectors
    std::vector<Face> faces;      // outward (counter-clockwise) orientation
    std::vector<EdgePair> edges;  // sorted lexicographically
};

struct TaggedEdge {
    int32_t u, v;   // u < v, indices into the node list
    uint8_t level;  // refinement level this edge first appeared at
};

/// Flat union of all refinement levels' edges over the finest node set.
struct MultiMesh {
    int finest_level = 0;
    std::vector<Vec3> nodes;
    std::vector<Face> faces;  // faces of the finest level (for decoding)
    std::vector<TaggedEdge> edge_list;
    Tensor<double> node_features;  // [V,3]: cos(lat), sin(lon), cos(lon)
    Tensor<double> edge_features;  // [E,4]: |d|/norm_len, dx, dy, dz
    double norm_len = 1.0;         // longest finest-level edge chord
    double max_edge_arc = 0.0;     // longest finest-level edge, radians
};

/// Spatially adaptive mesh: fine inside a region, coarse outside, with a
/// buffer-ring transition. Hanging nodes are allowed; connectivity is the
/// tagged edge union, consumed as a general graph.
struct LamMesh {
    std::string region_name;
    int fine_level = 6;
    int coarse_level = 3;
    std::array<double, 2> buffer_km{400.0, 800.0};
    std::vector<Vec3> nodes;
    std::vector<Face> faces;           // leaf faces (a partition of the sphere)
    std::vector<uint8_t> face_levels;  // assigned level per leaf face
    std::vector<uint8_t> face_depths;  // subdivision depth per leaf face
    std::vector<TaggedEdge> edge_list;
    Tensor<double> node_features;
    Tensor<double> edge_features;
    double norm_len = 1.0;  // longest deepest-level edge chord
};

namespace detail {

inline std::vector<EdgePair> edges_of_faces(const std::vector<Face>& faces) {
    std::vector<EdgePair> es;
    es.reserve(faces.size() * 3);
    for (const auto& f : faces)
        for (int k = 0; k < 3; ++k) {
            int32_t a = f[static_cast<size_t>(k)], b = f[static_cast<size_t>((k + 1) % 3)];
            es.emplace_back(std::min(a, b), std::max(a, b));
        }
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
    return es;
}

inline double triple(const Vec3& a, const Vec3& b, const Vec3& c) {
    return a.cross(b).dot(c);
}

/// Midpoint cache keyed by the unordered parent index pair; exact, no
/// floating tolerance.
class MidpointCache {
public:
    explicit MidpointCache(std::vector<Vec3>* verts) : verts_(verts) {}

    int32_t midpoint(int32_t a, int32_t b) {
        uint64_t key = (static_cast<uint64_t>(std::min(a, b)) << 32) |
                       static_cast<uint64_t>(std::max(a, b));
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        Vec3 m = ((*verts_)[static_cast<size_t>(a)] + (*verts_)[static_cast<size_t>(b)])
                     .normalized();
        auto idx = static_cast<int32_t>(verts_->size());
        verts_->push_back(m);
        cache_.emplace(key, idx);
        return idx;
    }

private:
    std::vector<Vec3>* verts_;
    std::unordered_map<uint64_t, int32_t> cache_;
};

inline Tensor<double> node_feature_tensor(const std::vector<Vec3>& nodes) {
    auto v = static_cast<int64_t>(nodes.size());
    Tensor<double> nf = Tensor<double>::zeros({v, 3});
    for (int64_t i = 0; i < v; ++i) {
        double lat = deg2rad(unit_to_lat(nodes[static_cast<size_t>(i)]));
        double lon = deg2rad(unit_to_lon(nodes[static_cast<size_t>(i)]));
        nf.data[i * 3 + 0] = std::cos(lat);
        nf.data[i * 3 + 1] = std::sin(lon);
        nf.data[i * 3 + 2] = std::cos(lon);
    }
    return nf;
}

inline Tensor<double> edge_feature_tensor(const std::vector<Vec3>& nodes,
                                          const std::vector<TaggedEdge>& edges,
                                          double norm_len) {
    auto e = static_cast<int64_t>(edges.size());
    Tensor<double> ef = Tensor<double>::zeros({e, 4});
    for (int64_t i = 0; i < e; ++i) {
        const auto& ed = edges[static_cast<size_t>(i)];
        Vec3 d = nodes[static_cast<size_t>(ed.v)] - nodes[static_cast<size_t>(ed.u)];
        ef.data[i * 4 + 0] = d.norm() / norm_len;
        ef.data[i * 4 + 1] = d.x;
        ef.data[i * 4 + 2] = d.y;
        ef.data[i * 4 + 3] = d.z;
    }
    return ef;
}

}  // namespace detail

/// The level-0 regular icosahedron: one vertex at the north pole, the
/// second ring vertex in the x-z plane, deterministic ordering.
inline TriMesh icosahedron() {
    TriMesh m;
    m.level = 0;
    double ring_lat = rad2deg(std::atan(0.5));
    m.vertices.push_back({0, 0, 1});
    for (int i = 0; i < 5; ++i)
        m.vertices.push_back(latlon_to_unit(ring_lat, 72.0 * i));
    for (int i = 0; i < 5; ++i)
        m.vertices.push_back(latlon_to_unit(-ring_lat, 36.0 + 72.0 * i));
    m.vertices.push_back({0, 0, -1});

    auto u = [](int i) { return static_cast<int32_t>(1 + i % 5); };
    auto l = [](int i) { return static_cast<int32_t>(6 + i % 5); };
    for (int i = 0; i < 5; ++i) {
        m.faces.push_back({0, u(i), u(i + 1)});
        m.faces.push_back({u(i), l(i), u(i + 1)});
        m.faces.push_back({u(i + 1), l(i), l(i + 1)});
        m.faces.push_back({11, l(i + 1), l(i)});
    }
    // Fix outward orientation so spherical containment tests can rely on
    // non-negative triple products.
    for (auto& f : m.faces) {
        if (detail::triple(m.vertices[static_cast<size_t>(f[0])],
                           m.vertices[static_cast<size_t>(f[1])],
                           m.vertices[static_cast<size_t>(f[2])]) < 0)
            std::swap(f[1], f[2]);
    }
    m.edges = detail::edges_of_faces(m.faces);
    return m;
}

/// Split every face into four by edge midpoints, deduplicated per shared
/// edge and reprojected to the unit sphere. Input vertices keep their
/// indices, so coarser levels nest in finer ones.
inline TriMesh refine(const TriMesh& in) {
    TriMesh out;
    out.level = in.level + 1;
    out.vertices = in.vertices;
    detail::MidpointCache cache(&out.vertices);
    out.faces.reserve(in.faces.size() * 4);
    for (const auto& f : in.faces) {
        int32_t a = f[0], b = f[1], c = f[2];
        int32_t ab = cache.midpoint(a, b);
        int32_t bc = cache.midpoint(b, c);
        int32_t ca = cache.midpoint(c, a);
        out.faces.push_back({a, ab, ca});
        out.faces.push_back({ab, b, bc});
        out.faces.push_back({ca, bc, c});
        out.faces.push_back({ab, bc, ca});
    }
    out.edges = detail::edges_of_faces(out.faces);
    return out;
}

/// Union of edges of levels 0..finest_level over the finest node set, in
/// level order, plus node and edge features.
inline MultiMesh build_multimesh(int finest_level) {
    require(finest_level >= 0 && finest_level <= 8,
            "build_multimesh: level must be in [0,8]");
    std::vector<TriMesh> levels;
    levels.push_back(icosahedron());
    for (int k = 0; k < finest_level; ++k) levels.push_back(refine(levels.back()));

    MultiMesh mm;
    mm.finest_level = finest_level;
    mm.nodes = levels.back().vertices;
    mm.faces = levels.back().faces;
    for (int k = 0; k <= finest_level; ++k)
        for (const auto& [u, v] : levels[static_cast<size_t>(k)].edges)
            mm.edge_list.push_back({u, v, static_cast<uint8_t>(k)});

    double max_chord = 0.0, max_arc = 0.0;
    for (const auto& [u, v] : levels.back().edges) {
        const Vec3& a = mm.nodes[static_cast<size_t>(u)];
        const Vec3& b = mm.nodes[static_cast<size_t>(v)];
        max_chord = std::max(max_chord, (b - a).norm());
        max_arc = std::max(max_arc, arc_between(a, b));
    }
    mm.norm_len = max_chord;
    mm.max_edge_arc = max_arc;
    mm.node_features = detail::node_feature_tensor(mm.nodes);
    mm.edge_features = detail::edge_feature_tensor(mm.nodes, mm.edge_list, mm.norm_len);
    return mm;
}

namespace detail {

/// Great-circle distance (km) from a point to the nearest true region
/// cell; 0 if the point's own cell is inside the region.
class RegionDistance {
public:
    explicit RegionDistance(const RegionMask& region) : region_(&region) {
        for (int64_t i = 0; i < region.grid.height; ++i)
            for (int64_t j = 0; j < region.grid.width; ++j)
                if (region.at(i, j))
                    cells_.emplace_back(region.grid.lat(i), region.grid.lon(j));
        require(!cells_.empty(), "region mask has no true cells");
    }

    double km_to_region(double lat, double lon) const {
        if (region_->contains(lat, lon)) return 0.0;
        double best = 1e18;
        for (const auto& [cla, clo] : cells_)
            best = std::min(best, haversine_km(lat, lon, cla, clo));
        return best;
    }

private:
    const RegionMask* region_;
    std::vector<std::pair<double, double>> cells_;
};

}  // namespace detail

/// Level the buffer-ring schedule prescribes at great-circle distance
/// `d_km` from the region. Linear rings of equal width between
/// buffer_km[0] and buffer_km[1], one ring per intermediate level.
inline int lam_schedule_level(double d_km, int fine, int coarse, double bmin,
                              double bmax) {
    if (fine == coarse) return coarse;
    if (d_km <= 0.0) return fine;
    int nrings = fine - coarse - 1;
    if (nrings == 0) return d_km < bmin ? fine : coarse;
    if (d_km < bmin) return fine;
    if (d_km >= bmax) return coarse;
    double rw = (bmax - bmin) / nrings;
    int ring = static_cast<int>((d_km - bmin) / rw);
    if (ring > nrings - 1) ring = nrings - 1;
    return fine - 1 - ring;
}

/// Recursive local-area refinement. A face subdivides while the schedule
/// at its centroid asks for a deeper level. Boundary cascades can leave a
/// leaf one step deeper than the schedule at its own centroid; the
/// recorded assigned level is the schedule level there (capped by the
/// subdivision depth), so level assignments follow the distance rings
/// exactly.
inline LamMesh build_lam_mesh(const RegionMask& region, int fine_level = 6,
                              int coarse_level = 3,
                              std::array<double, 2> buffer_km = {400.0, 800.0}) {
    require(coarse_level <= fine_level, "build_lam_mesh: fine level must be >= coarse");
    require(coarse_level >= 0 && fine_level <= 8, "build_lam_mesh: levels out of range");
    require(buffer_km[0] > 0 && buffer_km[1] > buffer_km[0],
            "build_lam_mesh: buffer distances must be positive and increasing");
    require(region.count_true() > 0, "build_lam_mesh: empty region mask");

    detail::RegionDistance dist(region);
    auto schedule = [&](const Vec3& centroid) {
        Vec3 c = centroid.normalized();
        double d = dist.km_to_region(unit_to_lat(c), unit_to_lon(c));
        return lam_schedule_level(d, fine_level, coarse_level, buffer_km[0],
                                  buffer_km[1]);
    };

    LamMesh lm;
    lm.region_name = region.name;
    lm.fine_level = fine_level;
    lm.coarse_level = coarse_level;
    lm.buffer_km = buffer_km;

    TriMesh ico = icosahedron();
    lm.nodes = ico.vertices;
    detail::MidpointCache cache(&lm.nodes);

    std::map<std::pair<EdgePair, uint8_t>, bool> edge_set;  // ordered for determinism
    auto add_face_edges = [&](const Face& f, int depth) {
        for (int k = 0; k < 3; ++k) {
            int32_t a = f[static_cast<size_t>(k)], b = f[static_cast<size_t>((k + 1) % 3)];
            edge_set[{{std::min(a, b), std::max(a, b)}, static_cast<uint8_t>(depth)}] =
                true;
        }
    };

    // Explicit stack, children processed in creation order.
    struct Item {
        Face f;
        int depth;
    };
    std::vector<Item> stack;
    for (auto it = ico.faces.rbegin(); it != ico.faces.rend(); ++it)
        stack.push_back({*it, 0});
    while (!stack.empty()) {
        Item item = stack.back();
        stack.pop_back();
        add_face_edges(item.f, item.depth);
        Vec3 centroid = (lm.nodes[static_cast<size_t>(item.f[0])] +
                         lm.nodes[static_cast<size_t>(item.f[1])] +
                         lm.nodes[static_cast<size_t>(item.f[2])]) *
                        (1.0 / 3.0);
        int want = schedule(centroid);
        if (item.depth < want && item.depth < fine_level) {
            int32_t a = item.f[0], b = item.f[1], c = item.f[2];
            int32_t ab = cache.midpoint(a, b);
            int32_t bc = cache.midpoint(b, c);
            int32_t ca = cache.midpoint(c, a);
            int d = item.depth + 1;
            stack.push_back({{ab, bc, ca}, d});
            stack.push_back({{ca, bc, c}, d});
            stack.push_back({{ab, b, bc}, d});
            stack.push_back({{a, ab, ca}, d});
        } else {
            lm.faces.push_back(item.f);
            lm.face_depths.push_back(static_cast<uint8_t>(item.depth));
            lm.face_levels.push_back(
                static_cast<uint8_t>(std::min(item.depth, want)));
        }
    }

    for (const auto& [key, present] : edge_set) {
        (void)present;
        lm.edge_list.push_back({key.first.first, key.first.second, key.second});
    }
    std::stable_sort(lm.edge_list.begin(), lm.edge_list.end(),
                     [](const TaggedEdge& a, const TaggedEdge& b) {
                         if (a.level != b.level) return a.level < b.level;
                         if (a.u != b.u) return a.u < b.u;
                         return a.v < b.v;
                     });

    // Normalization constant: longest edge at the deepest level present.
    uint8_t deepest = 0;
    for (const auto& e : lm.edge_list) deepest = std::max(deepest, e.level);
    double max_chord = 0.0;
    for (const auto& e : lm.edge_list)
        if (e.level == deepest)
            max_chord = std::max(max_chord, (lm.nodes[static_cast<size_t>(e.v)] -
                                             lm.nodes[static_cast<size_t>(e.u)])
                                                .norm());
    lm.norm_len = max_chord;
    lm.node_features = detail::node_feature_tensor(lm.nodes);
    lm.edge_features = detail::edge_feature_tensor(lm.nodes, lm.edge_list, lm.norm_len);
    return lm;
}

/// Uniform view over MultiMesh / LamMesh consumed by coupling and model.
struct MeshRef {
    const std::vector<Vec3>* nodes;
    const std::vector<Face>* faces;
    const std::vector<uint8_t>* face_levels;  // nullptr for uniform meshes
    const std::vector<TaggedEdge>* edges;
    const Tensor<double>* node_features;
    const Tensor<double>* edge_features;
    double norm_len;
    double max_edge_arc;  // longest finest-level edge (uniform); per-face for LAM

    MeshRef(const MultiMesh& m)  // NOLINT: implicit by design
        : nodes(&m.nodes),
          faces(&m.faces),
          face_levels(nullptr),
          edges(&m.edge_list),
          node_features(&m.node_features),
          edge_features(&m.edge_features),
          norm_len(m.norm_len),
          max_edge_arc(m.max_edge_arc) {}

    MeshRef(const LamMesh& m)  // NOLINT
        : nodes(&m.nodes),
          faces(&m.faces),
          face_levels(&m.face_levels),
          edges(&m.edge_list),
          node_features(&m.node_features),
          edge_features(&m.edge_features),
          norm_len(m.norm_len),
          max_edge_arc(0.0) {
        for (size_t f = 0; f < m.faces.size(); ++f)
            max_edge_arc = std::max(max_edge_arc, face_max_edge_arc(f));
    }

    size_t num_nodes() const { return nodes->size(); }

    double face_max_edge_arc(size_t f) const {
        const auto& fc = (*faces)[f];
        double m = 0;
        for (int k = 0; k < 3; ++k)
            m = std::max(m, arc_between((*nodes)[static_cast<size_t>(fc[static_cast<size_t>(k)])],
                                        (*nodes)[static_cast<size_t>(fc[static_cast<size_t>((k + 1) % 3)])]));
        return m;
    }
};

}  // namespace firecast

#endif  // FIRECAST_GEOMESH_HPP
