#include "tens/phantom.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <set>

#include "tens/error.hpp"
#include "tens/materials.hpp"

namespace tens {

namespace {

std::size_t cells(double length, double pitch, const std::string& what)
{
    if (!(pitch > 0.0)) {
        throw MeshError("cell pitch must be positive");
    }
    const double ratio = length / pitch;
    const double rounded = std::round(ratio);
    if (!(length >= 0.0) || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw MeshError(what + " (" + std::to_string(length) + " mm) is not a multiple of the pitch (" +
                        std::to_string(pitch) + " mm)");
    }
    return static_cast<std::size_t>(rounded);
}

// Kuhn split of the unit cube: vertex path 000 -> e_a -> e_a + e_b -> 111 for every axis permutation.
// Corners are encoded as bit 0 = x, bit 1 = y, bit 2 = z.
constexpr std::array<std::array<int, 4>, 6> kKuhnTets{{
    {0, 1, 3, 7},  // x y z
    {0, 1, 5, 7},  // x z y
    {0, 2, 3, 7},  // y x z
    {0, 2, 6, 7},  // y z x
    {0, 4, 5, 7},  // z x y
    {0, 4, 6, 7},  // z y x
}};

struct Grid {
    std::size_t nx = 0, ny = 0, nz = 0;

    std::size_t node(std::size_t i, std::size_t j, std::size_t k) const { return i + (nx + 1) * (j + (ny + 1) * k); }
};

/// Meshes an nx x ny x nz cell grid. `mirror_below` cells with i < mirror_below use the
/// x-reflected split of their mirror image; pass 0 for a plain grid.
Mesh build_kuhn_mesh(const Grid& g, const std::function<Vec3(std::size_t, std::size_t, std::size_t)>& coord,
                     const std::function<RegionId(std::size_t, std::size_t, std::size_t)>& region,
                     std::size_t mirror_below, std::map<RegionId, std::string> names)
{
    std::vector<Node> nodes;
    nodes.reserve((g.nx + 1) * (g.ny + 1) * (g.nz + 1));
    for (std::size_t k = 0; k <= g.nz; ++k) {
        for (std::size_t j = 0; j <= g.ny; ++j) {
            for (std::size_t i = 0; i <= g.nx; ++i) {
                nodes.push_back({static_cast<NodeId>(g.node(i, j, k) + 1), coord(i, j, k)});
            }
        }
    }

    std::vector<Element> elements;
    elements.reserve(6 * g.nx * g.ny * g.nz);
    for (std::size_t ck = 0; ck < g.nz; ++ck) {
        for (std::size_t cj = 0; cj < g.ny; ++cj) {
            for (std::size_t ci = 0; ci < g.nx; ++ci) {
                const bool mirrored = ci < mirror_below;
                const RegionId r = region(ci, cj, ck);
                for (const auto& tet : kKuhnTets) {
                    std::array<std::size_t, 4> idx{};
                    for (int v = 0; v < 4; ++v) {
                        const std::size_t bx = tet[v] & 1;
                        const std::size_t by = (tet[v] >> 1) & 1;
                        const std::size_t bz = (tet[v] >> 2) & 1;
                        // a mirrored cell starts its x path at the face nearer the mirror plane
                        const std::size_t i = mirrored ? ci + 1 - bx : ci + bx;
                        idx[v] = g.node(i, cj + by, ck + bz);
                    }
                    const double vol6 =
                        signed_volume6(nodes[idx[0]].pos, nodes[idx[1]].pos, nodes[idx[2]].pos, nodes[idx[3]].pos);
                    if (vol6 < 0.0) {
                        std::swap(idx[2], idx[3]);
                    }
                    Element el;
                    el.id = static_cast<ElementId>(elements.size() + 1);
                    for (int v = 0; v < 4; ++v) {
                        el.nodes[v] = static_cast<NodeId>(idx[v] + 1);
                    }
                    el.region = r;
                    elements.push_back(el);
                }
            }
        }
    }
    return Mesh(std::move(nodes), std::move(elements), std::move(names));
}

}  // namespace

GridCounts kuhn_grid_counts(std::size_t nx, std::size_t ny, std::size_t nz)
{
    return {(nx + 1) * (ny + 1) * (nz + 1), 6 * nx * ny * nz};
}

double SlabSpec::length() const
{
    double l = 0.0;
    for (const auto& layer : layers) {
        l += layer.thickness;
    }
    return l;
}

PhantomMesh make_slab(const SlabSpec& spec)
{
    if (spec.layers.empty()) {
        throw MeshError("slab needs at least one layer");
    }
    std::set<std::string> seen;
    std::vector<std::size_t> layer_end;  // cumulative cell counts
    std::map<RegionId, std::string> names;
    PhantomMesh out;
    std::size_t acc = 0;
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const auto& layer = spec.layers[l];
        if (!seen.insert(normalize_material_name(layer.name)).second) {
            throw MeshError("duplicate slab layer name '" + layer.name + "'");
        }
        if (!(layer.sigma > 0.0)) {
            throw MeshError("slab layer '" + layer.name + "' needs a positive conductivity");
        }
        const std::size_t n = cells(layer.thickness, spec.pitch, "layer '" + layer.name + "' thickness");
        if (n == 0) {
            throw MeshError("slab layer '" + layer.name + "' is thinner than one cell");
        }
        acc += n;
        layer_end.push_back(acc);
        names[static_cast<RegionId>(l + 1)] = layer.name;
        out.conductivities[layer.name] = layer.sigma;
    }

    Grid g;
    g.nx = acc;
    g.ny = cells(spec.width, spec.pitch, "slab width");
    g.nz = cells(spec.height, spec.pitch, "slab height");
    if (g.ny == 0 || g.nz == 0) {
        throw MeshError("slab cross-section must be at least one cell");
    }
    const double p = spec.pitch;

    out.mesh = build_kuhn_mesh(
        g, [p](std::size_t i, std::size_t j, std::size_t k) { return Vec3{i * p, j * p, k * p}; },
        [&layer_end](std::size_t ci, std::size_t, std::size_t) {
            std::size_t l = 0;
            while (ci >= layer_end[l]) {
                ++l;
            }
            return static_cast<RegionId>(l + 1);
        },
        0, std::move(names));

    const double length = static_cast<double>(g.nx) * p;
    const double half = 0.5 * p;
    out.patches["inlet"] = Box{{-half, 0.0, 0.0}, {half, spec.width, spec.height}};
    out.patches["outlet"] = Box{{length - half, 0.0, 0.0}, {length + half, spec.width, spec.height}};
    return out;
}

double SlabSolution::potential_at(double x) const
{
    double v = 0.0;
    for (std::size_t l = 0; l < layer_field.size(); ++l) {
        const double from = std::max(x, layer_start[l]);
        const double to = layer_end[l];
        if (to > from) {
            v += layer_field[l] * (to - from) * kMetresPerMillimetre;
        }
    }
    return v;
}

SlabSolution analytic_slab(const SlabSpec& spec, double current_mA)
{
    SlabSolution s;
    const double area = spec.width * spec.height * 1e-6;
    s.current_density = current_mA * 1e-3 / area;
    double x = 0.0;
    for (const auto& layer : spec.layers) {
        const double e = s.current_density / layer.sigma;
        s.layer_field.push_back(e);
        s.layer_start.push_back(x);
        x += layer.thickness;
        s.layer_end.push_back(x);
        s.voltage_drop += e * layer.thickness * kMetresPerMillimetre;
    }
    return s;
}

namespace {

enum HeadRegion : RegionId { kSkin = 1, kSkeleton = 2, kInnerTissue = 3, kNerveLeft = 4, kNerveRight = 5 };

struct CellRange {
    std::size_t lo = 0, hi = 0;  // [lo, hi)

    bool contains(std::size_t c) const { return c >= lo && c < hi; }
};

CellRange cell_range(double lo, double hi, double pitch, const std::string& what)
{
    if (!(hi > lo)) {
        throw MeshError(what + " has non-positive extent");
    }
    return {cells(lo, pitch, what + " lower bound"), cells(hi, pitch, what + " upper bound")};
}

void require_inside(const Box& patch, const Box& face, const std::string& name)
{
    const double tol = 1e-9;
    if (!face.contains(patch.min, tol) || !face.contains(patch.max, tol)) {
        throw MeshError("electrode patch '" + name + "' does not fit on its face");
    }
}

}  // namespace

PhantomMesh make_head_phantom(const HeadPhantomSpec& s)
{
    const double p = s.pitch;
    Grid g;
    const std::size_t half = cells(0.5 * s.width, p, "half width");
    g.nx = 2 * half;
    g.ny = cells(s.height, p, "height");
    g.nz = cells(s.depth, p, "depth");
    const std::size_t skin = cells(s.skin_thickness, p, "skin thickness");
    const std::size_t shell = skin + cells(s.skeleton_thickness, p, "skeleton thickness");
    if (skin == 0 || shell == skin) {
        throw MeshError("skin and skeleton shells must each be at least one cell thick");
    }
    if (2 * shell >= std::min({g.nx, g.ny, g.nz})) {
        throw MeshError("shells leave no room for inner tissue");
    }

    // rod extents in cells; x measured from the mid-plane on the positive half
    const double r = 0.5 * s.nerve_size;
    const CellRange rod_x = cell_range(s.nerve_offset - r, s.nerve_offset + r, p, "nerve lateral extent");
    const CellRange rod_y = cell_range(s.nerve_height - r, s.nerve_height + r, p, "nerve vertical extent");
    const CellRange rod_z = cell_range(s.nerve_z_min, s.nerve_z_max, p, "nerve axial extent");
    if (rod_x.lo == 0) {
        throw MeshError("nerve rods overlap at the mid-plane");
    }

    auto depth_in_shell = [&](std::size_t ci_half, std::size_t cj, std::size_t ck) {
        return std::min({half - 1 - ci_half, cj, g.ny - 1 - cj, ck, g.nz - 1 - ck});
    };
    for (std::size_t ck = rod_z.lo; ck < rod_z.hi; ++ck) {
        for (std::size_t cj = rod_y.lo; cj < rod_y.hi; ++cj) {
            for (std::size_t ci = rod_x.lo; ci < rod_x.hi; ++ci) {
                if (ci >= half || cj >= g.ny || ck >= g.nz || depth_in_shell(ci, cj, ck) < shell) {
                    throw MeshError("nerve rod overlaps the skin or skeleton shell");
                }
            }
        }
    }

    auto classify = [&](std::size_t ci, std::size_t cj, std::size_t ck) -> RegionId {
        const bool left = ci >= half;
        const std::size_t ch = left ? ci - half : half - 1 - ci;
        const std::size_t d = depth_in_shell(ch, cj, ck);
        if (d < skin) {
            return kSkin;
        }
        if (d < shell) {
            return kSkeleton;
        }
        if (rod_x.contains(ch) && rod_y.contains(cj) && rod_z.contains(ck)) {
            return left ? kNerveLeft : kNerveRight;
        }
        return kInnerTissue;
    };

    auto coord = [&](std::size_t i, std::size_t j, std::size_t k) {
        // both halves use the same arithmetic so mirrored nodes are exact negatives
        const double x = i >= half ? static_cast<double>(i - half) * p : -(static_cast<double>(half - i) * p);
        return Vec3{x, static_cast<double>(j) * p, static_cast<double>(k) * p};
    };

    PhantomMesh out;
    out.mesh = build_kuhn_mesh(g, coord, classify, half,
                               {{kSkin, "Skin"},
                                {kSkeleton, "Skeleton"},
                                {kInnerTissue, "Inner tissue"},
                                {kNerveLeft, "Nerve_left"},
                                {kNerveRight, "Nerve_right"}});

    const auto table = default_table();
    out.conductivities["Skin"] = *table.lookup("Skin");
    out.conductivities["Skeleton"] = *table.lookup("Skeleton");
    out.conductivities["Inner tissue"] = *table.lookup("Inner tissue");
    out.conductivities["Nerve_left"] = *table.lookup("Nerves");
    out.conductivities["Nerve_right"] = *table.lookup("Nerves");

    const double w = 0.5 * s.width;
    const double e = 0.5 * s.electrode_size;
    const double t = 0.5 * p;  // half thickness of the selection slab normal to a face
    const Box front{{-w, 0.0, s.depth - t}, {w, s.height, s.depth + t}};
    const Box back{{-w, 0.0, -t}, {w, s.height, t}};
    const Box left_side{{w - t, 0.0, 0.0}, {w + t, s.height, s.depth}};
    const Box right_side{{-w - t, 0.0, 0.0}, {-w + t, s.height, s.depth}};

    auto on_front = [&](double xc) {
        return Box{{xc - e, s.bridge_height - e, s.depth - t}, {xc + e, s.bridge_height + e, s.depth + t}};
    };
    out.patches["bridge_left"] = on_front(s.bridge_offset);
    out.patches["bridge_center"] = on_front(0.0);
    out.patches["bridge_right"] = on_front(-s.bridge_offset);
    out.patches["neck"] = Box{{-e, s.neck_height - e, -t}, {e, s.neck_height + e, t}};
    out.patches["cheek_left"] =
        Box{{w - t, s.cheek_height - e, s.cheek_depth - e}, {w + t, s.cheek_height + e, s.cheek_depth + e}};
    out.patches["cheek_right"] =
        Box{{-w - t, s.cheek_height - e, s.cheek_depth - e}, {-w + t, s.cheek_height + e, s.cheek_depth + e}};

    for (const char* name : {"bridge_left", "bridge_center", "bridge_right"}) {
        require_inside(out.patches[name], front, name);
    }
    require_inside(out.patches["neck"], back, "neck");
    require_inside(out.patches["cheek_left"], left_side, "cheek_left");
    require_inside(out.patches["cheek_right"], right_side, "cheek_right");
    return out;
}

}  // namespace tens
