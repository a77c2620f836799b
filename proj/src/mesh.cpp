#include "tens/mesh.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "tens/error.hpp"

namespace tens {

Mesh::Mesh(std::vector<Node> nodes, std::vector<Element> elements, std::map<RegionId, std::string> region_names)
    : nodes_(std::move(nodes)), elements_(std::move(elements)), region_names_(std::move(region_names))
{
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        node_index_.emplace(nodes_[i].id, i);  // first occurrence wins; duplicates surface in validation
    }
    connectivity_.reserve(elements_.size());
    for (const auto& el : elements_) {
        std::array<std::size_t, 4> conn{};
        for (int k = 0; k < 4; ++k) {
            auto it = node_index_.find(el.nodes[k]);
            conn[k] = it == node_index_.end() ? npos : it->second;
        }
        connectivity_.push_back(conn);
    }
}

std::optional<std::size_t> Mesh::node_index(NodeId id) const
{
    auto it = node_index_.find(id);
    if (it == node_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::array<Vec3, 4> Mesh::element_coords(std::size_t e) const
{
    const auto& conn = connectivity_.at(e);
    std::array<Vec3, 4> out;
    for (int k = 0; k < 4; ++k) {
        if (conn[k] == npos) {
            throw MeshError("element " + std::to_string(elements_[e].id) + " references missing node " +
                            std::to_string(elements_[e].nodes[k]));
        }
        out[k] = nodes_[conn[k]].pos;
    }
    return out;
}

Vec3 Mesh::centroid(std::size_t e) const
{
    const auto p = element_coords(e);
    return (p[0] + p[1] + p[2] + p[3]) * 0.25;
}

double Mesh::signed_volume(std::size_t e) const
{
    const auto p = element_coords(e);
    return signed_volume6(p[0], p[1], p[2], p[3]) / 6.0;
}

std::optional<RegionId> Mesh::find_region(std::string_view name) const
{
    for (const auto& [id, n] : region_names_) {
        if (n == name) {
            return id;
        }
    }
    return std::nullopt;
}

std::string Mesh::region_name_of(std::size_t e) const
{
    const RegionId r = elements_.at(e).region;
    auto it = region_names_.find(r);
    return it == region_names_.end() ? std::to_string(r) : it->second;
}

Mesh Mesh::with_region_names(const std::map<RegionId, std::string>& names) const
{
    auto merged = region_names_;
    for (const auto& [id, name] : names) {
        merged[id] = name;
    }
    return Mesh(nodes_, elements_, std::move(merged));
}

Mesh orient_elements(const Mesh& m)
{
    std::vector<Element> elements = m.elements();
    for (std::size_t e = 0; e < elements.size(); ++e) {
        const auto& conn = m.element_nodes(e);
        if (std::find(conn.begin(), conn.end(), Mesh::npos) != conn.end()) {
            continue;
        }
        if (m.signed_volume(e) < 0.0) {
            std::swap(elements[e].nodes[2], elements[e].nodes[3]);
        }
    }
    return Mesh(m.nodes(), std::move(elements), m.region_names());
}

std::string_view to_string(DefectKind kind)
{
    switch (kind) {
    case DefectKind::negative_volume: return "negative_volume";
    case DefectKind::duplicate_node_ref: return "duplicate_node_ref";
    case DefectKind::dangling_node: return "dangling_node";
    case DefectKind::dangling_region: return "dangling_region";
    case DefectKind::orphan_node: return "orphan_node";
    case DefectKind::duplicate_id: return "duplicate_id";
    }
    return "unknown";
}

std::size_t ValidationReport::count(DefectKind kind) const
{
    return static_cast<std::size_t>(
        std::count_if(defects.begin(), defects.end(), [kind](const Defect& d) { return d.kind == kind; }));
}

std::string ValidationReport::summary() const
{
    std::ostringstream os;
    os << nodes << " nodes, " << elements << " elements, " << regions << " regions";
    if (defects.empty()) {
        os << ", no defects";
        return os.str();
    }
    os << ", " << defects.size() << " defects:";
    for (auto kind : {DefectKind::negative_volume, DefectKind::duplicate_node_ref, DefectKind::dangling_node,
                      DefectKind::dangling_region, DefectKind::orphan_node, DefectKind::duplicate_id}) {
        if (auto n = count(kind)) {
            os << ' ' << to_string(kind) << '=' << n;
        }
    }
    return os.str();
}

ValidationReport validate_mesh(const Mesh& m)
{
    ValidationReport report;
    report.nodes = m.node_count();
    report.elements = m.element_count();
    report.regions = m.region_names().size();

    {
        std::set<NodeId> seen;
        for (const auto& n : m.nodes()) {
            if (!seen.insert(n.id).second) {
                report.defects.push_back({DefectKind::duplicate_id, {n.id}});
            }
        }
    }
    {
        std::set<ElementId> seen;
        for (const auto& el : m.elements()) {
            if (!seen.insert(el.id).second) {
                report.defects.push_back({DefectKind::duplicate_id, {el.id}});
            }
        }
    }

    std::vector<bool> used(m.node_count(), false);
    for (std::size_t e = 0; e < m.element_count(); ++e) {
        const auto& el = m.elements()[e];
        const auto& conn = m.element_nodes(e);
        bool resolved = true;
        for (int k = 0; k < 4; ++k) {
            if (conn[k] == Mesh::npos) {
                report.defects.push_back({DefectKind::dangling_node, {el.id, el.nodes[k]}});
                resolved = false;
            } else {
                used[conn[k]] = true;
            }
        }
        bool distinct = true;
        for (int a = 0; a < 4; ++a) {
            for (int b = a + 1; b < 4; ++b) {
                if (el.nodes[a] == el.nodes[b]) {
                    distinct = false;
                }
            }
        }
        if (!distinct) {
            report.defects.push_back({DefectKind::duplicate_node_ref, {el.id}});
        }
        if (resolved && distinct && !(m.signed_volume(e) > 0.0)) {
            report.defects.push_back({DefectKind::negative_volume, {el.id}});
        }
        if (!m.region_names().contains(el.region)) {
            report.defects.push_back({DefectKind::dangling_region, {el.id, el.region}});
        }
    }
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (!used[i]) {
            report.defects.push_back({DefectKind::orphan_node, {m.nodes()[i].id}});
        }
    }
    return report;
}

void require_valid(const Mesh& m)
{
    auto report = validate_mesh(m);
    if (!report.ok()) {
        throw MeshError("invalid mesh (see validate_mesh): " + report.summary());
    }
}

double FaceSet::area() const
{
    double a = 0.0;
    for (const auto& f : faces) {
        a += f.area;
    }
    return a;
}

std::vector<std::size_t> FaceSet::node_indices() const
{
    std::vector<std::size_t> out;
    out.reserve(faces.size() * 3);
    for (const auto& f : faces) {
        out.insert(out.end(), f.nodes.begin(), f.nodes.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

struct FaceKeyHash {
    std::size_t operator()(const std::array<std::size_t, 3>& k) const noexcept
    {
        std::size_t h = k[0];
        h = h * 0x9E3779B97F4A7C15ull ^ k[1];
        h = h * 0x9E3779B97F4A7C15ull ^ k[2];
        return h;
    }
};

}  // namespace

FaceSet extract_boundary(const Mesh& m)
{
    require_valid(m);

    struct Slot {
        std::size_t element;
        int local_face;
        int count;
    };
    std::unordered_map<std::array<std::size_t, 3>, Slot, FaceKeyHash> faces;
    faces.reserve(m.element_count() * 2);

    for (std::size_t e = 0; e < m.element_count(); ++e) {
        const auto& conn = m.element_nodes(e);
        for (int f = 0; f < 4; ++f) {
            std::array<std::size_t, 3> key{};
            int j = 0;
            for (int k = 0; k < 4; ++k) {
                if (k != f) {
                    key[j++] = conn[k];
                }
            }
            std::sort(key.begin(), key.end());
            auto it = faces.try_emplace(key, Slot{e, f, 0}).first;
            if (++it->second.count > 2) {
                throw MeshError("non-manifold face shared by more than two elements (element " +
                                std::to_string(m.elements()[e].id) + ")");
            }
        }
    }

    FaceSet out;
    for (const auto& [key, slot] : faces) {
        if (slot.count != 1) {
            continue;
        }
        const auto& conn = m.element_nodes(slot.element);
        std::array<std::size_t, 3> tri{};
        int j = 0;
        for (int k = 0; k < 4; ++k) {
            if (k != slot.local_face) {
                tri[j++] = conn[k];
            }
        }
        const Vec3& a = m.nodes()[tri[0]].pos;
        const Vec3& b = m.nodes()[tri[1]].pos;
        const Vec3& c = m.nodes()[tri[2]].pos;
        Vec3 n = cross(b - a, c - a);
        const Vec3 opposite = m.nodes()[conn[slot.local_face]].pos;
        if (dot(n, opposite - a) > 0.0) {
            std::swap(tri[1], tri[2]);
            n = -n;
        }
        const double twice_area = norm(n);
        BoundaryFace face;
        face.element_id = m.elements()[slot.element].id;
        face.element = slot.element;
        face.local_face = slot.local_face;
        face.nodes = tri;
        face.normal = n * (1.0 / twice_area);
        face.area = 0.5 * twice_area;
        out.faces.push_back(face);
    }
    std::sort(out.faces.begin(), out.faces.end(), [](const BoundaryFace& a, const BoundaryFace& b) {
        return a.element_id != b.element_id ? a.element_id < b.element_id : a.local_face < b.local_face;
    });
    return out;
}

FaceSet select_patch(const Mesh& m, const FaceSet& boundary, const PatchSelector& selector)
{
    FaceSet out;
    if (const auto* box = std::get_if<Box>(&selector)) {
        if (box->degenerate()) {
            throw MeshError("patch selector box is degenerate");
        }
        const Vec3 extent = box->max - box->min;
        const double tol = 1e-9 * std::max({extent.x, extent.y, extent.z});
        for (const auto& f : boundary.faces) {
            if (box->contains(m.nodes()[f.nodes[0]].pos, tol) && box->contains(m.nodes()[f.nodes[1]].pos, tol) &&
                box->contains(m.nodes()[f.nodes[2]].pos, tol)) {
                out.faces.push_back(f);
            }
        }
        if (out.empty()) {
            throw MeshError("patch selector box selects no boundary faces");
        }
    } else {
        const auto& name = std::get<RegionAdjacency>(selector).region;
        const auto region = m.find_region(name);
        if (!region) {
            throw MeshError("patch selector names unknown region '" + name + "'");
        }
        for (const auto& f : boundary.faces) {
            if (m.elements()[f.element].region == *region) {
                out.faces.push_back(f);
            }
        }
        if (out.empty()) {
            throw MeshError("region '" + name + "' has no boundary faces");
        }
    }
    return out;
}

}  // namespace tens
