#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tens/geometry.hpp"

namespace tens {

using NodeId = std::int64_t;
using ElementId = std::int64_t;
using RegionId = std::int64_t;

/// Mesh coordinates are millimetres; the physics runs in metres.
inline constexpr double kMetresPerMillimetre = 1e-3;

struct Node {
    NodeId id = 0;
    Vec3 pos;  // mm

    friend bool operator==(const Node&, const Node&) = default;
};

/// Linear tetrahedron. Node order defines orientation; positive signed volume is canonical.
struct Element {
    ElementId id = 0;
    std::array<NodeId, 4> nodes{};
    RegionId region = 0;

    friend bool operator==(const Element&, const Element&) = default;
};

/**
 * Labelled tetrahedral mesh.
 *
 * Immutable once built. Construction never throws on topological defects so that
 * validate_mesh() can report them; code that needs a sound mesh calls
 * require_valid() first.
 */
class Mesh {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    Mesh() = default;
    Mesh(std::vector<Node> nodes, std::vector<Element> elements, std::map<RegionId, std::string> region_names);

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Element>& elements() const noexcept { return elements_; }
    const std::map<RegionId, std::string>& region_names() const noexcept { return region_names_; }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t element_count() const noexcept { return elements_.size(); }

    /// Position of node `id` in nodes(), if present.
    std::optional<std::size_t> node_index(NodeId id) const;

    /// Node indices of element `e`; entries are npos for dangling references.
    const std::array<std::size_t, 4>& element_nodes(std::size_t e) const { return connectivity_[e]; }

    /// Corner coordinates of element `e` in mm. Requires resolved connectivity.
    std::array<Vec3, 4> element_coords(std::size_t e) const;

    Vec3 centroid(std::size_t e) const;

    /// Signed volume of element `e` in mm^3.
    double signed_volume(std::size_t e) const;

    /// Region id carrying `name`, matched exactly.
    std::optional<RegionId> find_region(std::string_view name) const;

    /// Region name of element `e`, or the id in decimal when unnamed.
    std::string region_name_of(std::size_t e) const;

    /// Copy with region names replaced according to `names` (ids absent from the map keep theirs).
    Mesh with_region_names(const std::map<RegionId, std::string>& names) const;

    friend bool operator==(const Mesh& a, const Mesh& b)
    {
        return a.nodes_ == b.nodes_ && a.elements_ == b.elements_ && a.region_names_ == b.region_names_;
    }

private:
    std::vector<Node> nodes_;
    std::vector<Element> elements_;
    std::map<RegionId, std::string> region_names_;
    std::map<NodeId, std::size_t> node_index_;
    std::vector<std::array<std::size_t, 4>> connectivity_;
};

/// Copy of `m` with every negatively oriented tetrahedron flipped by swapping its last two nodes.
Mesh orient_elements(const Mesh& m);

enum class DefectKind {
    negative_volume,     // signed volume <= 0 (degenerate tets included)
    duplicate_node_ref,  // element lists the same node twice
    dangling_node,       // element references a node id that does not exist
    dangling_region,     // element region has no entry in region_names
    orphan_node,         // node used by no element
    duplicate_id,        // node or element id used twice
};

std::string_view to_string(DefectKind kind);

struct Defect {
    DefectKind kind;
    std::vector<std::int64_t> ids;  // element id first, then offending node/region id where relevant
};

struct ValidationReport {
    std::size_t nodes = 0;
    std::size_t elements = 0;
    std::size_t regions = 0;
    std::vector<Defect> defects;

    bool ok() const noexcept { return defects.empty(); }
    std::size_t count(DefectKind kind) const;
    std::string summary() const;
};

ValidationReport validate_mesh(const Mesh& m);

/// Throws MeshError with the validation summary unless `m` is defect-free.
void require_valid(const Mesh& m);

struct BoundaryFace {
    ElementId element_id = 0;
    std::size_t element = 0;           // index into Mesh::elements()
    int local_face = 0;                // face opposite local vertex `local_face`
    std::array<std::size_t, 3> nodes{};  // node indices, counter-clockwise seen from outside
    Vec3 normal;                       // unit, outward
    double area = 0.0;                 // mm^2
};

struct FaceSet {
    std::vector<BoundaryFace> faces;

    std::size_t size() const noexcept { return faces.size(); }
    bool empty() const noexcept { return faces.empty(); }
    /// Total area in mm^2.
    double area() const;
    /// Sorted, unique node indices touched by the faces.
    std::vector<std::size_t> node_indices() const;
};

/// Faces owned by exactly one tetrahedron, ordered by (element id, local face).
FaceSet extract_boundary(const Mesh& m);

/// Faces whose owning element lies in the named region.
struct RegionAdjacency {
    std::string region;
};

using PatchSelector = std::variant<Box, RegionAdjacency>;

/// Subset of `boundary` picked by `selector`. Throws MeshError on an empty result.
FaceSet select_patch(const Mesh& m, const FaceSet& boundary, const PatchSelector& selector);

}  // namespace tens
