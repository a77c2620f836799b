#pragma once

#include <array>
#include <span>
#include <vector>

#include "tens/materials.hpp"
#include "tens/mesh.hpp"
#include "tens/sparse.hpp"

namespace tens {

using ElementMatrix = std::array<std::array<double, 4>, 4>;

/// Constant gradients of the four P1 basis functions and the element volume.
struct P1Geometry {
    std::array<Vec3, 4> gradients;
    double volume = 0.0;
};

/// Throws FemError unless the tetrahedron has positive volume.
P1Geometry p1_geometry(const std::array<Vec3, 4>& coords);

/// K[i][j] = sigma * volume * grad(phi_i) . grad(phi_j), coordinates in metres.
ElementMatrix element_stiffness(const std::array<Vec3, 4>& coords, double sigma);

/// Corner coordinates of element `e` converted to metres.
std::array<Vec3, 4> element_coords_m(const Mesh& m, std::size_t e);

/// Discrete conduction problem K V = b. K in siemens, b in amperes.
struct LinearSystem {
    SymmetricCsr matrix;
    std::vector<double> rhs;
    std::vector<std::size_t> constrained;  // sorted node indices pinned to 0 V

    std::size_t size() const noexcept { return rhs.size(); }
};

/**
 * Scatter-adds element stiffness matrices into a global system with zero right-hand side.
 *
 * Element matrices may be computed on `threads` workers; the scatter itself runs in element
 * order, so the result is bitwise identical for any thread count.
 */
LinearSystem assemble(const Mesh& m, const ConductivityField& c, unsigned threads = 1);

/// Uniform inward current density over an electrode patch.
class NeumannLoad {
public:
    /// Throws FemError if the patch has zero area or the current is negative or not finite.
    NeumannLoad(FaceSet patch, double total_current_mA);

    const FaceSet& patch() const noexcept { return patch_; }
    double total_current_mA() const noexcept { return current_mA_; }
    double total_current() const noexcept { return current_mA_ * 1e-3; }
    /// Patch area in m^2.
    double area() const noexcept { return area_m2_; }
    /// Normal current density in A/m^2.
    double jn() const noexcept { return total_current() / area_m2_; }

private:
    FaceSet patch_;
    double current_mA_;
    double area_m2_;
};

/// Adds jn * face_area / 3 to each node of every patch face.
LinearSystem apply_neumann(LinearSystem sys, const NeumannLoad& load);

/// Pins every node of `ground` to 0 V by symmetric elimination. Throws FemError on an empty patch.
LinearSystem apply_dirichlet(LinearSystem sys, const FaceSet& ground);
LinearSystem apply_dirichlet(LinearSystem sys, std::span<const std::size_t> nodes);

}  // namespace tens
