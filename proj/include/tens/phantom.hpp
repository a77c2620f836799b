#pragma once

#include <map>
#include <string>
#include <vector>

#include "tens/mesh.hpp"

namespace tens {

/// Generated mesh plus its named electrode patches and the conductivity of every region.
struct PhantomMesh {
    Mesh mesh;
    std::map<std::string, Box> patches;              // mm
    std::map<std::string, double> conductivities;    // region name -> S/m
};

struct SlabLayer {
    std::string name;
    double thickness = 0.0;  // mm along the current axis
    double sigma = 0.0;      // S/m
};

/// Rectangular bar conducting along x: [0, length] x [0, width] x [0, height] mm.
struct SlabSpec {
    double width = 10.0;
    double height = 10.0;
    std::vector<SlabLayer> layers;
    double pitch = 5.0;

    double length() const;
};

/**
 * Structured hexahedral grid, six Kuhn tetrahedra per cell, one region per layer.
 * Patches "inlet" (x = 0) and "outlet" (x = length) cover the end faces.
 * Throws MeshError if the pitch does not divide every dimension.
 */
PhantomMesh make_slab(const SlabSpec& spec);

/// Closed-form series-resistance solution with the inlet fed and the outlet grounded.
struct SlabSolution {
    double current_density = 0.0;     // A/m^2
    double voltage_drop = 0.0;        // V, inlet minus outlet
    std::vector<double> layer_field;  // V/m, one per layer

    std::vector<double> layer_start;  // mm
    std::vector<double> layer_end;    // mm

    /// Potential in volts at axial position `x` (mm), zero at the outlet.
    double potential_at(double x) const;
};

SlabSolution analytic_slab(const SlabSpec& spec, double current_mA);

/**
 * Box-shaped head stand-in, x lateral (+x is the subject's left), y up, z anterior.
 *
 * Nested shells of skin and skeleton enclose inner tissue holding two square nerve rods that
 * run along z at x = +-nerve_offset. All lengths in mm; geometry boundaries must fall on grid planes.
 */
struct HeadPhantomSpec {
    double width = 120.0;   // x, centred on the midsagittal plane
    double height = 160.0;  // y from 0
    double depth = 140.0;   // z from 0 (back of the neck) to the face
    double skin_thickness = 5.0;
    double skeleton_thickness = 5.0;

    double nerve_size = 5.0;      // side of the square cross-section
    double nerve_offset = 17.5;   // |x| of the rod axis
    double nerve_height = 97.5;   // y of the rod axis
    double nerve_z_min = 60.0;
    double nerve_z_max = 100.0;

    double electrode_size = 20.0;
    double bridge_offset = 10.0;  // |x| of the one-sided bridge electrodes
    double bridge_height = 110.0;
    double neck_height = 30.0;
    double cheek_height = 100.0;
    double cheek_depth = 120.0;   // z of the cheek electrode centres on the side faces

    double pitch = 5.0;
};

/**
 * Mirror-symmetric phantom: the x >= 0 half is meshed and reflected, so the reflection
 * x -> -x maps nodes to nodes and tetrahedra to tetrahedra.
 *
 * Regions: Skin, Skeleton, Inner tissue, Nerve_left, Nerve_right. Patches: bridge_left,
 * bridge_center, bridge_right, neck, cheek_left, cheek_right.
 */
PhantomMesh make_head_phantom(const HeadPhantomSpec& spec);

/// Node and element counts of a structured Kuhn grid with the given cell counts.
struct GridCounts {
    std::size_t nodes = 0;
    std::size_t elements = 0;
};

GridCounts kuhn_grid_counts(std::size_t nx, std::size_t ny, std::size_t nz);

}  // namespace tens
