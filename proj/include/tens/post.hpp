#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tens/materials.hpp"
#include "tens/mesh.hpp"
#include "tens/sparse.hpp"

namespace tens {

/// Default rendering cap for current density, A/m^2.
inline constexpr double kDefaultCurrentDensityCap = 0.4;

struct FieldSolution {
    std::vector<double> potential;  // per node, V
    std::vector<Vec3> e_field;      // per element, V/m
    std::vector<Vec3> j_field;      // per element, A/m^2
    std::vector<double> j_mag;      // per element, A/m^2
};

/// E = -grad V per element for the P1 interpolant of nodal potential `v`.
std::vector<Vec3> element_gradient(const Mesh& m, std::span<const double> v);

struct CurrentDensity {
    std::vector<Vec3> j;
    std::vector<double> magnitude;
};

CurrentDensity current_density(const ConductivityField& c, std::span<const Vec3> e_field);

/// Runs element_gradient and current_density and packages the result with the potential.
FieldSolution make_field_solution(const Mesh& m, const ConductivityField& c, std::vector<double> potential);

/// Current-density statistics of one region. Maxima are element-constant values located at element centroids.
struct RegionReport {
    std::string region;
    double max_j = 0.0;   // A/m^2
    Vec3 argmax;          // mm, centroid of the maximising element
    ElementId argmax_element = 0;
    double mean_j = 0.0;  // volume-weighted, A/m^2
    double volume = 0.0;  // mm^3
};

/// Throws Error if the region is unknown or has no elements. Ties go to the lowest element id.
RegionReport region_stats(const Mesh& m, const FieldSolution& sol, std::string_view region);

/// Net current through `patch` in amperes, positive when leaving the domain, from the
/// element-constant J of each face's owning tetrahedron. First-order accurate in the mesh pitch.
double electrode_flux(const Mesh& m, const FieldSolution& sol, const FaceSet& patch);

/**
 * Consistent (reaction) boundary current through the given boundary nodes, in amperes,
 * positive when leaving: -sum_i (K V)_i with K the stiffness matrix before grounding.
 *
 * This is the current the discrete solution actually exchanges through those nodes, so it
 * balances to solver tolerance. A patch's perimeter nodes also carry part of the
 * neighbouring faces' flux.
 */
double consistent_flux(const SymmetricCsr& stiffness, std::span<const double> potential,
                       std::span<const std::size_t> nodes);

/// Legacy ASCII VTK with cell scalars j_mag and j_mag_capped and point scalar potential.
void write_vtk(std::ostream& out, const Mesh& m, const FieldSolution& sol, double cap = kDefaultCurrentDensityCap);
void export_vtk(const Mesh& m, const FieldSolution& sol, double cap, const std::filesystem::path& path);

/// Shortest decimal that round-trips `v`; negative zero is written as 0.
std::string format_number(double v);

void write_reports_csv(std::ostream& out, std::span<const RegionReport> reports);

}  // namespace tens
