#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tens/fem.hpp"
#include "tens/phantom.hpp"
#include "tens/post.hpp"
#include "tens/solver.hpp"

namespace tens {

/// Default drive per electrode pair, mA.
inline constexpr double kDefaultCurrent_mA = 2.0;

enum class ElectrodeRole { anode, cathode };

std::string_view to_string(ElectrodeRole role);

/// Refers to a patch published by a phantom generator (e.g. "bridge_left").
struct NamedPatch {
    std::string name;
};

using ElectrodeSelector = std::variant<Box, NamedPatch, RegionAdjacency>;

struct ElectrodeSpec {
    std::string name;
    ElectrodeRole role = ElectrodeRole::anode;
    ElectrodeSelector selector;
    double current_mA = kDefaultCurrent_mA;  // anodes only
};

struct NastranSource {
    std::filesystem::path path;
    std::optional<std::filesystem::path> region_map;
};

using MeshSource = std::variant<NastranSource, HeadPhantomSpec, SlabSpec>;

struct OutputSpec {
    std::optional<std::filesystem::path> vtk;
    std::optional<std::filesystem::path> csv;
    std::optional<std::filesystem::path> json;
    double cap = kDefaultCurrentDensityCap;
};

struct Scenario {
    std::string label;
    MeshSource mesh;
    std::map<std::string, double> materials;  // overrides, S/m
    std::vector<ElectrodeSpec> electrodes;
    SolveSettings solver;
    std::vector<std::string> report_regions;  // empty: every region
    OutputSpec outputs;
};

/**
 * Parses a scenario config:
 *
 *   {"scenarios": [{"label", "mesh": {"nastran": path, "region_map": path} | {"phantom": {...}},
 *                   "materials": {name: S/m}, "electrodes": [{"name", "role", "box" | "patch" | "region",
 *                   "current_mA"}], "solver": {"rel_tol", "max_iter", "preconditioner"},
 *                   "report_regions": [...], "outputs": {"vtk", "csv", "json", "cap"}}]}
 *
 * Relative paths resolve against `base_dir`. Unknown keys are rejected. Throws ConfigError
 * carrying a JSON pointer to the offending value.
 */
std::vector<Scenario> parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
std::vector<Scenario> load_config(const std::filesystem::path& path);

/// Phantom spec in the same JSON form as a config's "phantom" object ({"type": "head" | "slab", ...}).
std::variant<HeadPhantomSpec, SlabSpec> parse_phantom_spec(std::string_view json_text);
PhantomMesh make_phantom(const std::variant<HeadPhantomSpec, SlabSpec>& spec);

struct ElectrodeResult {
    std::string name;
    ElectrodeRole role = ElectrodeRole::anode;
    double current_mA = 0.0;
    double area = 0.0;  // mm^2
    double flux = 0.0;          // A, consistent nodal flux, positive leaving the domain
    double element_flux = 0.0;  // A, from owner-element J (see electrode_flux)
};

struct ScenarioResult {
    std::string label;
    std::size_t nodes = 0;
    std::size_t elements = 0;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    double injected_current = 0.0;  // A
    std::vector<ElectrodeResult> electrodes;
    // Consistent nodal fluxes; these drive the conservation check.
    double anode_flux = 0.0;    // A, outward; -injected when conserved
    double cathode_flux = 0.0;  // A, outward; +injected when conserved
    double leakage = 0.0;       // A, outward through boundary nodes touching no electrode
    double imbalance = 0.0;     // |anode_flux + cathode_flux| / injected
    bool conservation_ok = true;
    // Same quantities from owner-element J. These converge with refinement but carry an O(h)
    // error, which is large where current turns sharply under an electrode.
    double element_anode_flux = 0.0;
    double element_cathode_flux = 0.0;
    double element_leakage = 0.0;
    double element_imbalance = 0.0;
    bool combined_circuits = false;  // several anodes share one ground
    std::vector<RegionReport> regions;
};

/// Maximum tolerated |anode + cathode flux| relative to the injected current.
inline constexpr double kConservationTolerance = 0.01;

/// Everything produced by one pipeline run, for callers that need more than the report.
struct ScenarioRun {
    Mesh mesh;
    ConductivityField conductivity;
    std::vector<FaceSet> patches;  // aligned with Scenario::electrodes
    SymmetricCsr stiffness;        // assembled matrix before boundary conditions
    LinearSystem system;           // constrained system handed to the solver
    SolveResult solve;
    FieldSolution field;
    ScenarioResult result;
};

/// Runs mesh -> materials -> assembly -> boundary conditions -> PCG -> post-processing. Writes no files.
/// Errors are rethrown as StageError nested around the original exception.
ScenarioRun execute_scenario(const Scenario& s, unsigned threads = 1);

/// execute_scenario plus the configured VTK / CSV / JSON outputs, each written atomically.
ScenarioResult run_scenario(const Scenario& s, unsigned threads = 1);

std::string result_to_json(const ScenarioResult& r);
void write_result_csv(std::ostream& out, const ScenarioResult& r);

struct LabelledReports {
    std::string label;
    std::vector<RegionReport> regions;
};

LabelledReports read_report_json(const std::filesystem::path& path);
LabelledReports parse_report_json(std::string_view json_text);

/// max_j per (scenario, region) plus a left/right ratio per scenario.
struct ComparisonTable {
    std::vector<std::string> labels;
    std::vector<std::string> regions;
    std::vector<std::vector<double>> max_j;  // [label][region]
    std::string ratio_left;                  // region used as numerator, empty if no pair found
    std::string ratio_right;
    std::vector<double> left_right_ratio;    // one per label when a pair exists

    void write_csv(std::ostream& out) const;
};

/**
 * Tabulates `reports`. `regions` defaults to the regions of the first entry; the ratio uses the
 * first "<x>_left" / "<x>_right" pair among them. Throws Error with fewer than two labels or
 * when a region is missing from any report.
 */
ComparisonTable compare_reports(const std::vector<LabelledReports>& reports, std::vector<std::string> regions = {});

}  // namespace tens
