// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "support.hpp"
#include "tens/nastran.hpp"
#include "tens/phantom.hpp"
#include "tens/scenario.hpp"

using namespace tens;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

const RegionReport& region(const ScenarioResult& r, const std::string& name)
{
    for (const auto& reg : r.regions) {
        if (reg.region == name) {
            return reg;
        }
    }
    throw std::out_of_range("no region " + name);
}

Scenario drive(std::string label, MeshSource mesh, std::string anode, std::string cathode, double mA = 2.0)
{
    Scenario s;
    s.label = std::move(label);
    s.mesh = std::move(mesh);
    s.electrodes = {{"anode", ElectrodeRole::anode, NamedPatch{std::move(anode)}, mA},
                    {"cathode", ElectrodeRole::cathode, NamedPatch{std::move(cathode)}, 0.0}};
    return s;
}

SlabSpec slab(std::vector<SlabLayer> layers)
{
    SlabSpec spec;
    spec.width = 10;
    spec.height = 10;
    spec.pitch = 1.25;
    spec.layers = std::move(layers);
    return spec;
}

/// The four head-phantom conditions at the default geometry, computed once.
struct HeadRuns {
    ScenarioResult left_tens, right_tens, left_sham, right_sham;
};

const HeadRuns& head_runs()
{
    static const HeadRuns runs = [] {
        const HeadPhantomSpec spec;
        HeadRuns h;
        h.left_tens = execute_scenario(drive("left_tens", spec, "bridge_left", "neck")).result;
        h.right_tens = execute_scenario(drive("right_tens", spec, "bridge_right", "neck")).result;
        h.left_sham = execute_scenario(drive("left_sham", spec, "bridge_left", "cheek_left")).result;
        h.right_sham = execute_scenario(drive("right_sham", spec, "bridge_right", "cheek_right")).result;
        return h;
    }();
    return runs;
}

Outcome patch_test()
{
    const auto t0 = std::chrono::steady_clock::now();
    const SlabSpec spec = slab({{"Skin", 40, 0.465}});
    const auto run = execute_scenario(drive("patch", spec, "inlet", "outlet"));
    const double elapsed = seconds_since(t0);

    const auto exact = analytic_slab(spec, 2.0);
    double v_err = 0.0;
    for (std::size_t i = 0; i < run.mesh.node_count(); ++i) {
        v_err = std::max(v_err, std::abs(run.solve.potential[i] - exact.potential_at(run.mesh.nodes()[i].pos.x)));
    }
    v_err /= exact.voltage_drop;
    double j_err = 0.0;
    for (double j : run.field.j_mag) {
        j_err = std::max(j_err, rel(j, 20.0));
    }
    return {v_err <= 1e-8 && j_err <= 1e-6 && elapsed < 5.0,
            fmt("V err %.2e (<=1e-8), |J|=20 A/m^2 err %.2e (<=1e-6), %zu tets in %.2f s (<5 s)", v_err, j_err,
                run.mesh.element_count(), elapsed)};
}

Outcome two_layer_slab()
{
    const SlabSpec spec = slab({{"Skin", 20, 0.465}, {"Skeleton", 20, 0.02}});
    const auto run = execute_scenario(drive("two_layer", spec, "inlet", "outlet"));
    const auto exact = analytic_slab(spec, 2.0);
    double e_err = 0.0;
    double j_min[2] = {INFINITY, INFINITY};
    double j_max[2] = {0.0, 0.0};
    for (std::size_t e = 0; e < run.mesh.element_count(); ++e) {
        const std::size_t layer = run.mesh.region_name_of(e) == "Skin" ? 0 : 1;
        e_err = std::max(e_err, rel(norm(run.field.e_field[e]), exact.layer_field[layer]));
        j_min[layer] = std::min(j_min[layer], run.field.j_mag[e]);
        j_max[layer] = std::max(j_max[layer], run.field.j_mag[e]);
    }
    const double jump = std::max(rel(j_max[1], j_min[0]), rel(j_max[0], j_min[1]));
    return {e_err <= 1e-6 && jump <= 1e-6,
            fmt("E skin %.4g / skeleton %.4g V/m, max rel err %.2e (<=1e-6); J jump across interface %.2e (<=1e-6)",
                exact.layer_field[0], exact.layer_field[1], e_err, jump)};
}

Outcome conservation()
{
    std::vector<ScenarioResult> all;
    const auto& h = head_runs();
    all = {h.left_tens, h.right_tens, h.left_sham, h.right_sham};
    all.push_back(execute_scenario(drive("slab", slab({{"Skin", 40, 0.465}}), "inlet", "outlet")).result);
    all.push_back(execute_scenario(
        drive("two_layer", slab({{"Skin", 20, 0.465}, {"Skeleton", 20, 0.02}}), "inlet", "outlet")).result);

    bool pass = true;
    double worst_anode = 0.0, worst_cathode = 0.0, worst_leak = 0.0;
    double el_anode = 0.0, el_cathode = 0.0, el_leak = 0.0;
    for (const auto& r : all) {
        const double i = r.injected_current;
        // Fluxes are stored positive leaving; current entering at the anode is -anode_flux.
        const double a = rel(-r.anode_flux, i);
        const double c = rel(-r.cathode_flux, -i);
        const double l = std::abs(r.leakage) / i;
        pass = pass && a <= 5e-3 && c <= 5e-3 && l < 5e-3;
        worst_anode = std::max(worst_anode, a);
        worst_cathode = std::max(worst_cathode, c);
        worst_leak = std::max(worst_leak, l);
        el_anode = std::max(el_anode, rel(-r.element_anode_flux, i));
        el_cathode = std::max(el_cathode, rel(-r.element_cathode_flux, -i));
        el_leak = std::max(el_leak, std::abs(r.element_leakage) / i);
    }
    std::cout << fmt("[INFO] 3 element-wise J.n.A fluxes (first order in pitch): worst anode err %.1f%%, "
                     "cathode err %.1f%%, leakage %.1f%% of I",
                     100 * el_anode, 100 * el_cathode, 100 * el_leak)
              << '\n';
    return {pass, fmt("%zu scenarios, nodal reaction flux: worst anode err %.2e, cathode err %.2e, leakage %.2e "
                      "of I (each <5e-3)",
                      all.size(), worst_anode, worst_cathode, worst_leak)};
}

Outcome laterality()
{
    const auto& h = head_runs();
    const double ll = region(h.left_tens, "Nerve_left").max_j;
    const double lr = region(h.left_tens, "Nerve_right").max_j;
    const double rl = region(h.right_tens, "Nerve_left").max_j;
    const double rr = region(h.right_tens, "Nerve_right").max_j;
    const double mirror = std::max(rel(rr, ll), rel(rl, lr));
    return {ll > lr && rr > rl && mirror <= 1e-10,
            fmt("left bridge L %.6g > R %.6g; right bridge R %.6g > L %.6g A/m^2; mirror diff %.2e (<=1e-10)", ll, lr,
                rr, rl, mirror)};
}

Outcome tens_over_sham()
{
    const auto& h = head_runs();
    const double tens = region(h.left_tens, "Nerve_left").max_j;
    const double sham = region(h.left_sham, "Nerve_left").max_j;
    return {tens > sham, fmt("Nerve_left max_j TENS %.6g vs sham %.6g A/m^2, ratio %.4f", tens, sham, tens / sham)};
}

Outcome linearity()
{
    const HeadPhantomSpec spec;
    const auto base = head_runs().left_tens;
    const auto doubled = execute_scenario(drive("left_tens_4mA", spec, "bridge_left", "neck", 4.0)).result;
    const double tol = 2 * SolveSettings{}.rel_tolerance;
    double worst = 0.0;
    bool same_argmax = base.regions.size() == doubled.regions.size();
    for (std::size_t k = 0; k < base.regions.size() && same_argmax; ++k) {
        worst = std::max(worst, rel(doubled.regions[k].max_j, 2 * base.regions[k].max_j));
        same_argmax = doubled.regions[k].argmax_element == base.regions[k].argmax_element;
    }
    return {worst <= tol && same_argmax, fmt("%zu regions, worst |max_j(4 mA) / 2 max_j(2 mA) - 1| = %.2e (<=%.0e); "
                                             "argmax ids %s",
                                             base.regions.size(), worst, tol, same_argmax ? "unchanged" : "CHANGED")};
}

Outcome dense_oracle()
{
    const auto run = execute_scenario(drive("coarse", test::coarse_head(), "bridge_left", "neck"));
    const double err = oracle::relative_inf_error(run.solve.potential, oracle::dense_solve(run.system));
    return {run.mesh.node_count() <= 2000 && err <= 1e-7,
            fmt("%zu nodes, PCG (rel_tol %.0e, %zu it) vs dense LU: %.2e (<=1e-7)", run.mesh.node_count(),
                SolveSettings{}.rel_tolerance, run.solve.iterations, err)};
}

/// Small-field card image: 8-column name then right-aligned 8-column fields.
std::string fixed_card(const std::string& name, const std::vector<std::string>& fields)
{
    std::string line = name;
    line.resize(8, ' ');
    for (const auto& f : fields) {
        if (f.size() > 8) {
            throw std::runtime_error("field too wide for small-field format: " + f);
        }
        line += std::string(8 - f.size(), ' ') + f;
    }
    return line + '\n';
}

std::string shortest(double v)
{
    std::ostringstream s;
    s << v;
    std::string out = s.str();
    if (out.find('.') == std::string::npos) {
        out += '.';
    }
    return out;
}

Outcome parser()
{
    // First 1000 elements of a 7 x 6 x 4 structured grid, with only the nodes they use.
    SlabSpec spec;
    spec.width = 15;
    spec.height = 10;
    spec.pitch = 2.5;
    spec.layers = {{"Skin", 10, 0.465}, {"Skeleton", 7.5, 0.02}};
    const Mesh grid = make_slab(spec).mesh;
    std::vector<Element> elements(grid.elements().begin(), grid.elements().begin() + 1000);
    std::set<NodeId> used;
    for (const auto& e : elements) {
        used.insert(e.nodes.begin(), e.nodes.end());
    }
    std::vector<Node> nodes;
    for (const auto& n : grid.nodes()) {
        if (used.contains(n.id)) {
            nodes.push_back(n);
        }
    }
    const Mesh source(nodes, elements, {});

    std::string fixed = "BEGIN BULK\n";
    std::string free = "BEGIN BULK\n";
    for (const auto& n : source.nodes()) {
        fixed += fixed_card("GRID", {std::to_string(n.id), "", shortest(n.pos.x), shortest(n.pos.y), shortest(n.pos.z)});
        free += fmt("GRID,%lld,,%.17g,%.17g,%.17g\n", static_cast<long long>(n.id), n.pos.x, n.pos.y, n.pos.z);
    }
    for (const auto& e : source.elements()) {
        const auto& g = e.nodes;
        fixed += fixed_card("CTETRA", {std::to_string(e.id), std::to_string(e.region), std::to_string(g[0]),
                                       std::to_string(g[1]), std::to_string(g[2]), std::to_string(g[3])});
        free += fmt("CTETRA,%lld,%lld,%lld,%lld,%lld,%lld\n", static_cast<long long>(e.id),
                    static_cast<long long>(e.region), static_cast<long long>(g[0]), static_cast<long long>(g[1]),
                    static_cast<long long>(g[2]), static_cast<long long>(g[3]));
    }
    fixed += "ENDDATA\n";
    free += "ENDDATA\n";
    std::istringstream fixed_in(fixed), free_in(free);
    const Mesh from_fixed = parse_nastran(fixed_in);
    const Mesh from_free = parse_nastran(free_in);
    const bool encodings_agree = from_fixed == from_free && from_fixed.element_count() == 1000;

    // Round trip on a jittered mesh so coordinates carry full precision.
    const Mesh jittered = test::jittered_grid(6, 42);
    std::stringstream buf;
    write_nastran(buf, jittered);
    const Mesh back = parse_nastran(buf);
    bool connectivity = back.elements() == jittered.elements() && back.node_count() == jittered.node_count();
    double coord_err = 0.0;
    for (std::size_t i = 0; connectivity && i < back.node_count(); ++i) {
        const Node& a = back.nodes()[i];
        const Node& b = jittered.nodes()[i];
        connectivity = a.id == b.id;
        coord_err = std::max(coord_err, norm(a.pos - b.pos) / std::max(norm(b.pos), 1.0));
    }
    return {encodings_agree && connectivity && coord_err <= 1e-9,
            fmt("fixed vs free on %zu tets / %zu nodes: %s; round trip on %zu tets: connectivity %s, coord err %.2e "
                "(<=1e-9)",
                from_fixed.element_count(), from_fixed.node_count(), encodings_agree ? "identical" : "DIFFER",
                back.element_count(), connectivity ? "exact" : "DIFFERS", coord_err)};
}

Outcome scale()
{
    HeadPhantomSpec spec;
    spec.width = spec.height = spec.depth = 80;
    spec.skin_thickness = 5;
    spec.skeleton_thickness = 5;
    spec.nerve_size = 5;
    spec.nerve_offset = 17.5;
    spec.nerve_height = 52.5;
    spec.nerve_z_min = 35;
    spec.nerve_z_max = 65;
    spec.bridge_height = 60;
    spec.neck_height = 20;
    spec.cheek_height = 55;
    spec.cheek_depth = 60;
    spec.pitch = 2.5;
    const auto t0 = std::chrono::steady_clock::now();
    const auto run = execute_scenario(drive("scale", spec, "bridge_left", "neck"), 1);
    const double elapsed = seconds_since(t0);
    const auto& r = run.result;
    return {r.relative_residual <= 1e-8 && elapsed < 60.0,
            fmt("%zu tets, %zu nodes at pitch 2.5 mm: residual %.2e in %zu it, %.1f s single-threaded (<60 s)",
                r.elements, r.nodes, r.relative_residual, r.iterations, elapsed)};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism()
{
    std::vector<std::filesystem::path> dirs;
    for (const char* name : {"determinism_a", "determinism_b"}) {
        const auto dir = test::scratch_dir(name);
        Scenario s = drive("left_tens", HeadPhantomSpec{}, "bridge_left", "neck");
        s.outputs.vtk = dir / "out.vtk";
        s.outputs.csv = dir / "out.csv";
        s.outputs.json = dir / "out.json";
        run_scenario(s, 1);
        dirs.push_back(dir);
    }
    bool same = true;
    std::size_t bytes = 0;
    for (const char* file : {"out.vtk", "out.csv", "out.json"}) {
        const auto a = slurp(dirs[0] / file);
        const auto b = slurp(dirs[1] / file);
        same = same && !a.empty() && a == b;
        bytes += a.size();
    }
    return {same, fmt("VTK, CSV and JSON from two runs %s (%zu bytes)", same ? "byte-identical" : "DIFFER", bytes)};
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"patch test", patch_test},
        {"two-layer slab", two_layer_slab},
        {"conservation", conservation},
        {"laterality", laterality},
        {"TENS > sham", tens_over_sham},
        {"linearity", linearity},
        {"dense oracle", dense_oracle},
        {"parser", parser},
        {"scale", scale},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << k + 1 << ' ' << criteria[k].first << ": " << o.detail
                  << std::endl;
    }
    std::cout << criteria.size() - failed << '/' << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
