#include "tens/post.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "tens/error.hpp"
#include "tens/fem.hpp"

namespace tens {

std::vector<Vec3> element_gradient(const Mesh& m, std::span<const double> v)
{
    if (v.size() != m.node_count()) {
        throw Error("potential has " + std::to_string(v.size()) + " values for " + std::to_string(m.node_count()) +
                    " nodes");
    }
    std::vector<Vec3> e(m.element_count());
    for (std::size_t el = 0; el < m.element_count(); ++el) {
        const auto g = p1_geometry(element_coords_m(m, el));
        const auto& conn = m.element_nodes(el);
        Vec3 grad;
        for (int k = 0; k < 4; ++k) {
            grad += g.gradients[k] * v[conn[k]];
        }
        e[el] = -grad;
    }
    return e;
}

CurrentDensity current_density(const ConductivityField& c, std::span<const Vec3> e_field)
{
    if (c.sigma.size() != e_field.size()) {
        throw Error("conductivity and field lengths differ");
    }
    CurrentDensity out;
    out.j.resize(e_field.size());
    out.magnitude.resize(e_field.size());
    for (std::size_t i = 0; i < e_field.size(); ++i) {
        out.j[i] = e_field[i] * c.sigma[i];
        out.magnitude[i] = norm(out.j[i]);
    }
    return out;
}

FieldSolution make_field_solution(const Mesh& m, const ConductivityField& c, std::vector<double> potential)
{
    FieldSolution sol;
    sol.e_field = element_gradient(m, potential);
    auto j = current_density(c, sol.e_field);
    sol.potential = std::move(potential);
    sol.j_field = std::move(j.j);
    sol.j_mag = std::move(j.magnitude);
    return sol;
}

RegionReport region_stats(const Mesh& m, const FieldSolution& sol, std::string_view region)
{
    const auto id = m.find_region(region);
    if (!id) {
        throw Error("unknown region '" + std::string(region) + "'");
    }
    if (sol.j_mag.size() != m.element_count()) {
        throw Error("field solution does not match the mesh");
    }
    RegionReport r;
    r.region = std::string(region);
    bool found = false;
    double weighted = 0.0;
    for (std::size_t e = 0; e < m.element_count(); ++e) {
        const auto& el = m.elements()[e];
        if (el.region != *id) {
            continue;
        }
        const double vol = m.signed_volume(e);
        const double j = sol.j_mag[e];
        weighted += j * vol;
        r.volume += vol;
        if (!found || j > r.max_j || (j == r.max_j && el.id < r.argmax_element)) {
            r.max_j = j;
            r.argmax_element = el.id;
            r.argmax = m.centroid(e);
            found = true;
        }
    }
    if (!found) {
        throw Error("region '" + std::string(region) + "' has no elements");
    }
    r.mean_j = std::min(weighted / r.volume, r.max_j);  // rounding can push a uniform mean above the max
    return r;
}

double electrode_flux(const Mesh& m, const FieldSolution& sol, const FaceSet& patch)
{
    double flux = 0.0;
    for (const auto& f : patch.faces) {
        if (f.element >= m.element_count()) {
            throw Error("patch face references an element outside the mesh");
        }
        flux += dot(sol.j_field.at(f.element), f.normal) * (f.area * 1e-6);
    }
    return flux;
}

double consistent_flux(const SymmetricCsr& stiffness, std::span<const double> potential,
                       std::span<const std::size_t> nodes)
{
    std::vector<double> kv(potential.size());
    stiffness.multiply(potential, kv);
    double flux = 0.0;
    for (std::size_t i : nodes) {
        flux -= kv.at(i);
    }
    return flux;
}

std::string format_number(double v)
{
    if (v == 0.0) {
        return "0";
    }
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

namespace {

std::string format_vtk(double v)
{
    if (v == 0.0) {
        return "0";
    }
    std::array<char, 64> buf{};
    const int len = std::snprintf(buf.data(), buf.size(), "%.9g", v);
    return std::string(buf.data(), static_cast<std::size_t>(len));
}

}  // namespace

void write_vtk(std::ostream& out, const Mesh& m, const FieldSolution& sol, double cap)
{
    const std::size_t n = m.node_count();
    const std::size_t ne = m.element_count();
    if (sol.potential.size() != n || sol.j_mag.size() != ne) {
        throw Error("field solution does not match the mesh");
    }
    out << "# vtk DataFile Version 3.0\n"
        << "current density (A/m^2), potential (V), coordinates in mm\n"
        << "ASCII\n"
        << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << n << " double\n";
    for (const auto& node : m.nodes()) {
        out << format_vtk(node.pos.x) << ' ' << format_vtk(node.pos.y) << ' ' << format_vtk(node.pos.z) << '\n';
    }
    out << "CELLS " << ne << ' ' << 5 * ne << '\n';
    for (std::size_t e = 0; e < ne; ++e) {
        const auto& c = m.element_nodes(e);
        out << "4 " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
    }
    out << "CELL_TYPES " << ne << '\n';
    for (std::size_t e = 0; e < ne; ++e) {
        out << "10\n";
    }
    out << "CELL_DATA " << ne << '\n';
    out << "SCALARS j_mag double 1\nLOOKUP_TABLE default\n";
    for (double j : sol.j_mag) {
        out << format_vtk(j) << '\n';
    }
    out << "SCALARS j_mag_capped double 1\nLOOKUP_TABLE default\n";
    for (double j : sol.j_mag) {
        out << format_vtk(std::min(j, cap)) << '\n';
    }
    out << "POINT_DATA " << n << '\n';
    out << "SCALARS potential double 1\nLOOKUP_TABLE default\n";
    for (double v : sol.potential) {
        out << format_vtk(v) << '\n';
    }
}

void export_vtk(const Mesh& m, const FieldSolution& sol, double cap, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    write_vtk(out, m, sol, cap);
    if (!out) {
        throw Error("write failed: " + path.string());
    }
}

void write_reports_csv(std::ostream& out, std::span<const RegionReport> reports)
{
    out << "region,max_j,argmax_x,argmax_y,argmax_z,mean_j,volume\n";
    for (const auto& r : reports) {
        out << r.region << ',' << format_number(r.max_j) << ',' << format_number(r.argmax.x) << ','
            << format_number(r.argmax.y) << ',' << format_number(r.argmax.z) << ',' << format_number(r.mean_j) << ','
            << format_number(r.volume) << '\n';
    }
}

}  // namespace tens
