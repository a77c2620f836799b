#include "tens/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tens/error.hpp"
#include "tens/nastran.hpp"

namespace tens {

using nlohmann::json;

std::string_view to_string(ElectrodeRole role)
{
    return role == ElectrodeRole::anode ? "anode" : "cathode";
}

namespace {

std::string child(const std::string& pointer, std::string_view key)
{
    std::string escaped;
    for (char c : key) {
        if (c == '~') {
            escaped += "~0";
        } else if (c == '/') {
            escaped += "~1";
        } else {
            escaped += c;
        }
    }
    return pointer + "/" + escaped;
}

std::string child(const std::string& pointer, std::size_t index)
{
    return pointer + "/" + std::to_string(index);
}

/// Reads members of one JSON object and rejects whatever it did not ask for.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string pointer) : j_(j), pointer_(std::move(pointer))
    {
        if (!j_.is_object()) {
            throw ConfigError(pointer_.empty() ? "/" : pointer_, "expected an object");
        }
    }

    const std::string& pointer() const { return pointer_; }

    const json* find(const std::string& key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key)
    {
        const json* v = find(key);
        if (!v) {
            throw ConfigError(child(pointer_, key), "required member is missing");
        }
        return *v;
    }

    std::string string(const std::string& key)
    {
        const json& v = require(key);
        if (!v.is_string()) {
            throw ConfigError(child(pointer_, key), "expected a string");
        }
        return v.get<std::string>();
    }

    std::optional<std::string> optional_string(const std::string& key)
    {
        if (!find(key)) {
            return std::nullopt;
        }
        return string(key);
    }

    std::optional<double> optional_number(const std::string& key)
    {
        const json* v = find(key);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_number()) {
            throw ConfigError(child(pointer_, key), "expected a number");
        }
        return v->get<double>();
    }

    double number(const std::string& key, double fallback) { return optional_number(key).value_or(fallback); }

    void finish() const
    {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError(child(pointer_, key), "unknown key");
            }
        }
    }

private:
    const json& j_;
    std::string pointer_;
    std::set<std::string> seen_;
};

Vec3 read_vec3(const json& j, const std::string& pointer)
{
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
        throw ConfigError(pointer, "expected an array of three numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Box read_box(const json& j, const std::string& pointer)
{
    ObjectReader r(j, pointer);
    Box b{read_vec3(r.require("min"), child(pointer, "min")), read_vec3(r.require("max"), child(pointer, "max"))};
    r.finish();
    if (b.degenerate()) {
        throw ConfigError(pointer, "box must have max > min on every axis");
    }
    return b;
}

HeadPhantomSpec read_head_spec(ObjectReader& r)
{
    HeadPhantomSpec s;
    s.width = r.number("width", s.width);
    s.height = r.number("height", s.height);
    s.depth = r.number("depth", s.depth);
    s.skin_thickness = r.number("skin_thickness", s.skin_thickness);
    s.skeleton_thickness = r.number("skeleton_thickness", s.skeleton_thickness);
    s.nerve_size = r.number("nerve_size", s.nerve_size);
    s.nerve_offset = r.number("nerve_offset", s.nerve_offset);
    s.nerve_height = r.number("nerve_height", s.nerve_height);
    s.nerve_z_min = r.number("nerve_z_min", s.nerve_z_min);
    s.nerve_z_max = r.number("nerve_z_max", s.nerve_z_max);
    s.electrode_size = r.number("electrode_size", s.electrode_size);
    s.bridge_offset = r.number("bridge_offset", s.bridge_offset);
    s.bridge_height = r.number("bridge_height", s.bridge_height);
    s.neck_height = r.number("neck_height", s.neck_height);
    s.cheek_height = r.number("cheek_height", s.cheek_height);
    s.cheek_depth = r.number("cheek_depth", s.cheek_depth);
    s.pitch = r.number("pitch", s.pitch);
    return s;
}

SlabSpec read_slab_spec(ObjectReader& r)
{
    SlabSpec s;
    s.width = r.number("width", s.width);
    s.height = r.number("height", s.height);
    s.pitch = r.number("pitch", s.pitch);
    const json& layers = r.require("layers");
    const std::string lp = child(r.pointer(), "layers");
    if (!layers.is_array() || layers.empty()) {
        throw ConfigError(lp, "expected a non-empty array of layers");
    }
    const auto table = default_table();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        ObjectReader lr(layers[i], child(lp, i));
        SlabLayer layer;
        layer.name = lr.string("name");
        layer.thickness = lr.number("thickness", 0.0);
        auto sigma = lr.optional_number("sigma");
        if (!sigma) {
            sigma = table.lookup(layer.name);
            if (!sigma) {
                throw ConfigError(child(lr.pointer(), "sigma"),
                                  "layer '" + layer.name + "' is not a known tissue; give its sigma");
            }
        }
        layer.sigma = *sigma;
        lr.finish();
        s.layers.push_back(std::move(layer));
    }
    return s;
}

std::variant<HeadPhantomSpec, SlabSpec> read_phantom(const json& j, const std::string& pointer)
{
    ObjectReader r(j, pointer);
    const std::string type = r.optional_string("type").value_or("head");
    std::variant<HeadPhantomSpec, SlabSpec> out;
    if (type == "head") {
        out = read_head_spec(r);
    } else if (type == "slab") {
        out = read_slab_spec(r);
    } else {
        throw ConfigError(child(pointer, "type"), "phantom type must be \"head\" or \"slab\"");
    }
    r.finish();
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

MeshSource read_mesh_source(const json& j, const std::string& pointer, const std::filesystem::path& base)
{
    ObjectReader r(j, pointer);
    const json* nastran = r.find("nastran");
    const json* phantom = r.find("phantom");
    if ((nastran != nullptr) == (phantom != nullptr)) {
        throw ConfigError(pointer, "mesh needs exactly one of \"nastran\" or \"phantom\"");
    }
    MeshSource out;
    if (nastran) {
        NastranSource src;
        src.path = resolve(base, r.string("nastran"));
        if (auto map = r.optional_string("region_map")) {
            src.region_map = resolve(base, *map);
        }
        out = src;
    } else {
        auto spec = read_phantom(*phantom, child(pointer, "phantom"));
        std::visit([&out](auto&& s) { out = s; }, spec);
    }
    r.finish();
    return out;
}

ElectrodeSpec read_electrode(const json& j, const std::string& pointer)
{
    ObjectReader r(j, pointer);
    ElectrodeSpec e;
    e.name = r.string("name");
    const std::string role = r.string("role");
    if (role == "anode") {
        e.role = ElectrodeRole::anode;
    } else if (role == "cathode") {
        e.role = ElectrodeRole::cathode;
    } else {
        throw ConfigError(child(pointer, "role"), "role must be \"anode\" or \"cathode\"");
    }

    const json* box = r.find("box");
    const json* patch = r.find("patch");
    const json* region = r.find("region");
    const int selectors = (box != nullptr) + (patch != nullptr) + (region != nullptr);
    if (selectors != 1) {
        throw ConfigError(pointer, "electrode needs exactly one of \"box\", \"patch\" or \"region\"");
    }
    if (box) {
        e.selector = read_box(*box, child(pointer, "box"));
    } else if (patch) {
        e.selector = NamedPatch{r.string("patch")};
    } else {
        e.selector = RegionAdjacency{r.string("region")};
    }

    const auto current = r.optional_number("current_mA");
    if (e.role == ElectrodeRole::cathode) {
        if (current) {
            throw ConfigError(child(pointer, "current_mA"), "a cathode is grounded and takes no current");
        }
        e.current_mA = 0.0;
    } else {
        e.current_mA = current.value_or(kDefaultCurrent_mA);
        if (!(e.current_mA > 0.0) || !std::isfinite(e.current_mA)) {
            throw ConfigError(child(pointer, "current_mA"), "anode current must be positive");
        }
    }
    r.finish();
    return e;
}

SolveSettings read_solver(const json& j, const std::string& pointer)
{
    ObjectReader r(j, pointer);
    SolveSettings s;
    s.rel_tolerance = r.number("rel_tol", s.rel_tolerance);
    if (const json* it = r.find("max_iter")) {
        if (!it->is_number_integer() || it->get<long long>() < 1) {
            throw ConfigError(child(pointer, "max_iter"), "expected a positive integer");
        }
        s.max_iterations = it->get<std::size_t>();
    }
    if (auto pc = r.optional_string("preconditioner")) {
        if (*pc == "jacobi") {
            s.preconditioner = Preconditioner::jacobi;
        } else if (*pc == "none") {
            s.preconditioner = Preconditioner::none;
        } else {
            throw ConfigError(child(pointer, "preconditioner"), "expected \"jacobi\" or \"none\"");
        }
    }
    r.finish();
    if (!(s.rel_tolerance > 0.0 && s.rel_tolerance < 1.0)) {
        throw ConfigError(child(pointer, "rel_tol"), "tolerance must lie in (0, 1)");
    }
    return s;
}

OutputSpec read_outputs(const json& j, const std::string& pointer, const std::filesystem::path& base)
{
    ObjectReader r(j, pointer);
    OutputSpec o;
    if (auto p = r.optional_string("vtk")) {
        o.vtk = resolve(base, *p);
    }
    if (auto p = r.optional_string("csv")) {
        o.csv = resolve(base, *p);
    }
    if (auto p = r.optional_string("json")) {
        o.json = resolve(base, *p);
    }
    o.cap = r.number("cap", o.cap);
    if (!(o.cap > 0.0)) {
        throw ConfigError(child(pointer, "cap"), "cap must be positive");
    }
    r.finish();
    return o;
}

Scenario read_scenario(const json& j, const std::string& pointer, const std::filesystem::path& base)
{
    ObjectReader r(j, pointer);
    Scenario s;
    s.label = r.string("label");
    if (s.label.empty()) {
        throw ConfigError(child(pointer, "label"), "label must not be empty");
    }
    s.mesh = read_mesh_source(r.require("mesh"), child(pointer, "mesh"), base);

    if (const json* mats = r.find("materials")) {
        const std::string mp = child(pointer, "materials");
        if (!mats->is_object()) {
            throw ConfigError(mp, "expected an object of name: conductivity");
        }
        for (const auto& [name, value] : mats->items()) {
            if (!value.is_number() || !(value.get<double>() > 0.0)) {
                throw ConfigError(child(mp, name), "conductivity must be a positive number");
            }
            s.materials[name] = value.get<double>();
        }
    }

    const json& electrodes = r.require("electrodes");
    const std::string ep = child(pointer, "electrodes");
    if (!electrodes.is_array()) {
        throw ConfigError(ep, "expected an array");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < electrodes.size(); ++i) {
        s.electrodes.push_back(read_electrode(electrodes[i], child(ep, i)));
        if (!names.insert(s.electrodes.back().name).second) {
            throw ConfigError(child(child(ep, i), "name"), "duplicate electrode name");
        }
    }
    const auto anodes = std::count_if(s.electrodes.begin(), s.electrodes.end(),
                                      [](const ElectrodeSpec& e) { return e.role == ElectrodeRole::anode; });
    const auto cathodes = static_cast<std::ptrdiff_t>(s.electrodes.size()) - anodes;
    if (anodes == 0) {
        throw ConfigError(ep, "scenario needs at least one anode");
    }
    if (cathodes != 1) {
        throw ConfigError(ep, "scenario needs exactly one cathode, found " + std::to_string(cathodes));
    }

    if (const json* solver = r.find("solver")) {
        s.solver = read_solver(*solver, child(pointer, "solver"));
    }
    if (const json* regions = r.find("report_regions")) {
        const std::string rp = child(pointer, "report_regions");
        if (!regions->is_array()) {
            throw ConfigError(rp, "expected an array of region names");
        }
        for (std::size_t i = 0; i < regions->size(); ++i) {
            if (!(*regions)[i].is_string()) {
                throw ConfigError(child(rp, i), "expected a string");
            }
            s.report_regions.push_back((*regions)[i].get<std::string>());
        }
    }
    if (const json* outputs = r.find("outputs")) {
        s.outputs = read_outputs(*outputs, child(pointer, "outputs"), base);
    }
    r.finish();
    return s;
}

json parse_json(std::string_view text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::vector<Scenario> parse_config(std::string_view json_text, const std::filesystem::path& base_dir)
{
    const json root = parse_json(json_text);
    ObjectReader r(root, "");
    const json& list = r.require("scenarios");
    if (!list.is_array() || list.empty()) {
        throw ConfigError("/scenarios", "expected a non-empty array");
    }
    std::vector<Scenario> out;
    std::set<std::string> labels;
    for (std::size_t i = 0; i < list.size(); ++i) {
        out.push_back(read_scenario(list[i], child("/scenarios", i), base_dir));
        if (!labels.insert(out.back().label).second) {
            throw ConfigError(child(child("/scenarios", i), "label"), "duplicate label '" + out.back().label + "'");
        }
    }
    r.finish();
    return out;
}

std::vector<Scenario> load_config(const std::filesystem::path& path)
{
    std::string text;
    try {
        text = slurp(path);
    } catch (const Error& e) {
        throw ConfigError("/", e.what());
    }
    return parse_config(text, path.parent_path());
}

std::variant<HeadPhantomSpec, SlabSpec> parse_phantom_spec(std::string_view json_text)
{
    return read_phantom(parse_json(json_text), "");
}

PhantomMesh make_phantom(const std::variant<HeadPhantomSpec, SlabSpec>& spec)
{
    if (const auto* head = std::get_if<HeadPhantomSpec>(&spec)) {
        return make_head_phantom(*head);
    }
    return make_slab(std::get<SlabSpec>(spec));
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (...) {
        std::throw_with_nested(StageError(name, [] {
            try {
                throw;
            } catch (const std::exception& e) {
                return std::string(e.what());
            } catch (...) {
                return std::string("unknown error");
            }
        }()));
    }
}

}  // namespace

ScenarioRun execute_scenario(const Scenario& s, unsigned threads)
{
    ScenarioRun run;
    PhantomMesh source = stage("mesh", [&] {
        PhantomMesh pm;
        if (const auto* nas = std::get_if<NastranSource>(&s.mesh)) {
            pm.mesh = read_nastran(nas->path);
            if (nas->region_map) {
                pm.mesh = pm.mesh.with_region_names(read_region_map(*nas->region_map));
            }
        } else if (const auto* head = std::get_if<HeadPhantomSpec>(&s.mesh)) {
            pm = make_head_phantom(*head);
        } else {
            pm = make_slab(std::get<SlabSpec>(s.mesh));
        }
        require_valid(pm.mesh);
        for (const auto& region : s.report_regions) {
            if (!pm.mesh.find_region(region)) {
                throw MeshError("report region '" + region + "' does not exist in the mesh");
            }
        }
        return pm;
    });
    run.mesh = std::move(source.mesh);
    const Mesh& mesh = run.mesh;

    run.conductivity = stage("materials", [&] {
        auto overrides = source.conductivities;
        for (const auto& [name, sigma] : s.materials) {
            overrides[name] = sigma;
        }
        return assign(mesh, default_table(), overrides);
    });

    const FaceSet boundary = stage("boundary", [&] { return extract_boundary(mesh); });

    run.patches = stage("electrodes", [&] {
        std::vector<FaceSet> patches;
        for (const auto& e : s.electrodes) {
            PatchSelector sel;
            if (const auto* box = std::get_if<Box>(&e.selector)) {
                sel = *box;
            } else if (const auto* named = std::get_if<NamedPatch>(&e.selector)) {
                auto it = source.patches.find(named->name);
                if (it == source.patches.end()) {
                    throw MeshError("electrode '" + e.name + "': mesh source has no patch named '" + named->name +
                                    "'");
                }
                sel = it->second;
            } else {
                sel = std::get<RegionAdjacency>(e.selector);
            }
            try {
                patches.push_back(select_patch(mesh, boundary, sel));
            } catch (const MeshError& err) {
                throw MeshError("electrode '" + e.name + "': " + err.what());
            }
        }
        std::vector<int> owner(mesh.node_count(), -1);
        for (std::size_t i = 0; i < patches.size(); ++i) {
            for (std::size_t node : patches[i].node_indices()) {
                if (owner[node] >= 0 && s.electrodes[owner[node]].role != s.electrodes[i].role) {
                    throw MeshError("anode '" + s.electrodes[owner[node]].name + "' and cathode '" +
                                    s.electrodes[i].name + "' touch");
                }
                owner[node] = static_cast<int>(i);
            }
        }
        return patches;
    });

    run.system = stage("assemble", [&] {
        LinearSystem sys = assemble(mesh, run.conductivity, threads);
        run.stiffness = sys.matrix;
        std::vector<std::size_t> ground;
        for (std::size_t i = 0; i < s.electrodes.size(); ++i) {
            if (s.electrodes[i].role == ElectrodeRole::anode) {
                sys = apply_neumann(std::move(sys), NeumannLoad(run.patches[i], s.electrodes[i].current_mA));
            } else {
                const auto nodes = run.patches[i].node_indices();
                ground.insert(ground.end(), nodes.begin(), nodes.end());
            }
        }
        return apply_dirichlet(std::move(sys), ground);
    });

    run.solve = stage("solve", [&] { return solve_pcg(run.system, s.solver); });

    stage("post", [&] {
        run.field = make_field_solution(mesh, run.conductivity, run.solve.potential);

        ScenarioResult& r = run.result;
        r.label = s.label;
        r.nodes = mesh.node_count();
        r.elements = mesh.element_count();
        r.iterations = run.solve.iterations;
        r.relative_residual = run.solve.relative_residual;

        std::set<std::pair<ElementId, int>> on_electrode;
        std::vector<bool> electrode_node(mesh.node_count(), false);
        // Same-role patches may share edge nodes, so totals are taken over the union of each side.
        FaceSet anode_side;
        FaceSet cathode_side;
        std::size_t anodes = 0;
        for (std::size_t i = 0; i < s.electrodes.size(); ++i) {
            const auto& e = s.electrodes[i];
            const auto nodes = run.patches[i].node_indices();
            ElectrodeResult er;
            er.name = e.name;
            er.role = e.role;
            er.current_mA = e.role == ElectrodeRole::anode ? e.current_mA : 0.0;
            er.area = run.patches[i].area();
            er.flux = consistent_flux(run.stiffness, run.solve.potential, nodes);
            er.element_flux = electrode_flux(mesh, run.field, run.patches[i]);
            if (e.role == ElectrodeRole::anode) {
                r.injected_current += e.current_mA * 1e-3;
                ++anodes;
            }
            auto& side = e.role == ElectrodeRole::anode ? anode_side : cathode_side;
            for (const auto& f : run.patches[i].faces) {
                if (on_electrode.emplace(f.element_id, f.local_face).second) {
                    side.faces.push_back(f);
                }
            }
            for (std::size_t n : nodes) {
                electrode_node[n] = true;
            }
            r.electrodes.push_back(std::move(er));
        }
        r.anode_flux = consistent_flux(run.stiffness, run.solve.potential, anode_side.node_indices());
        r.cathode_flux = consistent_flux(run.stiffness, run.solve.potential, cathode_side.node_indices());
        r.element_anode_flux = electrode_flux(mesh, run.field, anode_side);
        r.element_cathode_flux = electrode_flux(mesh, run.field, cathode_side);
        FaceSet insulated;
        for (const auto& f : boundary.faces) {
            if (!on_electrode.contains({f.element_id, f.local_face})) {
                insulated.faces.push_back(f);
            }
        }
        std::vector<std::size_t> free_nodes;
        for (std::size_t n : insulated.node_indices()) {
            if (!electrode_node[n]) {
                free_nodes.push_back(n);
            }
        }
        r.leakage = consistent_flux(run.stiffness, run.solve.potential, free_nodes);
        r.element_leakage = electrode_flux(mesh, run.field, insulated);
        const auto relative = [&](double net) {
            return r.injected_current > 0.0 ? net / r.injected_current : net;
        };
        const double net = std::abs(r.anode_flux + r.cathode_flux);
        r.imbalance = relative(net);
        r.conservation_ok = net <= kConservationTolerance * r.injected_current;
        r.element_imbalance = relative(std::abs(r.element_anode_flux + r.element_cathode_flux));
        r.combined_circuits = anodes > 1;

        std::vector<std::string> regions = s.report_regions;
        if (regions.empty()) {
            for (const auto& [id, name] : mesh.region_names()) {
                regions.push_back(name);
            }
        }
        for (const auto& name : regions) {
            r.regions.push_back(region_stats(mesh, run.field, name));
        }
        return 0;
    });
    return run;
}

namespace {

void write_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        body(out);
        if (!out) {
            throw Error("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

json region_to_json(const RegionReport& r)
{
    return {{"region", r.region},
            {"max_j", r.max_j},
            {"argmax", {r.argmax.x, r.argmax.y, r.argmax.z}},
            {"argmax_element", r.argmax_element},
            {"mean_j", r.mean_j},
            {"volume", r.volume}};
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s, unsigned threads)
{
    ScenarioRun run = execute_scenario(s, threads);
    stage("output", [&] {
        if (s.outputs.vtk) {
            write_atomically(*s.outputs.vtk,
                             [&](std::ostream& out) { write_vtk(out, run.mesh, run.field, s.outputs.cap); });
        }
        if (s.outputs.csv) {
            write_atomically(*s.outputs.csv, [&](std::ostream& out) { write_result_csv(out, run.result); });
        }
        if (s.outputs.json) {
            write_atomically(*s.outputs.json, [&](std::ostream& out) { out << result_to_json(run.result) << '\n'; });
        }
        return 0;
    });
    return std::move(run.result);
}

std::string result_to_json(const ScenarioResult& r)
{
    json electrodes = json::array();
    for (const auto& e : r.electrodes) {
        electrodes.push_back({{"name", e.name},
                              {"role", std::string(to_string(e.role))},
                              {"current_mA", e.current_mA},
                              {"area_mm2", e.area},
                              {"flux_A", e.flux},
                              {"element_flux_A", e.element_flux}});
    }
    json regions = json::array();
    for (const auto& reg : r.regions) {
        regions.push_back(region_to_json(reg));
    }
    json j = {{"label", r.label},
              {"argmax_convention", "centroid of the element with the largest |J|; lowest element id on ties"},
              {"units", {{"current_density", "A/m^2"}, {"length", "mm"}, {"current", "A"}}},
              {"mesh", {{"nodes", r.nodes}, {"elements", r.elements}}},
              {"solver", {{"iterations", r.iterations}, {"relative_residual", r.relative_residual}}},
              {"injected_current_A", r.injected_current},
              {"electrodes", electrodes},
              {"leakage_A", r.leakage},
              {"conservation",
               {{"anode_flux_A", r.anode_flux},
                {"cathode_flux_A", r.cathode_flux},
                {"relative_imbalance", r.imbalance},
                {"ok", r.conservation_ok},
                {"element_wise",
                 {{"anode_flux_A", r.element_anode_flux},
                  {"cathode_flux_A", r.element_cathode_flux},
                  {"leakage_A", r.element_leakage},
                  {"relative_imbalance", r.element_imbalance}}}}},
              {"combined_circuits_approximation", r.combined_circuits},
              {"regions", regions}};
    return j.dump(2);
}

void write_result_csv(std::ostream& out, const ScenarioResult& r)
{
    write_reports_csv(out, r.regions);
}

LabelledReports parse_report_json(std::string_view json_text)
{
    const json j = parse_json(json_text);
    LabelledReports out;
    try {
        out.label = j.at("label").get<std::string>();
        for (const auto& reg : j.at("regions")) {
            RegionReport r;
            r.region = reg.at("region").get<std::string>();
            r.max_j = reg.at("max_j").get<double>();
            const auto& a = reg.at("argmax");
            r.argmax = {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
            r.argmax_element = reg.value("argmax_element", ElementId{0});
            r.mean_j = reg.at("mean_j").get<double>();
            r.volume = reg.at("volume").get<double>();
            out.regions.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
    return out;
}

LabelledReports read_report_json(const std::filesystem::path& path)
{
    return parse_report_json(slurp(path));
}

namespace {

std::optional<std::pair<std::string, std::string>> find_left_right(const std::vector<std::string>& regions)
{
    const std::string_view suffix = "_left";
    for (const auto& r : regions) {
        if (r.size() > suffix.size() && r.compare(r.size() - suffix.size(), suffix.size(), suffix) == 0) {
            const std::string right = r.substr(0, r.size() - suffix.size()) + "_right";
            if (std::find(regions.begin(), regions.end(), right) != regions.end()) {
                return std::pair{r, right};
            }
        }
    }
    return std::nullopt;
}

}  // namespace

ComparisonTable compare_reports(const std::vector<LabelledReports>& reports, std::vector<std::string> regions)
{
    if (reports.size() < 2) {
        throw Error("comparison needs at least two reports");
    }
    if (regions.empty()) {
        for (const auto& r : reports.front().regions) {
            regions.push_back(r.region);
        }
    }
    ComparisonTable t;
    t.regions = regions;
    const auto pair = find_left_right(regions);
    if (pair) {
        t.ratio_left = pair->first;
        t.ratio_right = pair->second;
    }
    for (const auto& rep : reports) {
        t.labels.push_back(rep.label);
        std::vector<double> row;
        for (const auto& name : regions) {
            auto it = std::find_if(rep.regions.begin(), rep.regions.end(),
                                   [&](const RegionReport& r) { return r.region == name; });
            if (it == rep.regions.end()) {
                throw Error("report '" + rep.label + "' has no region '" + name + "'");
            }
            row.push_back(it->max_j);
        }
        if (pair) {
            const auto li = std::find(regions.begin(), regions.end(), pair->first) - regions.begin();
            const auto ri = std::find(regions.begin(), regions.end(), pair->second) - regions.begin();
            t.left_right_ratio.push_back(row[li] / row[ri]);
        }
        t.max_j.push_back(std::move(row));
    }
    return t;
}

void ComparisonTable::write_csv(std::ostream& out) const
{
    out << "scenario";
    for (const auto& r : regions) {
        out << ',' << r;
    }
    if (!ratio_left.empty()) {
        out << ',' << ratio_left << '/' << ratio_right;
    }
    out << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << labels[i];
        for (double v : max_j[i]) {
            out << ',' << format_number(v);
        }
        if (!ratio_left.empty()) {
            out << ',' << format_number(left_right_ratio[i]);
        }
        out << '\n';
    }
}

}  // namespace tens
