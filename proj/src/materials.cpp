#include "tens/materials.hpp"

#include <cctype>
#include <cmath>

#include "tens/error.hpp"

namespace tens {

std::string normalize_material_name(std::string_view name)
{
    std::string out;
    bool pending_space = false;
    for (unsigned char c : name) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

void MaterialTable::set(std::string name, double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw MaterialError("conductivity of '" + name + "' must be positive, got " + std::to_string(sigma));
    }
    const auto key = normalize_material_name(name);
    for (auto& e : entries_) {
        if (normalize_material_name(e.name) == key) {
            e = {std::move(name), sigma};
            return;
        }
    }
    entries_.push_back({std::move(name), sigma});
}

std::optional<double> MaterialTable::lookup(std::string_view name) const
{
    const auto key = normalize_material_name(name);
    for (const auto& e : entries_) {
        if (normalize_material_name(e.name) == key) {
            return e.sigma;
        }
    }
    return std::nullopt;
}

MaterialTable default_table()
{
    MaterialTable t;
    t.set("Electrodes", 0.3);
    t.set("Inner tissue", 0.465);
    t.set("Skin", 0.465);
    t.set("Blood", 0.7);
    t.set("Vessel", 0.25);
    t.set("Organs", 0.465);
    t.set("Muscle", 0.2);
    t.set("Membranes", 0.5);
    t.set("CSF", 2.0);
    t.set("Ligaments", 0.25);
    t.set("Eye", 1.5);
    t.set("Cartilage", 0.15);
    t.set("Skeleton", 0.02);
    t.set("Brain and spinal cord", 0.04);
    t.set("Inner Nose", 0.25);
    t.set("Nerves", 0.006);
    return t;
}

ConductivityField assign(const Mesh& m, const MaterialTable& table, const std::map<std::string, double>& overrides)
{
    MaterialTable merged = table;
    for (const auto& [name, sigma] : overrides) {
        merged.set(name, sigma);
    }

    std::map<RegionId, double> by_region;
    for (const auto& el : m.elements()) {
        if (by_region.contains(el.region)) {
            continue;
        }
        auto it = m.region_names().find(el.region);
        const std::string name = it == m.region_names().end() ? std::to_string(el.region) : it->second;
        auto sigma = merged.lookup(name);
        if (!sigma) {
            throw MaterialError("region '" + name + "' has no conductivity in the material table or overrides");
        }
        by_region.emplace(el.region, *sigma);
    }

    ConductivityField out;
    out.sigma.reserve(m.element_count());
    for (const auto& el : m.elements()) {
        out.sigma.push_back(by_region.at(el.region));
    }
    return out;
}

}  // namespace tens
