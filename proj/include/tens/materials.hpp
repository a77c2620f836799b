#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tens/mesh.hpp"

namespace tens {

/// Canonical form used for material name matching: lower case, runs of whitespace collapsed, trimmed.
std::string normalize_material_name(std::string_view name);

/// Tissue name -> isotropic conductivity in S/m.
class MaterialTable {
public:
    struct Entry {
        std::string name;
        double sigma;  // S/m
    };

    MaterialTable() = default;

    /// Adds or replaces `name`. Throws MaterialError if sigma <= 0.
    void set(std::string name, double sigma);

    std::optional<double> lookup(std::string_view name) const;
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::vector<Entry> entries_;
};

/// The sixteen tissue conductivities of the TENS head model.
MaterialTable default_table();

/// Per-element conductivity in S/m, aligned with Mesh::elements().
struct ConductivityField {
    std::vector<double> sigma;
};

/**
 * Resolves every element's region name in `overrides` first, then `table`.
 * Throws MaterialError naming the first unmapped region, or on a non-positive override.
 */
ConductivityField assign(const Mesh& m, const MaterialTable& table, const std::map<std::string, double>& overrides = {});

}  // namespace tens
