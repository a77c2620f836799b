#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "tens/mesh.hpp"

namespace tens {

/// Side information gathered while parsing; nothing here affects the mesh.
struct NastranDiagnostics {
    std::map<std::string, std::size_t> skipped;  // unsupported card name -> count
    std::size_t quadratic_tets = 0;              // 10-node CTETRAs reduced to their corners
    std::size_t reoriented = 0;                  // CTETRAs flipped to positive volume

    std::size_t skipped_total() const;
};

/**
 * Reads the GRID / CTETRA / PSOLID subset of NASTRAN bulk data.
 *
 * Handles small-field, large-field (GRID*) and free-field cards, continuation
 * lines, `$` comments and optional BEGIN BULK / ENDDATA framing. PSOLID and
 * CTETRA property ids become region ids; a comment of the form
 * `$REGION <pid> <name>` names a region. Coordinates are taken as millimetres.
 * Elements are returned positively oriented.
 */
Mesh parse_nastran(std::istream& in, NastranDiagnostics* diagnostics = nullptr);
Mesh read_nastran(const std::filesystem::path& path, NastranDiagnostics* diagnostics = nullptr);

/// Free-field writer, one card per line, ENDDATA terminated. Region names go out as $REGION comments.
void write_nastran(std::ostream& out, const Mesh& m);
void write_nastran(const std::filesystem::path& path, const Mesh& m);

/// Parses a sidecar region map, a JSON object such as {"7": "Skin"}.
std::map<RegionId, std::string> parse_region_map(const std::string& json_text);
std::map<RegionId, std::string> read_region_map(const std::filesystem::path& path);

}  // namespace tens
