#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "tens/mesh.hpp"
#include "tens/phantom.hpp"

namespace tens::test {

inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::path(TENS_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Unit right-corner tetrahedron in mm, region 7 "Skin".
inline Mesh single_tet(double scale = 1.0)
{
    return Mesh({{1, {0, 0, 0}}, {2, {scale, 0, 0}}, {3, {0, scale, 0}}, {4, {0, 0, scale}}},
                {{1, {1, 2, 3, 4}, 7}}, {{7, "Skin"}});
}

/// Two tetrahedra sharing the face (2, 3, 4).
inline Mesh two_tets()
{
    return Mesh({{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {0, 1, 0}}, {4, {0, 0, 1}}, {5, {1, 1, 1}}},
                {{1, {1, 2, 3, 4}, 7}, {2, {2, 3, 4, 5}, 7}}, {{7, "Skin"}});
}

/// Cube of n x n x n cells of the given pitch, one "Skin" region.
inline PhantomMesh cube(int n, double pitch = 1.0)
{
    SlabSpec spec;
    spec.width = spec.height = n * pitch;
    spec.pitch = pitch;
    spec.layers = {{"Skin", n * pitch, 0.465}};
    return make_slab(spec);
}

/// Structured grid with every node jittered inside its cell, so no two tets share a shape.
inline Mesh jittered_grid(int n, std::uint64_t seed)
{
    auto base = cube(n, 1.0).mesh;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    std::vector<Node> nodes = base.nodes();
    for (auto& node : nodes) {
        node.pos = node.pos + Vec3{jitter(rng), jitter(rng), jitter(rng)};
    }
    return orient_elements(Mesh(std::move(nodes), base.elements(), base.region_names()));
}

/// Pitch-10 head phantom with 1573 nodes, small enough for dense linear algebra.
inline HeadPhantomSpec coarse_head()
{
    HeadPhantomSpec s;
    s.width = 100;
    s.height = 120;
    s.depth = 100;
    s.skin_thickness = 10;
    s.skeleton_thickness = 10;
    s.nerve_size = 10;
    s.nerve_offset = 15;
    s.nerve_height = 75;
    s.nerve_z_min = 40;
    s.nerve_z_max = 70;
    s.bridge_offset = 10;
    s.bridge_height = 80;
    s.neck_height = 30;
    s.cheek_height = 80;
    s.cheek_depth = 80;
    s.pitch = 10;
    return s;
}

}  // namespace tens::test
