#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "support.hpp"
#include "tens/error.hpp"
#include "tens/mesh.hpp"
#include "tens/phantom.hpp"

using namespace tens;

namespace {

std::set<std::array<std::size_t, 3>> face_keys(const FaceSet& fs)
{
    std::set<std::array<std::size_t, 3>> keys;
    for (const auto& f : fs.faces) {
        auto k = f.nodes;
        std::sort(k.begin(), k.end());
        keys.insert(k);
    }
    return keys;
}

Vec3 face_centroid(const Mesh& m, const BoundaryFace& f)
{
    return (m.nodes()[f.nodes[0]].pos + m.nodes()[f.nodes[1]].pos + m.nodes()[f.nodes[2]].pos) * (1.0 / 3.0);
}

}  // namespace

TEST_CASE("validate_mesh accepts a well-formed tetrahedron")
{
    const auto report = validate_mesh(test::single_tet());
    CHECK(report.ok());
    CHECK(report.nodes == 4);
    CHECK(report.elements == 1);
    CHECK(report.regions == 1);
}

TEST_CASE("validate_mesh reports each defect kind")
{
    SUBCASE("swapped nodes give negative volume")
    {
        Mesh m({{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {0, 1, 0}}, {4, {0, 0, 1}}}, {{1, {1, 3, 2, 4}, 7}}, {{7, "Skin"}});
        const auto report = validate_mesh(m);
        CHECK(report.defects.size() == 1);
        CHECK(report.count(DefectKind::negative_volume) == 1);
    }
    SUBCASE("flat tetrahedron counts as negative volume")
    {
        Mesh m({{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {0, 1, 0}}, {4, {1, 1, 0}}}, {{1, {1, 2, 3, 4}, 7}}, {{7, "Skin"}});
        CHECK(validate_mesh(m).count(DefectKind::negative_volume) == 1);
    }
    SUBCASE("missing node id")
    {
        Mesh m({{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {0, 1, 0}}, {4, {0, 0, 1}}}, {{1, {1, 2, 3, 99}, 7}}, {{7, "Skin"}});
        const auto report = validate_mesh(m);
        CHECK(report.count(DefectKind::dangling_node) == 1);
        CHECK(report.defects.front().ids == std::vector<std::int64_t>{1, 99});
        CHECK(report.count(DefectKind::orphan_node) == 1);  // node 4
    }
    SUBCASE("repeated node")
    {
        Mesh m({{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {0, 1, 0}}}, {{1, {1, 2, 3, 3}, 7}}, {{7, "Skin"}});
        const auto report = validate_mesh(m);
        CHECK(report.count(DefectKind::duplicate_node_ref) == 1);
        CHECK(report.count(DefectKind::negative_volume) == 0);
    }
    SUBCASE("unnamed region")
    {
        Mesh m = test::single_tet();
        Mesh bad(m.nodes(), {{1, {1, 2, 3, 4}, 8}}, m.region_names());
        CHECK(validate_mesh(bad).count(DefectKind::dangling_region) == 1);
    }
    SUBCASE("duplicate ids")
    {
        Mesh m({{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {0, 1, 0}}, {4, {0, 0, 1}}, {4, {0, 0, 2}}},
               {{1, {1, 2, 3, 4}, 7}, {1, {1, 2, 3, 4}, 7}}, {{7, "Skin"}});
        CHECK(validate_mesh(m).count(DefectKind::duplicate_id) == 2);
    }
}

TEST_CASE("validate_mesh leaves its input untouched")
{
    Mesh m({{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {0, 1, 0}}, {4, {0, 0, 1}}}, {{1, {1, 3, 2, 4}, 7}}, {{7, "Skin"}});
    const Mesh copy = m;
    (void)validate_mesh(m);
    CHECK(m == copy);
}

TEST_CASE("orient_elements fixes inverted tetrahedra")
{
    Mesh m({{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {0, 1, 0}}, {4, {0, 0, 1}}}, {{1, {1, 3, 2, 4}, 7}}, {{7, "Skin"}});
    const Mesh fixed = orient_elements(m);
    CHECK(validate_mesh(fixed).ok());
    CHECK(fixed.signed_volume(0) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("extract_boundary on hand-countable meshes")
{
    SUBCASE("single tetrahedron exposes all four faces")
    {
        const auto fs = extract_boundary(test::single_tet());
        CHECK(fs.size() == 4);
        CHECK(fs.area() == doctest::Approx(1.5 + std::sqrt(3.0) / 2.0));
    }
    SUBCASE("two tetrahedra hide their shared face")
    {
        const Mesh m = test::two_tets();
        REQUIRE(validate_mesh(m).ok());
        const auto fs = extract_boundary(m);
        CHECK(fs.size() == 6);
        const std::array<std::size_t, 3> shared{1, 2, 3};
        CHECK_FALSE(face_keys(fs).contains(shared));
    }
    SUBCASE("n^3 cube has 12 n^2 triangles")
    {
        for (int n : {1, 2, 3, 5}) {
            CHECK(extract_boundary(test::cube(n).mesh).size() == static_cast<std::size_t>(12 * n * n));
        }
    }
}

TEST_CASE("boundary normals point away from the owning tetrahedron")
{
    for (const Mesh& m : {test::two_tets(), test::cube(3).mesh, test::jittered_grid(3, 11)}) {
        const auto fs = extract_boundary(m);
        for (const auto& f : fs.faces) {
            CHECK(std::abs(norm(f.normal) - 1.0) < 1e-12);
            CHECK(f.area > 0.0);
            CHECK(dot(f.normal, face_centroid(m, f) - m.centroid(f.element)) > 0.0);
        }
    }
}

TEST_CASE("boundary of a closed surface has zero net area vector")
{
    HeadPhantomSpec head;
    head.width = 60;
    head.height = 60;
    head.depth = 60;
    head.nerve_offset = 12.5;
    head.nerve_height = 32.5;
    head.nerve_z_min = 20;
    head.nerve_z_max = 40;
    head.bridge_height = 40;
    head.bridge_offset = 10;
    head.neck_height = 20;
    head.cheek_height = 30;
    head.cheek_depth = 40;
    for (const Mesh& m : {test::cube(4, 2.5).mesh, test::jittered_grid(4, 3), test::jittered_grid(5, 99),
                          make_head_phantom(head).mesh}) {
        const auto fs = extract_boundary(m);
        Vec3 sum;
        double scale = 0.0;
        for (const auto& f : fs.faces) {
            sum += f.normal * f.area;
            scale += f.area;
        }
        CHECK(norm(sum) <= 1e-6 * scale);
    }
}

TEST_CASE("extract_boundary does not depend on element order")
{
    const Mesh m = test::jittered_grid(3, 5);
    auto elements = m.elements();
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(elements.begin(), elements.end(), rng);
        const Mesh shuffled(m.nodes(), elements, m.region_names());
        const auto a = extract_boundary(m);
        const auto b = extract_boundary(shuffled);
        CHECK(face_keys(a) == face_keys(b));
        // sorted output makes the face lists identical too
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a.faces[i].element_id == b.faces[i].element_id);
            CHECK(a.faces[i].local_face == b.faces[i].local_face);
            CHECK(a.faces[i].nodes == b.faces[i].nodes);
        }
    }
}

TEST_CASE("extract_boundary rejects bad meshes")
{
    Mesh inverted({{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {0, 1, 0}}, {4, {0, 0, 1}}}, {{1, {1, 3, 2, 4}, 7}},
                  {{7, "Skin"}});
    CHECK_THROWS_WITH_AS(extract_boundary(inverted), doctest::Contains("validate_mesh"), MeshError);

    // three tetrahedra on one face
    Mesh fan({{1, {0, 0, 0}}, {2, {1, 0, 0}}, {3, {0, 1, 0}}, {4, {0, 0, 1}}, {5, {0.2, 0.2, 2}}, {6, {0.2, 0.2, -1}}},
             {{1, {1, 2, 3, 4}, 7}, {2, {1, 2, 3, 5}, 7}, {3, {1, 3, 2, 6}, 7}}, {{7, "Skin"}});
    REQUIRE(validate_mesh(fan).ok());
    CHECK_THROWS_AS(extract_boundary(fan), MeshError);
}

TEST_CASE("select_patch by box")
{
    SUBCASE("box around one cube face takes exactly that face")
    {
        const Mesh m = test::cube(3).mesh;
        const auto fs = extract_boundary(m);
        const auto patch = select_patch(m, fs, Box{{-0.1, -0.1, -0.1}, {3.1, 0.0, 3.1}});
        std::size_t expected = 0;
        for (const auto& f : fs.faces) {
            expected += f.normal.y < -0.999 ? 1 : 0;
        }
        CHECK(patch.size() == expected);
        CHECK(patch.size() == 18);
        CHECK(patch.area() == doctest::Approx(9.0));
        for (const auto& f : patch.faces) {
            CHECK(f.normal.y == doctest::Approx(-1.0));
        }
    }
    SUBCASE("20 mm square on a 100 mm face at 5 mm pitch")
    {
        SlabSpec spec;
        spec.width = spec.height = 100;
        spec.pitch = 5;
        spec.layers = {{"Skin", 10, 0.465}};
        const Mesh m = make_slab(spec).mesh;
        const auto patch = select_patch(m, extract_boundary(m), Box{{-1, 40, 40}, {1, 60, 60}});
        CHECK(patch.size() == 32);
        CHECK(patch.area() == doctest::Approx(400.0).epsilon(1e-12));
    }
    SUBCASE("closed bounds include faces lying on the box wall")
    {
        const Mesh m = test::cube(2).mesh;
        const auto patch = select_patch(m, extract_boundary(m), Box{{0, 0, 0}, {2, 2, 1}});
        // bottom face z = 0, plus the lower halves of four side faces
        CHECK(patch.area() == doctest::Approx(4.0 + 4 * 2.0));
    }
    SUBCASE("empty and degenerate selections are errors")
    {
        const Mesh m = test::cube(2).mesh;
        const auto fs = extract_boundary(m);
        CHECK_THROWS_AS(select_patch(m, fs, Box{{10, 10, 10}, {11, 11, 11}}), MeshError);
        CHECK_THROWS_AS(select_patch(m, fs, Box{{0, 0, 0}, {2, 2, 0}}), MeshError);
    }
}

TEST_CASE("select_patch by region adjacency")
{
    SlabSpec spec;
    spec.width = spec.height = 10;
    spec.pitch = 5;
    spec.layers = {{"Skin", 10, 0.465}, {"Skeleton", 10, 0.02}};
    const Mesh m = make_slab(spec).mesh;
    const auto fs = extract_boundary(m);
    const auto skin = select_patch(m, fs, RegionAdjacency{"Skin"});
    const auto bone = select_patch(m, fs, RegionAdjacency{"Skeleton"});
    CHECK(skin.size() + bone.size() == fs.size());
    CHECK(skin.area() == doctest::Approx(100.0 + 4 * 100.0));
    for (const auto& f : skin.faces) {
        CHECK(m.region_name_of(f.element) == "Skin");
    }
    CHECK_THROWS_AS(select_patch(m, fs, RegionAdjacency{"Bone2"}), MeshError);
}

TEST_CASE("mesh accessors")
{
    const Mesh m = test::two_tets();
    CHECK(m.node_index(5) == 4u);
    CHECK_FALSE(m.node_index(6).has_value());
    CHECK(m.find_region("Skin") == RegionId{7});
    CHECK_FALSE(m.find_region("skin").has_value());
    CHECK(m.region_name_of(1) == "Skin");
    const Mesh renamed = m.with_region_names({{7, "Blood"}, {9, "Eye"}});
    CHECK(renamed.region_names().at(7) == "Blood");
    CHECK(renamed.region_names().size() == 2);
    CHECK(m.centroid(0) == Vec3{0.25, 0.25, 0.25});
}
