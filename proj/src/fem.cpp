#include "tens/fem.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "tens/error.hpp"

namespace tens {

P1Geometry p1_geometry(const std::array<Vec3, 4>& p)
{
    const Vec3 a = p[1] - p[0];
    const Vec3 b = p[2] - p[0];
    const Vec3 c = p[3] - p[0];
    const Vec3 bc = cross(b, c);
    const double det = dot(a, bc);
    if (!(det > 0.0)) {
        throw FemError("tetrahedron has non-positive volume (" + std::to_string(det / 6.0) + ")");
    }
    P1Geometry g;
    const double inv = 1.0 / det;
    g.gradients[1] = bc * inv;
    g.gradients[2] = cross(c, a) * inv;
    g.gradients[3] = cross(a, b) * inv;
    g.gradients[0] = -(g.gradients[1] + g.gradients[2] + g.gradients[3]);
    g.volume = det / 6.0;
    return g;
}

ElementMatrix element_stiffness(const std::array<Vec3, 4>& coords, double sigma)
{
    const P1Geometry g = p1_geometry(coords);
    const double scale = sigma * g.volume;
    ElementMatrix k{};
    for (int i = 0; i < 4; ++i) {
        for (int j = i; j < 4; ++j) {
            k[i][j] = scale * dot(g.gradients[i], g.gradients[j]);
            k[j][i] = k[i][j];
        }
    }
    return k;
}

std::array<Vec3, 4> element_coords_m(const Mesh& m, std::size_t e)
{
    auto p = m.element_coords(e);
    for (auto& v : p) {
        v *= kMetresPerMillimetre;
    }
    return p;
}

namespace {

using UpperEntries = std::array<double, 10>;

UpperEntries upper_entries(const Mesh& m, const ConductivityField& c, std::size_t e)
{
    const auto k = element_stiffness(element_coords_m(m, e), c.sigma[e]);
    UpperEntries out{};
    int n = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i; j < 4; ++j) {
            out[n++] = k[i][j];
        }
    }
    return out;
}

}  // namespace

LinearSystem assemble(const Mesh& m, const ConductivityField& c, unsigned threads)
{
    require_valid(m);
    if (c.sigma.size() != m.element_count()) {
        throw FemError("conductivity field has " + std::to_string(c.sigma.size()) + " entries for " +
                       std::to_string(m.element_count()) + " elements");
    }

    std::vector<std::pair<std::size_t, std::size_t>> pattern;
    pattern.reserve(m.element_count() * 6);
    for (std::size_t e = 0; e < m.element_count(); ++e) {
        const auto& conn = m.element_nodes(e);
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                pattern.emplace_back(conn[i], conn[j]);
            }
        }
    }

    LinearSystem sys;
    sys.matrix = SymmetricCsr::from_pattern(m.node_count(), std::move(pattern));
    sys.rhs.assign(m.node_count(), 0.0);

    auto scatter = [&](std::size_t e, const UpperEntries& k) {
        const auto& conn = m.element_nodes(e);
        int n = 0;
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) {
                sys.matrix.add(conn[i], conn[j], k[n++]);
            }
        }
    };

    const std::size_t count = m.element_count();
    threads = std::max(1u, threads);
    if (threads == 1 || count < 4096) {
        for (std::size_t e = 0; e < count; ++e) {
            scatter(e, upper_entries(m, c, e));
        }
        return sys;
    }

    std::vector<UpperEntries> local(count);
    std::vector<std::exception_ptr> failures(threads);
    std::vector<std::thread> workers;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            try {
                const std::size_t end = std::min(count, (t + 1) * chunk);
                for (std::size_t e = t * chunk; e < end; ++e) {
                    local[e] = upper_entries(m, c, e);
                }
            } catch (...) {
                failures[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
    for (std::size_t e = 0; e < count; ++e) {
        scatter(e, local[e]);
    }
    return sys;
}

NeumannLoad::NeumannLoad(FaceSet patch, double total_current_mA)
    : patch_(std::move(patch)), current_mA_(total_current_mA), area_m2_(patch_.area() * 1e-6)
{
    if (!(area_m2_ > 0.0)) {
        throw FemError("Neumann patch has zero area");
    }
    if (!std::isfinite(current_mA_) || current_mA_ < 0.0) {
        throw FemError("injected current must be finite and non-negative");
    }
}

LinearSystem apply_neumann(LinearSystem sys, const NeumannLoad& load)
{
    const double jn = load.jn();
    for (const auto& f : load.patch().faces) {
        const double share = jn * (f.area * 1e-6) / 3.0;
        for (std::size_t node : f.nodes) {
            if (node >= sys.size()) {
                throw FemError("Neumann patch references node outside the system");
            }
            sys.rhs[node] += share;
        }
    }
    return sys;
}

LinearSystem apply_dirichlet(LinearSystem sys, const FaceSet& ground)
{
    if (ground.empty()) {
        throw FemError("ground patch is empty; a pure-Neumann system is singular");
    }
    const auto nodes = ground.node_indices();
    return apply_dirichlet(std::move(sys), nodes);
}

LinearSystem apply_dirichlet(LinearSystem sys, std::span<const std::size_t> nodes)
{
    if (nodes.empty()) {
        throw FemError("no nodes to ground; a pure-Neumann system is singular");
    }
    const std::size_t n = sys.size();
    std::vector<bool> pinned(n, false);
    for (std::size_t node : sys.constrained) {
        pinned[node] = true;
    }
    for (std::size_t node : nodes) {
        if (node >= n) {
            throw FemError("ground node outside the system");
        }
        pinned[node] = true;
    }

    const auto row_ptr = sys.matrix.row_ptr();
    const auto cols = sys.matrix.columns();
    auto values = sys.matrix.values();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const std::size_t j = cols[k];
            if (pinned[i] || pinned[j]) {
                values[k] = (i == j) ? 1.0 : 0.0;
            }
        }
    }

    sys.constrained.clear();
    for (std::size_t i = 0; i < n; ++i) {
        if (pinned[i]) {
            sys.rhs[i] = 0.0;
            sys.constrained.push_back(i);
        }
    }
    return sys;
}

}  // namespace tens
