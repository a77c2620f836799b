#include "tens/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tens/error.hpp"

namespace tens {

void SolveSettings::check() const
{
    if (!(rel_tolerance > 0.0 && rel_tolerance < 1.0)) {
        throw Error("solver tolerance must lie in (0, 1)");
    }
    if (max_iterations && *max_iterations == 0) {
        throw Error("solver max_iterations must be at least 1");
    }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm2(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

void true_residual(const SymmetricCsr& k, std::span<const double> x, std::span<const double> b, std::vector<double>& r)
{
    k.multiply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = b[i] - r[i];
    }
}

/// True when the constant vector lies in the null space, as for an ungrounded conduction matrix.
bool floats(const SymmetricCsr& k)
{
    const std::vector<double> ones(k.size(), 1.0);
    std::vector<double> k1(k.size());
    k.multiply(ones, k1);
    double scale = 0.0;
    for (double v : k.values()) {
        scale = std::max(scale, std::abs(v));
    }
    for (double v : k1) {
        if (std::abs(v) > 1e-9 * scale) {
            return false;
        }
    }
    return true;
}

}  // namespace

double relative_residual(const SymmetricCsr& k, std::span<const double> x, std::span<const double> b)
{
    std::vector<double> r(b.size());
    true_residual(k, x, b, r);
    const double bn = norm2(b);
    const double rn = norm2(r);
    if (bn == 0.0) {
        return rn;
    }
    return rn / bn;
}

SolveResult solve_pcg(const LinearSystem& sys, const SolveSettings& settings)
{
    settings.check();
    const std::size_t n = sys.size();
    if (sys.constrained.empty() && floats(sys.matrix)) {
        throw Error("system has no grounded node and K annihilates constants; ground at least one node");
    }

    const auto& k = sys.matrix;
    const auto& b = sys.rhs;
    const std::size_t max_it = settings.max_iterations.value_or(10 * n);

    SolveResult result;
    result.potential.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        return result;
    }

    std::vector<double> inv_diag(n, 1.0);
    if (settings.preconditioner == Preconditioner::jacobi) {
        const auto d = k.diagonal();
        for (std::size_t i = 0; i < n; ++i) {
            if (!(d[i] > 0.0)) {
                throw Error("non-positive diagonal entry at node " + std::to_string(i) + "; matrix is not SPD");
            }
            inv_diag[i] = 1.0 / d[i];
        }
    }

    auto& x = result.potential;
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(n), p(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = inv_diag[i] * r[i];
    }
    p = z;
    double rz = dot(r, z);

    for (std::size_t it = 1; it <= max_it; ++it) {
        k.multiply(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) {
            throw SolverError("conjugate gradients broke down (p.Kp <= 0); matrix is not SPD",
                              result.residual_history);
        }
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        double rel = norm2(r) / bnorm;
        if (rel <= settings.rel_tolerance) {
            true_residual(k, x, b, r);
            rel = norm2(r) / bnorm;
            if (rel <= settings.rel_tolerance) {
                result.residual_history.push_back(rel);
                result.iterations = it;
                result.relative_residual = rel;
                return result;
            }
        }
        result.residual_history.push_back(rel);

        for (std::size_t i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
        }
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
    }

    std::ostringstream msg;
    msg << "PCG did not reach relative residual " << settings.rel_tolerance << " within " << max_it
        << " iterations (last " << (result.residual_history.empty() ? 1.0 : result.residual_history.back()) << ")";
    throw SolverError(msg.str(), std::move(result.residual_history));
}

}  // namespace tens
