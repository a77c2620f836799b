#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tens/fem.hpp"

namespace tens {

enum class Preconditioner { jacobi, none };

struct SolveSettings {
    double rel_tolerance = 1e-8;
    std::optional<std::size_t> max_iterations;  // defaults to 10 * n
    Preconditioner preconditioner = Preconditioner::jacobi;

    /// Throws Error if tolerance is outside (0, 1) or max_iterations is zero.
    void check() const;
};

struct SolveResult {
    std::vector<double> potential;  // volts
    std::size_t iterations = 0;
    double relative_residual = 0.0;  // true ||K V - b|| / ||b||
    std::vector<double> residual_history;
};

/// ||K x - b||_2 / ||b||_2, recomputed from scratch; zero when b = 0 and x = 0.
double relative_residual(const SymmetricCsr& k, std::span<const double> x, std::span<const double> b);

/**
 * Preconditioned conjugate gradients on a grounded system. An ungrounded system whose matrix
 * annihilates constants is rejected with Error.
 *
 * Convergence is declared on the true residual: when the recurrence residual falls below the
 * tolerance the residual is recomputed from K and b, and the iteration continues from the
 * recomputed value if it is still too large. Throws SolverError with the residual history when
 * the iteration budget runs out.
 */
SolveResult solve_pcg(const LinearSystem& sys, const SolveSettings& settings = {});

}  // namespace tens
