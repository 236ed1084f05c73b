// propagation.hpp — Time evolution of vectorized states: exact exponential,
// spectral (bi-orthogonal eigenvector) solution, piecewise time-dependent
// generators, semigroup power composition, Suzuki-Trotter splitting, and an
// adaptive Dormand-Prince 4(5) integrator.

#pragma once

#include <functional>
#include <vector>

#include "qme/liouville.hpp"
#include "qme/operator_core.hpp"

namespace qme::prop {

struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t steps = 0; // number of steps; grid has steps+1 points

    TimeGrid(double t0_, double dt_, std::size_t steps_);
    static TimeGrid span(double t0, double t1, std::size_t points); // points >= 2
    std::vector<double> times() const;
    double t_end() const { return t0 + dt * static_cast<double>(steps); }
};

struct TrajectoryPoint {
    double t;
    DensityOperator state;
};
using Trajectory = std::vector<TrajectoryPoint>;

// Left/right eigenvector pairs of a (generally non-Hermitian) generator,
// normalized so left_adjoint * right == identity.
struct SpectralDecomposition {
    std::vector<cplx> eigenvalues;
    CMatrix right;        // columns R_k
    CMatrix left_adjoint; // rows L_k^dag
};

// L(t) = static_part + sum_i v_i(t) * part_i
struct TimeDependentGenerator {
    Liouvillian static_part;
    std::vector<std::pair<Liouvillian, std::function<double(double)>>> driven_parts;

    Liouvillian at(double t) const;
    std::size_t dim() const { return static_part.dim(); }
};

// devec(exp(L t) vec(rho0))
DensityOperator propagate_expm(const Liouvillian& l, const DensityOperator& rho0, double t);

// Throws DefectiveGenerator when the eigenvector basis is numerically
// singular; jitter() is the degeneracy-breaking fallback.
SpectralDecomposition spectral_decompose(const Liouvillian& l);

// rho(t) = sum_k (L_k^dag vec(rho0)) R_k e^{lambda_k t}
std::vector<DensityOperator> spectral_solution(const Liouvillian& l, const DensityOperator& rho0,
                                               const std::vector<double>& times);

// Adds i*eps to every entry; breaks exact degeneracies before a spectral solve.
Liouvillian jitter(const Liouvillian& l, double eps = 1e-14);

// Piecewise-constant stepping, generator sampled at each interval start.
Trajectory propagate_piecewise(const TimeDependentGenerator& g, const DensityOperator& rho0,
                               const TimeGrid& grid);

// dt * max ||L(t)||_1 over the grid; above ~0.1 the piecewise step is suspect.
double piecewise_step_size_indicator(const TimeDependentGenerator& g, const TimeGrid& grid);

// One propagator P1 = exp(L dt), then repeated application (never
// re-exponentiating).
Trajectory semigroup_propagate(const Liouvillian& l, const DensityOperator& rho0,
                               const TimeGrid& grid);

// Raw semigroup propagation of an arbitrary operator (no state semantics);
// used by the correlation machinery.
std::vector<CMatrix> semigroup_propagate_operator(const Liouvillian& l, const CMatrix& x0,
                                                  const TimeGrid& grid);

// [e^{L1 t/n} e^{L2 t/n} (e^{-1/2 [L1,L2] (t/n)^2} when correction)]^n
DensityOperator trotter_propagate(const Liouvillian& l1, const Liouvillian& l2,
                                  const DensityOperator& rho0, double t, std::size_t n,
                                  bool correction = false);

struct Rk45Options {
    double rtol = 1e-8;
    double atol = 1e-10;
};

using RealRhs = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

// Adaptive Dormand-Prince 4(5) on a real vector; dense output via cubic
// Hermite interpolation at the requested times (which must be ascending and
// lie in [t0, t1]). Throws StepSizeUnderflow below 1e-14 * span.
std::vector<std::vector<double>> rk45_solve(const RealRhs& rhs, const std::vector<double>& y0,
                                            double t0, double t1,
                                            const std::vector<double>& t_out,
                                            const Rk45Options& opts = {});

// Master-equation front end: integrates d vec(rho)/dt = rhs(rho) with the
// flattened real representation of vec(rho).
using StateRhs = std::function<CMatrix(double, const CMatrix&)>;
Trajectory rk45_propagate(const StateRhs& rhs, const DensityOperator& rho0,
                          double t0, double t1, const std::vector<double>& t_out,
                          const Rk45Options& opts = {});

// Convenience wrapper for a constant Liouvillian.
Trajectory rk45_propagate(const Liouvillian& l, const DensityOperator& rho0,
                          const TimeGrid& grid, const Rk45Options& opts = {});

} // namespace qme::prop
