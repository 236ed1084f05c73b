#include "qme/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "qme/kernels.hpp"
#include "qme/linalg.hpp"

namespace qme::prop {

TimeGrid::TimeGrid(double t0_, double dt_, std::size_t steps_)
    : t0(t0_), dt(dt_), steps(steps_) {
    if (dt <= 0.0) throw Error("TimeGrid: dt must be positive");
    if (steps < 1) throw Error("TimeGrid: at least one step required");
}

TimeGrid TimeGrid::span(double t0, double t1, std::size_t points) {
    if (points < 2) throw Error("TimeGrid::span: need at least two points");
    return TimeGrid(t0, (t1 - t0) / static_cast<double>(points - 1), points - 1);
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> ts(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) ts[k] = t0 + dt * static_cast<double>(k);
    return ts;
}

Liouvillian TimeDependentGenerator::at(double t) const {
    CMatrix m = static_part.matrix();
    for (const auto& [part, v] : driven_parts) {
        if (part.dim() != static_part.dim())
            throw DimensionMismatch("TimeDependentGenerator: part dimension mismatch");
        kernels::axpy(cplx{v(t), 0.0}, part.matrix().data(), m.data(),
                      m.rows() * m.cols());
    }
    return Liouvillian(std::move(m));
}

DensityOperator propagate_expm(const Liouvillian& l, const DensityOperator& rho0, double t) {
    if (rho0.dim() != l.dim())
        throw DimensionMismatch("propagate_expm: state dimension mismatch");
    CMatrix lt = l.matrix();
    lt *= cplx{t, 0.0};
    const CMatrix p = lin::expm(lt);
    return DensityOperator(devectorize(p * vectorize(rho0.matrix())));
}

SpectralDecomposition spectral_decompose(const Liouvillian& l) {
    const auto eig = lin::bi_orthogonal_eig(l.matrix());
    return SpectralDecomposition{eig.eigenvalues, eig.right, eig.left_adjoint};
}

std::vector<DensityOperator> spectral_solution(const Liouvillian& l, const DensityOperator& rho0,
                                               const std::vector<double>& times) {
    if (rho0.dim() != l.dim())
        throw DimensionMismatch("spectral_solution: state dimension mismatch");
    const SpectralDecomposition sd = spectral_decompose(l);
    const std::size_t n = sd.eigenvalues.size();
    const CVector v0 = vectorize(rho0.matrix());
    const CVector weights = sd.left_adjoint * v0; // weights_k = L_k^dag vec(rho0)

    std::vector<DensityOperator> out;
    out.reserve(times.size());
    CVector vt(n);
    for (const double t : times) {
        std::fill(vt.begin(), vt.end(), cplx{0.0, 0.0});
        for (std::size_t k = 0; k < n; ++k) {
            const cplx amp = weights[k] * std::exp(sd.eigenvalues[k] * t);
            for (std::size_t i = 0; i < n; ++i) vt[i] += amp * sd.right(i, k);
        }
        out.emplace_back(devectorize(vt));
    }
    return out;
}

Liouvillian jitter(const Liouvillian& l, double eps) {
    CMatrix m = l.matrix();
    if (eps != 0.0) {
        const cplx shift{0.0, eps};
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) += shift;
    }
    return Liouvillian(std::move(m));
}

Trajectory propagate_piecewise(const TimeDependentGenerator& g, const DensityOperator& rho0,
                               const TimeGrid& grid) {
    if (rho0.dim() != g.dim())
        throw DimensionMismatch("propagate_piecewise: state dimension mismatch");
    Trajectory traj;
    traj.reserve(grid.steps + 1);
    traj.push_back({grid.t0, rho0});

    CVector v = vectorize(rho0.matrix());
    std::vector<double> prev_drive;
    CMatrix step_prop;
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const double t = grid.t0 + grid.dt * static_cast<double>(k);
        std::vector<double> drive(g.driven_parts.size());
        for (std::size_t i = 0; i < drive.size(); ++i) drive[i] = g.driven_parts[i].second(t);
        if (step_prop.empty() || drive != prev_drive) {
            CMatrix m = g.static_part.matrix();
            for (std::size_t i = 0; i < drive.size(); ++i)
                kernels::axpy(cplx{drive[i], 0.0}, g.driven_parts[i].first.matrix().data(),
                              m.data(), m.rows() * m.cols());
            m *= cplx{grid.dt, 0.0};
            step_prop = lin::expm(m);
            prev_drive = std::move(drive);
        }
        v = step_prop * v;
        traj.push_back({t + grid.dt, DensityOperator(devectorize(v))});
    }
    return traj;
}

double piecewise_step_size_indicator(const TimeDependentGenerator& g, const TimeGrid& grid) {
    double worst = 0.0;
    for (const double t : grid.times())
        worst = std::max(worst, g.at(t).matrix().one_norm());
    return grid.dt * worst;
}

std::vector<CMatrix> semigroup_propagate_operator(const Liouvillian& l, const CMatrix& x0,
                                                  const TimeGrid& grid) {
    CMatrix ldt = l.matrix();
    ldt *= cplx{grid.dt, 0.0};
    const CMatrix p1 = lin::expm(ldt);
    std::vector<CMatrix> out;
    out.reserve(grid.steps + 1);
    out.push_back(x0);
    CVector v = vectorize(x0);
    for (std::size_t k = 0; k < grid.steps; ++k) {
        v = p1 * v;
        out.push_back(devectorize(v));
    }
    return out;
}

Trajectory semigroup_propagate(const Liouvillian& l, const DensityOperator& rho0,
                               const TimeGrid& grid) {
    if (rho0.dim() != l.dim())
        throw DimensionMismatch("semigroup_propagate: state dimension mismatch");
    const auto mats = semigroup_propagate_operator(l, rho0.matrix(), grid);
    Trajectory traj;
    traj.reserve(mats.size());
    const auto ts = grid.times();
    for (std::size_t k = 0; k < mats.size(); ++k)
        traj.push_back({ts[k], DensityOperator(mats[k])});
    return traj;
}

DensityOperator trotter_propagate(const Liouvillian& l1, const Liouvillian& l2,
                                  const DensityOperator& rho0, double t, std::size_t n,
                                  bool correction) {
    if (l1.dim() != l2.dim() || rho0.dim() != l1.dim())
        throw DimensionMismatch("trotter_propagate: dimension mismatch");
    if (n < 1) throw Error("trotter_propagate: n must be >= 1");
    const double dt = t / static_cast<double>(n);
    CMatrix a = l1.matrix();
    a *= cplx{dt, 0.0};
    CMatrix b = l2.matrix();
    b *= cplx{dt, 0.0};
    CMatrix step = lin::expm(a) * lin::expm(b);
    if (correction) {
        CMatrix c = commutator(l1.matrix(), l2.matrix());
        c *= cplx{-0.5 * dt * dt, 0.0};
        step = step * lin::expm(c);
    }
    CVector v = vectorize(rho0.matrix());
    for (std::size_t k = 0; k < n; ++k) v = step * v;
    return DensityOperator(devectorize(v));
}

// ---------------------------------------------------------------------------
// Dormand-Prince 4(5)

namespace {

constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
// 4th-order weights of the embedded pair
constexpr double kE1 = 5179.0 / 57600.0, kE3 = 7571.0 / 16695.0, kE4 = 393.0 / 640.0,
                 kE5 = -92097.0 / 339200.0, kE6 = 187.0 / 2100.0, kE7 = 1.0 / 40.0;

using Vec = std::vector<double>;

void axpy_r(double a, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

} // namespace

std::vector<std::vector<double>> rk45_solve(const RealRhs& rhs, const std::vector<double>& y0,
                                            double t0, double t1,
                                            const std::vector<double>& t_out,
                                            const Rk45Options& opts) {
    if (opts.rtol <= 0.0 || opts.atol <= 0.0)
        throw Error("rk45_solve: tolerances must be positive");
    const double span = t1 - t0;
    if (span <= 0.0) throw Error("rk45_solve: t1 must exceed t0");
    const std::size_t n = y0.size();

    std::vector<Vec> out(t_out.size(), Vec(n));
    std::size_t next_out = 0;
    // emit any requested points at t0
    while (next_out < t_out.size() && t_out[next_out] <= t0) {
        out[next_out] = y0;
        ++next_out;
    }

    Vec y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n), yerr(n);
    double t = t0;
    rhs(t, y, k1);

    // initial step from the rhs magnitude
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d0 = std::max(d0, std::abs(y[i]));
        d1 = std::max(d1, std::abs(k1[i]));
    }
    double h = (d1 > 1e-12) ? std::min(0.01 * (d0 + 1.0) / d1, span / 10.0) : span / 100.0;
    h = std::min(h, span);

    const double h_min = 1e-14 * span;
    while (t < t1) {
        if (h < h_min)
            throw StepSizeUnderflow("rk45_solve: step size underflow at t = " +
                                    std::to_string(t));
        if (t + h > t1) h = t1 - t;

        ytmp = y;
        axpy_r(h * kA21, k1, ytmp);
        rhs(t + h / 5.0, ytmp, k2);

        ytmp = y;
        axpy_r(h * kA31, k1, ytmp);
        axpy_r(h * kA32, k2, ytmp);
        rhs(t + 3.0 * h / 10.0, ytmp, k3);

        ytmp = y;
        axpy_r(h * kA41, k1, ytmp);
        axpy_r(h * kA42, k2, ytmp);
        axpy_r(h * kA43, k3, ytmp);
        rhs(t + 4.0 * h / 5.0, ytmp, k4);

        ytmp = y;
        axpy_r(h * kA51, k1, ytmp);
        axpy_r(h * kA52, k2, ytmp);
        axpy_r(h * kA53, k3, ytmp);
        axpy_r(h * kA54, k4, ytmp);
        rhs(t + 8.0 * h / 9.0, ytmp, k5);

        ytmp = y;
        axpy_r(h * kA61, k1, ytmp);
        axpy_r(h * kA62, k2, ytmp);
        axpy_r(h * kA63, k3, ytmp);
        axpy_r(h * kA64, k4, ytmp);
        axpy_r(h * kA65, k5, ytmp);
        rhs(t + h, ytmp, k6);

        // 5th order solution (also the first same-as-last stage input)
        y5 = y;
        axpy_r(h * kB1, k1, y5);
        axpy_r(h * kB3, k3, y5);
        axpy_r(h * kB4, k4, y5);
        axpy_r(h * kB5, k5, y5);
        axpy_r(h * kB6, k6, y5);
        rhs(t + h, y5, k7);

        // embedded 4th order for the error estimate
        yerr = y;
        axpy_r(h * kE1, k1, yerr);
        axpy_r(h * kE3, k3, yerr);
        axpy_r(h * kE4, k4, yerr);
        axpy_r(h * kE5, k5, yerr);
        axpy_r(h * kE6, k6, yerr);
        axpy_r(h * kE7, k7, yerr);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double scale =
                opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            const double e = (y5[i] - yerr[i]) / scale;
            err += e * e;
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (err <= 1.0) {
            const double t_new = t + h;
            // dense output: cubic Hermite on (y, k1) -- (y5, k7)
            while (next_out < t_out.size() && t_out[next_out] <= t_new + 1e-15 * span) {
                const double s = std::clamp((t_out[next_out] - t) / h, 0.0, 1.0);
                const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
                const double h10 = s * (1.0 - s) * (1.0 - s);
                const double h01 = s * s * (3.0 - 2.0 * s);
                const double h11 = s * s * (s - 1.0);
                Vec& o = out[next_out];
                for (std::size_t i = 0; i < n; ++i)
                    o[i] = h00 * y[i] + h10 * h * k1[i] + h01 * y5[i] + h11 * h * k7[i];
                ++next_out;
            }
            t = t_new;
            y.swap(y5);
            k1.swap(k7); // FSAL
        }
        const double factor =
            (err > 1e-14) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
    // any trailing requested points exactly at t1
    while (next_out < t_out.size()) {
        out[next_out] = y;
        ++next_out;
    }
    return out;
}

namespace {

std::vector<double> flatten_state(const CMatrix& rho) {
    const CVector v = vectorize(rho);
    std::vector<double> y(2 * v.size());
    std::memcpy(y.data(), reinterpret_cast<const double*>(v.data()),
                y.size() * sizeof(double));
    return y;
}

CMatrix unflatten_state(const std::vector<double>& y) {
    CVector v(y.size() / 2);
    std::memcpy(reinterpret_cast<double*>(v.data()), y.data(),
                y.size() * sizeof(double));
    return devectorize(v);
}

} // namespace

Trajectory rk45_propagate(const StateRhs& rhs, const DensityOperator& rho0,
                          double t0, double t1, const std::vector<double>& t_out,
                          const Rk45Options& opts) {
    const RealRhs real_rhs = [&rhs](double t, const std::vector<double>& y,
                                    std::vector<double>& dy) {
        const CMatrix drho = rhs(t, unflatten_state(y));
        const CVector dv = vectorize(drho);
        std::memcpy(dy.data(), dv.data(), dy.size() * sizeof(double));
    };
    const auto rows = rk45_solve(real_rhs, flatten_state(rho0.matrix()), t0, t1, t_out, opts);
    Trajectory traj;
    traj.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k)
        traj.push_back({t_out[k], DensityOperator(unflatten_state(rows[k]))});
    return traj;
}

Trajectory rk45_propagate(const Liouvillian& l, const DensityOperator& rho0,
                          const TimeGrid& grid, const Rk45Options& opts) {
    if (rho0.dim() != l.dim())
        throw DimensionMismatch("rk45_propagate: state dimension mismatch");
    const CMatrix& lm = l.matrix();
    const RealRhs real_rhs = [&lm](double, const std::vector<double>& y,
                                   std::vector<double>& dy) {
        const std::size_t n = y.size() / 2;
        kernels::gemv(lm.data(), reinterpret_cast<const cplx*>(y.data()),
                      reinterpret_cast<cplx*>(dy.data()), n, n);
    };
    const auto t_out = grid.times();
    const auto rows =
        rk45_solve(real_rhs, flatten_state(rho0.matrix()), grid.t0, grid.t_end(), t_out, opts);
    Trajectory traj;
    traj.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k)
        traj.push_back({t_out[k], DensityOperator(unflatten_state(rows[k]))});
    return traj;
}

} // namespace qme::prop
