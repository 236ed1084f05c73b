#include <doctest.h>

#include <cmath>

#include "qme/operators.hpp"
#include "qme/propagation.hpp"
#include "qme/rng.hpp"

#include "test_support.hpp"

using namespace qme;
using namespace qme::prop;
using testutil::max_abs_diff;

namespace {

// H = Omega sx with a sx jump at unit rate; vec(rho0) = (0,0,0,1)^T.
struct DampedDrivenTls {
    Liouvillian l;
    DensityOperator rho0;
    DampedDrivenTls()
        : l(build_liouvillian(1.0 * ops::sigma_x(), {{ops::sigma_x(), 1.0}})),
          rho0(devectorize(CVector{cplx{0, 0}, cplx{0, 0}, cplx{0, 0}, cplx{1, 0}})) {}
};

Liouvillian random_lindblad(RandomStream& rng, std::size_t d, std::size_t n_channels) {
    return build_liouvillian(testutil::random_hermitian(rng, d),
                             testutil::random_channels(rng, d, n_channels));
}

} // namespace

TEST_CASE("propagate_expm: t = 0 is the identity, Rabi oscillations are exact") {
    DampedDrivenTls sys;
    CHECK(max_abs_diff(propagate_expm(sys.l, sys.rho0, 0.0).matrix(), sys.rho0.matrix()) <
          1e-15);

    // closed system H = Omega sx from the ground state: p_e(t) = sin^2(Omega t)
    const double omega = 0.8;
    const Liouvillian closed = build_liouvillian(omega * ops::sigma_x(), {});
    const auto ground = DensityOperator::from_pure(PureState::basis_state(2, 0));
    for (const double t : {0.3, 1.0, 2.7}) {
        const auto rho = propagate_expm(closed, ground, t);
        CHECK(rho.matrix()(1, 1).real() ==
              doctest::Approx(std::pow(std::sin(omega * t), 2)).epsilon(1e-10));
    }
}

TEST_CASE("spectral solution agrees with expm on the damped driven system") {
    DampedDrivenTls sys;
    std::vector<double> times;
    for (int k = 0; k < 100; ++k) times.push_back(0.1 * k);
    const auto spectral = spectral_solution(sys.l, sys.rho0, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto exact = propagate_expm(sys.l, sys.rho0, times[k]);
        CHECK(max_abs_diff(spectral[k].matrix(), exact.matrix()) < 1e-8);
    }
}

TEST_CASE("spectral solution: diagonal generator decays coherences mode by mode") {
    CMatrix diag(4, 4);
    diag(1, 1) = cplx{-0.5, 1.0};
    diag(2, 2) = cplx{-0.5, -1.0};
    const Liouvillian l{diag};
    const auto plus = DensityOperator::from_pure(
        PureState(CVector{cplx{std::sqrt(0.5), 0}, cplx{std::sqrt(0.5), 0}}));
    const auto states = spectral_solution(l, plus, {0.0, 1.3});
    const cplx expected = plus.matrix()(1, 0) * std::exp(cplx{-0.5, 1.0} * cplx{1.3, 0.0});
    CHECK(std::abs(states[1].matrix()(1, 0) - expected) < 1e-12);
}

TEST_CASE("Lindblad spectra lie in the closed left half plane") {
    RandomStream rng(41, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t d = 2 + rep % 3;
        const Liouvillian l = random_lindblad(rng, d, 1 + rep % 3);
        const auto sd = spectral_decompose(l);
        for (const cplx lam : sd.eigenvalues) CHECK(lam.real() <= 1e-10);
    }
}

TEST_CASE("bi-orthonormality of the decomposition") {
    RandomStream rng(42, 0);
    const Liouvillian l = random_lindblad(rng, 3, 2);
    const auto sd = spectral_decompose(l);
    const CMatrix gram = sd.left_adjoint * sd.right;
    CHECK(max_abs_diff(gram, CMatrix::identity(gram.rows())) < 1e-8);
}

TEST_CASE("jitter: zero eps is the identity; rescues a defective generator") {
    DampedDrivenTls sys;
    CHECK(max_abs_diff(jitter(sys.l, 0.0).matrix(), sys.l.matrix()) == 0.0);

    // A Jordan block among otherwise distinct eigenvalues is defective; the
    // spectral route must fail, then succeed once the degeneracy is broken.
    // (Two bitwise-identical Jordan blocks stay defective under the uniform
    // shift, which moves both blocks together.)
    CMatrix jordan(4, 4);
    jordan(0, 1) = 1.0;
    jordan(2, 2) = 0.5;
    jordan(3, 3) = 1.3;
    const Liouvillian defective{jordan};
    CHECK_THROWS_AS(spectral_decompose(defective), DefectiveGenerator);
    const auto rho0 = DensityOperator::maximally_mixed(2);
    CHECK_NOTHROW(spectral_solution(jitter(defective, 1e-14), rho0, {0.1}));

    // on a healthy generator the jitter perturbs the solution negligibly
    std::vector<double> times{0.5, 2.0};
    const auto base = spectral_solution(sys.l, sys.rho0, times);
    const auto moved = spectral_solution(jitter(sys.l, 1e-14), sys.rho0, times);
    for (std::size_t k = 0; k < times.size(); ++k)
        CHECK(max_abs_diff(base[k].matrix(), moved[k].matrix()) < 1e-9);
}

TEST_CASE("piecewise propagation with zero drives matches expm at the grid points") {
    DampedDrivenTls sys;
    TimeDependentGenerator g;
    g.static_part = sys.l;
    g.driven_parts.emplace_back(sys.l, [](double) { return 0.0; });
    const TimeGrid grid(0.0, 0.01, 300);
    const auto traj = propagate_piecewise(g, sys.rho0, grid);
    for (std::size_t k = 0; k < traj.size(); k += 60) {
        const auto exact = propagate_expm(sys.l, sys.rho0, traj[k].t);
        CHECK(max_abs_diff(traj[k].state.matrix(), exact.matrix()) < 1e-10);
    }
}

TEST_CASE("piecewise propagation: cosine-driven dephasing system") {
    // H(t) = w0 sz/2 + cos(w t) w0 sx/2, J = (1 - sz)/2, w0 = 1, w = 3, gamma = 0.3
    const double w0 = 1.0, w = 3.0, gamma = 0.3;
    CMatrix dephase = CMatrix::identity(2) - ops::sigma_z();
    dephase *= cplx{0.5, 0.0};
    TimeDependentGenerator g;
    g.static_part = build_liouvillian(0.5 * w0 * ops::sigma_z(), {{dephase, gamma}});
    g.driven_parts.emplace_back(build_liouvillian(0.5 * w0 * ops::sigma_x(), {}),
                                [w](double t) { return std::cos(w * t); });
    const auto rho0 = DensityOperator::from_pure(PureState::basis_state(2, 1));

    const TimeGrid grid(0.0, 1e-3, 5000);
    const auto traj = propagate_piecewise(g, rho0, grid);
    for (std::size_t k = 0; k < traj.size(); k += 500) {
        const auto& m = traj[k].state.matrix();
        CHECK(m(0, 0).real() >= -1e-9);
        CHECK(m(0, 0).real() <= 1.0 + 1e-9);
        CHECK(std::abs(m.trace() - cplx{1.0, 0.0}) < 1e-10);
    }

    // first-order convergence: halving dt roughly halves the endpoint shift
    const auto endpoint = [&](double dt, std::size_t steps) {
        return propagate_piecewise(g, rho0, TimeGrid(0.0, dt, steps)).back().state.matrix();
    };
    const CMatrix e1 = endpoint(4e-3, 1250);
    const CMatrix e2 = endpoint(2e-3, 2500);
    const CMatrix e4 = endpoint(1e-3, 5000);
    const double d12 = (e1 - e2).frobenius_norm();
    const double d24 = (e2 - e4).frobenius_norm();
    CHECK(d12 / d24 == doctest::Approx(2.0).epsilon(0.35));

    // cross-check against the adaptive integrator on the same generator
    Rk45Options opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    const StateRhs rhs = [&g](double t, const CMatrix& rho) {
        return devectorize(g.at(t).matrix() * vectorize(rho));
    };
    const auto ref = rk45_propagate(rhs, rho0, 0.0, 5.0, {5.0}, opts);
    double dev = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        dev = std::max(dev, std::abs(traj.back().state.matrix()(i, i).real() -
                                     ref.back().state.matrix()(i, i).real()));
    CHECK(dev < 5e-3);
}

TEST_CASE("semigroup composition and endpoint consistency") {
    DampedDrivenTls sys;
    const TimeGrid grid(0.0, 0.01, 1000);

    CMatrix l_dt = sys.l.matrix();
    l_dt *= cplx{grid.dt, 0.0};
    const CMatrix p1 = lin::expm(l_dt);
    CMatrix l_2dt = sys.l.matrix();
    l_2dt *= cplx{2.0 * grid.dt, 0.0};
    CHECK(max_abs_diff(lin::expm(l_2dt), p1 * p1) < 1e-12);

    const auto traj = semigroup_propagate(sys.l, sys.rho0, grid);
    const auto exact = propagate_expm(sys.l, sys.rho0, grid.dt * 1000.0);
    CHECK(max_abs_diff(traj.back().state.matrix(), exact.matrix()) < 1e-9);

    const auto one = semigroup_propagate(sys.l, sys.rho0, TimeGrid(0.0, 0.37, 1));
    const auto direct = propagate_expm(sys.l, sys.rho0, 0.37);
    CHECK(max_abs_diff(one.back().state.matrix(), direct.matrix()) < 1e-13);
}

TEST_CASE("semigroup law P(s)P(t) = P(s+t) on random generators") {
    RandomStream rng(43, 0);
    for (int rep = 0; rep < 5; ++rep) {
        const Liouvillian l = random_lindblad(rng, 2, 2);
        for (int pair = 0; pair < 4; ++pair) {
            const double s = rng.uniform(), t = rng.uniform();
            CMatrix ls = l.matrix();
            ls *= cplx{s, 0.0};
            CMatrix lt = l.matrix();
            lt *= cplx{t, 0.0};
            CMatrix lst = l.matrix();
            lst *= cplx{s + t, 0.0};
            CHECK(max_abs_diff(lin::expm(ls) * lin::expm(lt), lin::expm(lst)) < 1e-12);
        }
    }
}

TEST_CASE("trotter: exact for commuting parts, first-order otherwise") {
    DampedDrivenTls sys;
    // commuting split: L and 0.5 L
    CMatrix half = sys.l.matrix();
    half *= cplx{0.5, 0.0};
    const Liouvillian l_half{half};
    const auto split = trotter_propagate(sys.l, l_half, sys.rho0, 2.0, 3);
    CMatrix sum = sys.l.matrix() + l_half.matrix();
    const auto exact = propagate_expm(Liouvillian(sum), sys.rho0, 2.0);
    CHECK(max_abs_diff(split.matrix(), exact.matrix()) < 1e-12);

    // non-commuting split: error halves when the step count doubles
    CMatrix h = ops::sigma_x();
    h(1, 1) = 1.0;
    const Liouvillian l1 = build_liouvillian(h, {});
    const Liouvillian l2 = build_liouvillian(CMatrix(2, 2), {{ops::ketbra(2, 0, 1), 0.5}});
    CMatrix total = l1.matrix() + l2.matrix();
    const auto target = propagate_expm(Liouvillian(total), sys.rho0, 5.0).matrix();
    double prev = 0.0;
    for (const std::size_t n : {64u, 128u, 256u}) {
        const double err =
            (trotter_propagate(l1, l2, sys.rho0, 5.0, n).matrix() - target).frobenius_norm();
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(2.0).epsilon(0.2));
        prev = err;
    }

    // the commutator correction buys roughly an order
    const double plain =
        (trotter_propagate(l1, l2, sys.rho0, 5.0, 128).matrix() - target).frobenius_norm();
    const double corrected =
        (trotter_propagate(l1, l2, sys.rho0, 5.0, 128, true).matrix() - target)
            .frobenius_norm();
    CHECK(corrected < 0.1 * plain);
}

TEST_CASE("rk45: zero rhs, linear generator, closed-system energy conservation") {
    // zero rhs keeps the state constant
    const RealRhs zero = [](double, const std::vector<double>&, std::vector<double>& dy) {
        std::fill(dy.begin(), dy.end(), 0.0);
    };
    const std::vector<double> y0{1.0, -2.0, 3.0};
    const auto rows = rk45_solve(zero, y0, 0.0, 5.0, {0.0, 2.5, 5.0});
    for (const auto& row : rows)
        for (std::size_t i = 0; i < y0.size(); ++i) CHECK(row[i] == y0[i]);

    // linear generator matches expm
    DampedDrivenTls sys;
    const TimeGrid grid(0.0, 0.05, 200);
    const auto traj = rk45_propagate(sys.l, sys.rho0, grid);
    double worst = 0.0;
    for (const auto& pt : traj) {
        const auto exact = propagate_expm(sys.l, sys.rho0, pt.t);
        worst = std::max(worst, max_abs_diff(pt.state.matrix(), exact.matrix()));
    }
    CHECK(worst < 1e-7);

    // closed system: <H> drift below 1e-7 over ten periods
    const double omega = 1.0;
    const CMatrix h = omega * ops::sigma_x();
    const Liouvillian closed = build_liouvillian(h, {});
    const auto ground = DensityOperator::from_pure(PureState::basis_state(2, 0));
    const double period = M_PI / omega;
    const auto run = rk45_propagate(closed, ground,
                                    TimeGrid(0.0, period / 10.0, 100));
    const double e0 = expectation(ground, h).real();
    for (const auto& pt : run)
        CHECK(std::abs(expectation(pt.state, h).real() - e0) < 1e-7);
}

TEST_CASE("every propagation method preserves the physicality of the state") {
    RandomStream rng(44, 0);
    const Liouvillian l = random_lindblad(rng, 3, 2);
    const auto rho0 = testutil::random_density(rng, 3);
    const TimeGrid grid(0.0, 0.05, 40);

    std::vector<std::vector<CMatrix>> trajectories;
    {
        std::vector<CMatrix> t;
        for (const double tt : grid.times())
            t.push_back(propagate_expm(l, rho0, tt).matrix());
        trajectories.push_back(std::move(t));
    }
    {
        std::vector<CMatrix> t;
        for (const auto& st : spectral_solution(l, rho0, grid.times()))
            t.push_back(st.matrix());
        trajectories.push_back(std::move(t));
    }
    {
        std::vector<CMatrix> t;
        for (const auto& pt : semigroup_propagate(l, rho0, grid)) t.push_back(pt.state.matrix());
        trajectories.push_back(std::move(t));
    }
    {
        std::vector<CMatrix> t;
        for (const auto& pt : rk45_propagate(l, rho0, grid)) t.push_back(pt.state.matrix());
        trajectories.push_back(std::move(t));
    }
    for (const auto& traj : trajectories)
        for (const CMatrix& m : traj) {
            const auto sc = state_score(m);
            CHECK(sc.trace_dev < 1e-8);
            CHECK(sc.herm_dev < 1e-8);
            CHECK(sc.pos_dev < 1e-7);
        }

    // pairwise cross-agreement of the time-independent methods
    for (std::size_t a = 0; a < trajectories.size(); ++a)
        for (std::size_t b = a + 1; b < trajectories.size(); ++b)
            for (std::size_t k = 0; k < grid.steps + 1; ++k)
                CHECK(max_abs_diff(trajectories[a][k], trajectories[b][k]) < 1e-7);
}

TEST_CASE("rk45 underflow guard") {
    const RealRhs stiff = [](double, const std::vector<double>& y, std::vector<double>& dy) {
        // discontinuous, non-integrable rhs forces endless rejection
        dy[0] = (y[0] >= 0.0 ? 1.0 : -1.0) * 1e308;
    };
    CHECK_THROWS_AS(rk45_solve(stiff, {1.0}, 0.0, 1.0, {1.0}), StepSizeUnderflow);
}

TEST_CASE("spectral decomposition: eigenvalue residuals are small") {
    RandomStream rng(45, 0);
    const Liouvillian l = random_lindblad(rng, 3, 2);
    const auto sd = spectral_decompose(l);
    const std::size_t n = sd.eigenvalues.size();
    const double scale = l.matrix().frobenius_norm();
    for (std::size_t k = 0; k < n; ++k) {
        CVector rk(n);
        for (std::size_t i = 0; i < n; ++i) rk[i] = sd.right(i, k);
        const CVector lrk = l.matrix() * rk;
        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            resid += std::norm(lrk[i] - sd.eigenvalues[k] * rk[i]);
        CHECK(std::sqrt(resid) < 1e-8 * scale);
    }
}

TEST_CASE("trotter error shrinks monotonically under step doubling, random pairs") {
    RandomStream rng(46, 0);
    for (int pair = 0; pair < 10; ++pair) {
        const CMatrix h = testutil::random_hermitian(rng, 2);
        const auto channels = testutil::random_channels(rng, 2, 1);
        const Liouvillian l1 = build_liouvillian(h, {});
        const Liouvillian l2 = build_liouvillian(CMatrix(2, 2), channels);
        CMatrix total = l1.matrix() + l2.matrix();
        const auto rho0 = testutil::random_density(rng, 2);
        const CMatrix exact = propagate_expm(Liouvillian(total), rho0, 3.0).matrix();
        double prev = 1e300;
        for (const std::size_t n : {8u, 16u, 32u, 64u}) {
            const double err =
                (trotter_propagate(l1, l2, rho0, 3.0, n).matrix() - exact).frobenius_norm();
            CHECK(err < prev + 1e-12); // monotone within the noise floor
            prev = err;
        }
    }
}
