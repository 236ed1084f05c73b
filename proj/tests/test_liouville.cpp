#include <doctest.h>

#include <cmath>

#include "qme/liouville.hpp"
#include "qme/operators.hpp"
#include "qme/rng.hpp"

#include "test_support.hpp"

using namespace qme;
using testutil::max_abs_diff;

namespace {

// Two-level Hamiltonian with energy splitting and coupling, relaxation and
// (identity) dephasing channels.
CMatrix tl_hamiltonian(double delta, double omega) {
    CMatrix h(2, 2);
    h(0, 1) = omega;
    h(1, 0) = omega;
    h(1, 1) = delta;
    return h;
}

} // namespace

TEST_CASE("vectorize: column stacking and round trip") {
    const CVector v = vectorize(CMatrix::identity(2));
    CHECK(v[0] == cplx{1.0, 0.0});
    CHECK(v[1] == cplx{0.0, 0.0});
    CHECK(v[2] == cplx{0.0, 0.0});
    CHECK(v[3] == cplx{1.0, 0.0});

    RandomStream rng(31, 0);
    const CMatrix m = testutil::random_matrix(rng, 3, 3);
    CHECK(max_abs_diff(devectorize(vectorize(m)), m) == 0.0);

    CHECK_THROWS_AS(devectorize(CVector(5)), LengthNotSquare);
}

TEST_CASE("vec(AXB) == (B^T (x) A) vec(X)") {
    RandomStream rng(32, 0);
    for (int rep = 0; rep < 5; ++rep) {
        const CMatrix a = testutil::random_matrix(rng, 3, 3);
        const CMatrix x = testutil::random_matrix(rng, 3, 3);
        const CMatrix b = testutil::random_matrix(rng, 3, 3);
        const CVector lhs = vectorize(a * x * b);
        const CVector rhs = tensor_product(b.transpose(), a) * vectorize(x);
        double worst = 0.0;
        for (std::size_t i = 0; i < lhs.size(); ++i)
            worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("build_liouvillian: trivial cases and input validation") {
    const Liouvillian zero = build_liouvillian(CMatrix(2, 2), {});
    CHECK(zero.matrix().max_abs() == 0.0);
    CHECK(zero.dim() == 2);

    CMatrix not_herm(2, 2);
    not_herm(0, 1) = 1.0;
    CHECK_THROWS_AS(build_liouvillian(not_herm, {}), NonHermitianHamiltonian);

    CHECK_THROWS_AS(build_liouvillian(CMatrix::identity(2),
                                      {{CMatrix::identity(3), 1.0}}),
                    DimensionMismatch);
}

TEST_CASE("relaxation without driving: null space spanned by the ground state") {
    const Liouvillian l =
        build_liouvillian(tl_hamiltonian(1.0, 0.0), {{ops::ketbra(2, 0, 1), 0.5}});
    const auto states = steady_states(l);
    REQUIRE(states.size() == 1);
    CMatrix expect(2, 2);
    expect(0, 0) = 1.0;
    CHECK(max_abs_diff(states[0], expect) < 1e-10);
}

TEST_CASE("dephasing + driving: two-dimensional null space") {
    const Liouvillian l =
        build_liouvillian(tl_hamiltonian(1.0, 0.7), {{CMatrix::identity(2), 0.5}});
    CHECK(steady_states(l).size() == 2);
}

TEST_CASE("zero generator: null space dimension 4") {
    CHECK(steady_states(Liouvillian(CMatrix(4, 4))).size() == 4);
}

TEST_CASE("lindblad_rhs: coherent-only and amplitude-damping arithmetic") {
    // H = sigma_z, no channels, rho = |+><+|: purely coherent rhs
    const auto plus = DensityOperator::from_pure(
        PureState(CVector{cplx{std::sqrt(0.5), 0}, cplx{std::sqrt(0.5), 0}}));
    const CMatrix rhs = lindblad_rhs(plus.matrix(), ops::sigma_z(), {});
    CMatrix expect = commutator(ops::sigma_z(), plus.matrix());
    expect *= cplx{0.0, -1.0};
    CHECK(max_abs_diff(rhs, expect) < 1e-15);

    // amplitude damping on |e><e|: diagonal (+gamma, -gamma), index 0 = |g>
    const double gamma = 0.37;
    CMatrix excited(2, 2);
    excited(1, 1) = 1.0;
    const CMatrix damp = lindblad_rhs(excited, CMatrix(2, 2), {{ops::ketbra(2, 0, 1), gamma}});
    CHECK(damp(0, 0).real() == doctest::Approx(gamma));
    CHECK(damp(1, 1).real() == doctest::Approx(-gamma));
    CHECK(std::abs(damp(0, 1)) < 1e-15);

    // steady state plugged back in gives zero
    const Liouvillian l =
        build_liouvillian(tl_hamiltonian(1.0, 0.0), {{ops::ketbra(2, 0, 1), 0.5}});
    const CMatrix ss = steady_states(l)[0];
    CHECK(lindblad_rhs(ss, tl_hamiltonian(1.0, 0.0), {{ops::ketbra(2, 0, 1), 0.5}})
              .frobenius_norm() < 1e-10);
}

TEST_CASE("master property: assembled generator equals the direct rhs oracle") {
    RandomStream rng(33, 0);
    for (const std::size_t d : {2u, 3u, 4u}) {
        const CMatrix h = testutil::random_hermitian(rng, d);
        const auto channels = testutil::random_channels(rng, d, 3);
        const Liouvillian l = build_liouvillian(h, channels);
        for (int rep = 0; rep < 20; ++rep) {
            const CMatrix rho = testutil::random_matrix(rng, d, d);
            const CMatrix via_l = devectorize(l.matrix() * vectorize(rho));
            CHECK(max_abs_diff(via_l, lindblad_rhs(rho, h, channels)) < 1e-12);
        }
    }
}

TEST_CASE("generator preserves trace and Hermiticity") {
    RandomStream rng(34, 0);
    const CMatrix h = testutil::random_hermitian(rng, 3);
    const auto channels = testutil::random_channels(rng, 3, 2);
    const Liouvillian l = build_liouvillian(h, channels);
    CHECK(trace_preservation_defect(l) < 1e-10);

    for (int rep = 0; rep < 10; ++rep) {
        const CMatrix rho = testutil::random_hermitian(rng, 3);
        const CMatrix out = devectorize(l.matrix() * vectorize(rho));
        CHECK(out.hermiticity_defect() < 1e-12);
    }
}

TEST_CASE("steady states are physical and annihilated by the generator") {
    RandomStream rng(35, 0);
    const CMatrix h = testutil::random_hermitian(rng, 3);
    const auto channels = testutil::random_channels(rng, 3, 2);
    const Liouvillian l = build_liouvillian(h, channels);
    for (const CMatrix& ss : steady_states(l)) {
        if (std::abs(ss.trace() - cplx{1.0, 0.0}) < 1e-9) {
            const auto score = state_score(ss);
            CHECK(score.score >= 1.0 - 1e-8);
        }
        CVector lv = l.matrix() * vectorize(ss);
        double nrm = 0.0;
        for (const auto& z : lv) nrm += std::norm(z);
        CHECK(std::sqrt(nrm) < 1e-9);
    }
}
