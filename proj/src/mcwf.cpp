#include "qme/mcwf.hpp"

#include <cmath>
#include <future>
#include <thread>

#include "qme/kernels.hpp"
#include "qme/linalg.hpp"

namespace qme::mcwf {

namespace {

struct Prepared {
    std::vector<CMatrix> jump_ops; // sqrt(rate) L_k, zero-rate channels dropped
    std::vector<CMatrix> jump_sq;  // L'_k^dag L'_k
    CMatrix drift;                 // 1 - i H_eff dt
};

Prepared prepare(const TrajectoryConfig& cfg) {
    const std::size_t d = cfg.hamiltonian.rows();
    if (!cfg.hamiltonian.is_square())
        throw NonSquare("mcwf: Hamiltonian is not square");
    if (cfg.dt <= 0.0) throw Error("mcwf: dt must be positive");
    Prepared p;
    CMatrix heff = cfg.hamiltonian;
    for (const auto& ch : cfg.channels) {
        if (!ch.op.is_square() || ch.op.rows() != d)
            throw DimensionMismatch("mcwf: channel dimension mismatch");
        if (ch.rate < 0.0) throw Error("mcwf: negative channel rate");
        if (ch.rate == 0.0) continue;
        CMatrix lk = std::sqrt(ch.rate) * ch.op;
        CMatrix sq = lk.adjoint() * lk;
        CMatrix half = sq;
        half *= cplx{0.0, -0.5};
        heff += half;
        p.jump_ops.push_back(std::move(lk));
        p.jump_sq.push_back(std::move(sq));
    }
    p.drift = CMatrix::identity(d);
    heff *= cplx{0.0, -cfg.dt};
    p.drift += heff;
    return p;
}

// <psi| M |psi> for Hermitian M.
double quadratic_form(const CMatrix& m, const CVector& psi, CVector& scratch) {
    kernels::gemv(m.data(), psi.data(), scratch.data(), m.rows(), m.cols());
    return kernels::dotc(psi.data(), scratch.data(), psi.size()).real();
}

std::vector<PureState> run_one(const Prepared& p, const TrajectoryConfig& cfg,
                               const PureState& psi0, RandomStream& stream,
                               std::size_t* jump_count) {
    const std::size_t d = psi0.dim();
    const std::size_t n_ch = p.jump_ops.size();
    std::vector<PureState> states;
    states.reserve(cfg.n_steps + 1);
    states.push_back(psi0);

    CVector psi = psi0.amplitudes();
    CVector scratch(d), next(d);
    std::vector<double> dp(n_ch);
    std::size_t jumps = 0;

    for (std::size_t step = 0; step < cfg.n_steps; ++step) {
        double dp_total = 0.0;
        for (std::size_t k = 0; k < n_ch; ++k) {
            dp[k] = cfg.dt * quadratic_form(p.jump_sq[k], psi, scratch);
            dp_total += dp[k];
        }
        if (dp_total >= 1.0)
            throw JumpBudgetExceeded(
                "mcwf: total jump probability per step reached 1; reduce dt");
        const double u = stream.uniform();
        if (dp_total < u) {
            kernels::gemv(p.drift.data(), psi.data(), next.data(), d, d);
        } else {
            const double u2 = stream.uniform();
            std::size_t pick = n_ch - 1;
            double cum = 0.0;
            for (std::size_t k = 0; k < n_ch; ++k) {
                cum += dp[k] / dp_total;
                if (cum > u2) { pick = k; break; }
            }
            kernels::gemv(p.jump_ops[pick].data(), psi.data(), next.data(), d, d);
            ++jumps;
        }
        const double nrm = vector_norm(next);
        if (nrm < 1e-14)
            throw ZeroNorm("mcwf: propagated state collapsed to zero norm");
        kernels::scal(cplx{1.0 / nrm, 0.0}, next.data(), d);
        psi = next;
        states.emplace_back(psi);
    }
    if (jump_count) *jump_count = jumps;
    return states;
}

} // namespace

double step_size_indicator(const TrajectoryConfig& cfg) {
    CMatrix heff = cfg.hamiltonian;
    for (const auto& ch : cfg.channels) {
        if (ch.rate == 0.0) continue;
        CMatrix lk = std::sqrt(ch.rate) * ch.op;
        CMatrix sq = lk.adjoint() * lk;
        sq *= cplx{0.0, -0.5};
        heff += sq;
    }
    return cfg.dt * lin::operator_norm(heff);
}

std::vector<PureState> sample_trajectory(const TrajectoryConfig& cfg, const PureState& psi0,
                                         RandomStream& stream, std::size_t* jump_count) {
    return run_one(prepare(cfg), cfg, psi0, stream, jump_count);
}

EnsembleResult ensemble_average(const TrajectoryConfig& cfg, const PureState& psi0,
                                const std::vector<CMatrix>& observables) {
    if (cfg.n_trajectories < 1) throw Error("mcwf: need at least one trajectory");
    const Prepared p = prepare(cfg);
    const std::size_t d = psi0.dim();
    const std::size_t n_t = cfg.n_steps + 1;
    const std::size_t n_obs = observables.size();

    // Fixed-size blocks of consecutive trajectory indices. Each block is
    // reduced sequentially in index order and blocks are combined in block
    // order, so the result does not depend on the thread schedule.
    constexpr std::size_t kBlock = 32;
    const std::size_t n_blocks = (cfg.n_trajectories + kBlock - 1) / kBlock;

    struct BlockSums {
        std::vector<CMatrix> state_sum;              // per time point
        std::vector<std::vector<double>> obs_sum;    // [obs][time]
        std::vector<std::vector<double>> obs_sumsq;  // [obs][time]
        std::size_t jumps = 0;
    };

    auto run_block = [&](std::size_t block) {
        BlockSums s;
        s.state_sum.assign(n_t, CMatrix(d, d));
        s.obs_sum.assign(n_obs, std::vector<double>(n_t, 0.0));
        s.obs_sumsq.assign(n_obs, std::vector<double>(n_t, 0.0));
        const std::size_t begin = block * kBlock;
        const std::size_t end = std::min(begin + kBlock, cfg.n_trajectories);
        for (std::size_t j = begin; j < end; ++j) {
            RandomStream stream(cfg.seed, j);
            std::size_t jumps = 0;
            const auto traj = run_one(p, cfg, psi0, stream, &jumps);
            s.jumps += jumps;
            for (std::size_t t = 0; t < n_t; ++t) {
                const CVector& a = traj[t].amplitudes();
                CMatrix& acc = s.state_sum[t];
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t jj = 0; jj < d; ++jj)
                        acc(i, jj) += a[i] * std::conj(a[jj]);
                for (std::size_t o = 0; o < n_obs; ++o) {
                    const double e = expectation(traj[t], observables[o]).real();
                    s.obs_sum[o][t] += e;
                    s.obs_sumsq[o][t] += e * e;
                }
            }
        }
        return s;
    };

    std::size_t n_threads = cfg.n_threads ? cfg.n_threads
                                          : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<std::size_t>(n_threads, n_blocks);

    std::vector<BlockSums> blocks(n_blocks);
    if (n_threads <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) blocks[b] = run_block(b);
    } else {
        std::vector<std::future<void>> futures;
        std::atomic<std::size_t> next{0};
        for (std::size_t w = 0; w < n_threads; ++w)
            futures.push_back(std::async(std::launch::async, [&] {
                for (;;) {
                    const std::size_t b = next.fetch_add(1);
                    if (b >= n_blocks) return;
                    blocks[b] = run_block(b);
                }
            }));
        for (auto& f : futures) f.get();
    }

    EnsembleResult res;
    res.n = cfg.n_trajectories;
    res.times.resize(n_t);
    for (std::size_t t = 0; t < n_t; ++t) res.times[t] = cfg.dt * static_cast<double>(t);
    res.mean_state.assign(n_t, CMatrix(d, d));
    std::vector<std::vector<double>> obs_sum(n_obs, std::vector<double>(n_t, 0.0));
    std::vector<std::vector<double>> obs_sumsq(n_obs, std::vector<double>(n_t, 0.0));
    std::size_t total_jumps = 0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        for (std::size_t t = 0; t < n_t; ++t) res.mean_state[t] += blocks[b].state_sum[t];
        for (std::size_t o = 0; o < n_obs; ++o)
            for (std::size_t t = 0; t < n_t; ++t) {
                obs_sum[o][t] += blocks[b].obs_sum[o][t];
                obs_sumsq[o][t] += blocks[b].obs_sumsq[o][t];
            }
        total_jumps += blocks[b].jumps;
    }
    const double inv_n = 1.0 / static_cast<double>(res.n);
    for (std::size_t t = 0; t < n_t; ++t) res.mean_state[t] *= cplx{inv_n, 0.0};
    res.observables.resize(n_obs);
    for (std::size_t o = 0; o < n_obs; ++o) {
        res.observables[o].mean.resize(n_t);
        res.observables[o].std_err.resize(n_t);
        for (std::size_t t = 0; t < n_t; ++t) {
            const double mean = obs_sum[o][t] * inv_n;
            res.observables[o].mean[t] = mean;
            const double var =
                std::max(0.0, obs_sumsq[o][t] * inv_n - mean * mean);
            res.observables[o].std_err[t] =
                (res.n > 1) ? std::sqrt(var / static_cast<double>(res.n - 1)) : 0.0;
        }
    }
    res.jumps_per_trajectory = static_cast<double>(total_jumps) * inv_n;
    return res;
}

} // namespace qme::mcwf
