// mcwf.hpp — Stochastic (Monte Carlo) wavefunction unraveling of the Lindblad
// equation: jump sampling per trajectory, first-order non-Hermitian drift,
// and deterministic ensemble averaging.

#pragma once

#include <cstdint>
#include <vector>

#include "qme/liouville.hpp"
#include "qme/operator_core.hpp"
#include "qme/rng.hpp"

namespace qme::mcwf {

struct TrajectoryConfig {
    double dt = 0.0;
    std::size_t n_steps = 0;
    std::size_t n_trajectories = 1;
    std::uint64_t seed = 0;
    std::vector<LindbladChannel> channels;
    CMatrix hamiltonian;
    std::size_t n_threads = 0; // 0 = hardware concurrency; result independent of it
};

// dt * ||H_eff||_op; above ~0.1 the first-order drift step is suspect.
double step_size_indicator(const TrajectoryConfig& cfg);

struct ObservableStats {
    std::vector<double> mean;    // Re<A> per time point
    std::vector<double> std_err; // standard error of the mean
};

struct EnsembleResult {
    std::vector<double> times;
    std::vector<CMatrix> mean_state; // (1/N) sum |psi_j><psi_j| per time point
    std::size_t n = 0;
    std::vector<ObservableStats> observables; // one per requested observable
    double jumps_per_trajectory = 0.0;
};

// One stochastic trajectory; returns n_steps+1 states including the initial
// one. The stream must be dedicated to this trajectory.
std::vector<PureState> sample_trajectory(const TrajectoryConfig& cfg, const PureState& psi0,
                                         RandomStream& stream,
                                         std::size_t* jump_count = nullptr);

// Ensemble mean over n_trajectories decorrelated substreams keyed by
// (seed, trajectory index). Bitwise reproducible for a fixed (seed, cfg),
// regardless of thread count.
EnsembleResult ensemble_average(const TrajectoryConfig& cfg, const PureState& psi0,
                                const std::vector<CMatrix>& observables = {});

} // namespace qme::mcwf
