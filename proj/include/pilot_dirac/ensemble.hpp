#pragma once

// Born-rule position sampling, ensemble guidance evolution and the
// equivariance (Kolmogorov-Smirnov) test.

#include "pilot_dirac/observables.hpp"
#include "pilot_dirac/particle.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <thread>
#include <vector>

namespace pilot {

struct Ensemble {
  std::uint64_t seed = 0;
  std::vector<double> positions;
  std::vector<Trajectory> trajectories; // optional, per sample
  std::vector<ParticleState> states;    // current state per surviving sample
  std::vector<bool> excluded;           // node-crossing samples
  int excluded_count = 0;
};

inline int max_threads() {
  if (const char* env = std::getenv("PILOT_DIRAC_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Inverse-CDF sampling of P on the lattice, linear within each cell.
// Deterministic under the seed; samples are drawn serially up front.
inline Ensemble sample_positions(const ScalarField& P, const Grid& grid, int n,
                                 std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_positions: n must be >= 1");
  const double total = integrate(P, grid);
  if (std::abs(total - 1.0) > 1e-6)
    throw std::invalid_argument("sample_positions: P is not normalized");
  // cumulative mass up to the left edge of each cell
  std::vector<double> cum(grid.nx + 1, 0.0);
  for (int i = 0; i < grid.nx; ++i) cum[i + 1] = cum[i] + P[i] * grid.dx;

  Ensemble ens;
  ens.seed = seed;
  ens.positions.reserve(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, cum[grid.nx]);
  for (int s = 0; s < n; ++s) {
    const double u = uni(rng);
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    int cell = static_cast<int>(it - cum.begin()) - 1;
    cell = std::clamp(cell, 0, grid.nx - 1);
    const double mass = cum[cell + 1] - cum[cell];
    const double frac = mass > 0 ? (u - cum[cell]) / mass : 0.5;
    ens.positions.push_back((cell + frac) * grid.dx);
  }
  ens.excluded.assign(n, false);
  return ens;
}

// Advance every sample through the snapshot series with the guidance
// integrator; samples never interact. Node-crossing samples are excluded
// and counted. Parallel over samples (capped by PILOT_DIRAC_THREADS);
// results are identical to a serial run.
inline void evolve_ensemble(Ensemble& ens,
                            const std::vector<CurrentSnapshot>& snaps,
                            const Grid& grid, double k,
                            bool store_trajectories = false) {
  if (snaps.size() < 2)
    throw std::invalid_argument("evolve_ensemble: need >= 2 snapshots");
  const int n = static_cast<int>(ens.positions.size());
  ens.states.resize(n);
  for (int s = 0; s < n; ++s) {
    ens.states[s] = ParticleState{};
    ens.states[s].t = snaps.front().t;
    ens.states[s].x = ens.positions[s];
  }
  if (store_trajectories) {
    ens.trajectories.assign(n, Trajectory{});
    for (int s = 0; s < n; ++s) ens.trajectories[s].push_back(ens.states[s]);
  }

  for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
    const GuidanceField begin(snaps[i], grid);
    const GuidanceField mid(snaps[i], snaps[i + 1], grid);
    const GuidanceField end(snaps[i + 1], grid);
    const double dt = snaps[i + 1].t - snaps[i].t;

    auto worker = [&](int lo, int hi) {
      for (int s = lo; s < hi; ++s) {
        if (ens.excluded[s]) continue;
        try {
          ens.states[s] =
              advance_trajectory(ens.states[s], begin, mid, end, dt, grid, k);
          if (store_trajectories) ens.trajectories[s].push_back(ens.states[s]);
        } catch (const NodeError&) {
          ens.excluded[s] = true;
        }
      }
    };
    const int nthreads = std::min(max_threads(), n);
    if (nthreads <= 1) {
      worker(0, n);
    } else {
      std::vector<std::thread> pool;
      const int chunk = (n + nthreads - 1) / nthreads;
      for (int tix = 0; tix < nthreads; ++tix)
        pool.emplace_back(worker, tix * chunk, std::min(n, (tix + 1) * chunk));
      for (auto& th : pool) th.join();
    }
  }
  ens.excluded_count =
      static_cast<int>(std::count(ens.excluded.begin(), ens.excluded.end(), true));
}

// Piecewise-linear CDF of a lattice density, evaluated at x.
inline double lattice_cdf(const ScalarField& P, const Grid& grid, double x) {
  const double total = integrate(P, grid);
  const double s = grid.wrap(x) / grid.dx;
  const int cell = std::min(static_cast<int>(s), grid.nx - 1);
  double cum = 0.0;
  for (int i = 0; i < cell; ++i) cum += P[i] * grid.dx;
  cum += P[cell] * grid.dx * (s - cell);
  return cum / total;
}

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0; // 1% significance
  int n = 0;
  bool pass = false;
};

// Two-sided KS statistic of sample positions against the lattice density P.
// `safety` absorbs O(dt^2) trajectory bias on top of the 1% critical value.
inline KsResult ks_test(std::vector<double> positions, const ScalarField& P,
                        const Grid& grid, double safety = 1.0) {
  const int n = static_cast<int>(positions.size());
  if (n < 1) throw std::invalid_argument("ks_test: empty sample");
  // precompute cumulative sums once
  std::vector<double> cum(grid.nx + 1, 0.0);
  for (int i = 0; i < grid.nx; ++i) cum[i + 1] = cum[i] + P[i] * grid.dx;
  const double total = cum[grid.nx];
  auto cdf = [&](double x) {
    const double s = grid.wrap(x) / grid.dx;
    const int cell = std::min(static_cast<int>(s), grid.nx - 1);
    return (cum[cell] + P[cell] * grid.dx * (s - cell)) / total;
  };
  std::sort(positions.begin(), positions.end());
  double stat = 0.0;
  for (int i = 0; i < n; ++i) {
    const double F = cdf(positions[i]);
    stat = std::max(stat, std::max((i + 1.0) / n - F, F - i / static_cast<double>(n)));
  }
  KsResult r;
  r.statistic = stat;
  r.n = n;
  r.critical = 1.628 / std::sqrt(static_cast<double>(n)) * safety;
  r.pass = stat < r.critical;
  return r;
}

// Equivariance verdict for an evolved ensemble against P at the final time.
inline KsResult equivariance_test(const Ensemble& ens, const ScalarField& P,
                                  const Grid& grid, double safety = 1.5) {
  const int n = static_cast<int>(ens.positions.size());
  std::vector<double> survivors;
  survivors.reserve(n);
  for (int s = 0; s < n; ++s)
    if (!ens.excluded[s]) survivors.push_back(ens.states[s].x);
  if (survivors.size() < static_cast<std::size_t>(0.9 * n))
    throw ModelError("equivariance_test: more than 10% of samples hit nodes");
  return ks_test(std::move(survivors), P, grid, safety);
}

} // namespace pilot
