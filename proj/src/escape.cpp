#include <algorithm>
#include <cmath>
#include <thread>

#include "wobblelab/potential.hpp"
#include "wobblelab/random.hpp"

namespace wobblelab {

namespace {

struct Tally {
  std::int64_t escapes = 0;
  std::int64_t exits = 0;
  std::int64_t returns = 0;
  std::int64_t isolated = 0;
};

void run_block(const Walker& walker, std::int64_t horizon, std::uint64_t seed, std::int64_t begin,
               std::int64_t end, Tally& tally) {
  for (std::int64_t i = begin; i < end; ++i) {
    auto rng = trial_stream(seed, static_cast<std::uint64_t>(i));
    switch (walker.run(horizon, rng)) {
      case TrialOutcome::escaped:
        ++tally.escapes;
        break;
      case TrialOutcome::exited:
        ++tally.escapes;
        ++tally.exits;
        break;
      case TrialOutcome::returned:
        ++tally.returns;
        break;
      case TrialOutcome::isolated:
        ++tally.isolated;
        break;
    }
  }
}

}  // namespace

EscapeEstimate mc_escape_probability(const Space& space, PointId x0, std::int64_t jump, std::int64_t horizon,
                                     std::int64_t trials, std::uint64_t seed, unsigned threads) {
  if (jump < 1) throw Error("jump radius R must be >= 1");
  if (horizon < 1) throw Error("horizon must be >= 1");
  if (trials < 1) throw Error("trials must be >= 1");
  if (!space.contains(x0)) throw OutOfRegionError("start point outside the working region");

  const auto walker = space.walker(x0, jump);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, trials));

  // counts are sums over per-trial streams, so the split does not matter
  std::vector<Tally> tallies(threads);
  std::vector<std::jthread> pool;
  const std::int64_t chunk = (trials + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::int64_t begin = std::min(trials, t * chunk);
    const std::int64_t end = std::min(trials, begin + chunk);
    if (t + 1 == threads) {
      run_block(*walker, horizon, seed, begin, end, tallies[t]);
    } else {
      pool.emplace_back(run_block, std::cref(*walker), horizon, seed, begin, end, std::ref(tallies[t]));
    }
  }
  pool.clear();

  EscapeEstimate out;
  out.trials = trials;
  out.horizon = horizon;
  for (const auto& t : tallies) {
    out.escapes += t.escapes;
    out.exits += t.exits;
    out.returns += t.returns;
    out.isolated = out.isolated || t.isolated > 0;
  }
  const double p = static_cast<double>(out.escapes) / static_cast<double>(trials);
  out.estimate = p;
  out.ci95 = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return out;
}

}  // namespace wobblelab
