#ifndef FGEN_TIMING_HPP_INCLUDED
#define FGEN_TIMING_HPP_INCLUDED

#include <array>
#include <chrono>
#include <cstdint>
#include <string_view>
#include <type_traits>
#include <utility>

namespace fgen {

enum class Phase { Filter, Evaluate, Feasibility, Combine, NetworkCosts };

inline constexpr std::array<Phase, 5> kAllPhases = {Phase::Filter, Phase::Evaluate,
                                                    Phase::Feasibility, Phase::Combine,
                                                    Phase::NetworkCosts};

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Filter: return "Filter";
    case Phase::Evaluate: return "Evaluate";
    case Phase::Feasibility: return "Feasibility";
    case Phase::Combine: return "Combine";
    case Phase::NetworkCosts: return "NetworkCosts";
  }
  return "Filter";
}

/// Accumulates monotonic wall-clock time per phase.
class PhaseTimer {
 public:
  using clock = std::chrono::steady_clock;

  template <class F>
  decltype(auto) time(Phase p, F&& f) {
    const auto start = clock::now();
    struct Stop {
      PhaseTimer& t;
      Phase p;
      clock::time_point start;
      ~Stop() {
        t.elapsed_[static_cast<std::size_t>(p)] +=
            std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - start).count();
      }
    } stop{*this, p, start};
    return std::forward<F>(f)();
  }

  std::int64_t elapsed_ns(Phase p) const { return elapsed_[static_cast<std::size_t>(p)]; }
  std::int64_t total_ns() const {
    std::int64_t t = 0;
    for (auto e : elapsed_) t += e;
    return t;
  }
  void reset() { elapsed_.fill(0); }

 private:
  std::array<std::int64_t, kAllPhases.size()> elapsed_{};
};

/// Runs `f` under `timer` when one is supplied.
template <class F>
decltype(auto) timed(PhaseTimer* timer, Phase p, F&& f) {
  if (timer) return timer->time(p, std::forward<F>(f));
  return std::forward<F>(f)();
}

}  // namespace fgen

#endif  // FGEN_TIMING_HPP_INCLUDED
