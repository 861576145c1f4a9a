#include "rover/choice.hpp"

#include <numeric>

namespace rover {

std::size_t Chooser::choose(const ChoicePoint& point) {
  const std::size_t idx = point.options <= 1 ? 0 : pick(point);
  taken_.push_back({point.label, idx, point.options});
  return idx;
}

std::size_t RandomChooser::pick(const ChoicePoint& point) {
  // Engine output only: distributions are not portable across standard libraries.
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  if (point.weights.size() == point.options) {
    const double total = std::accumulate(point.weights.begin(), point.weights.end(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < point.options; ++i) {
      acc += point.weights[i] / total;
      if (u < acc) return i;
    }
    return point.options - 1;
  }
  return static_cast<std::size_t>(u * static_cast<double>(point.options));
}

std::size_t ScriptedChooser::pick(const ChoicePoint& point) {
  if (next_ >= script_.size()) return 0;
  const std::size_t idx = script_[next_++];
  if (idx >= point.options) {
    diverged_ = true;
    return 0;
  }
  return idx;
}

}  // namespace rover
