#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rover {

/// A nondeterministic branch point inside one simulation tick.
struct ChoicePoint {
  std::string label;
  std::size_t options{1};
  std::vector<double> weights;  // optional, used by the random resolver only
};

struct ChoiceTaken {
  std::string label;
  std::size_t index{0};
  std::size_t options{1};
  friend bool operator==(const ChoiceTaken&, const ChoiceTaken&) = default;
};

/// Resolves choice points. The simulator resolves them at random from a seed,
/// the explorer enumerates them and replay follows a recorded script.
class Chooser {
 public:
  virtual ~Chooser() = default;
  std::size_t choose(const ChoicePoint& point);
  const std::vector<ChoiceTaken>& taken() const { return taken_; }
  void clear() { taken_.clear(); }

 protected:
  virtual std::size_t pick(const ChoicePoint& point) = 0;

 private:
  std::vector<ChoiceTaken> taken_;
};

class RandomChooser final : public Chooser {
 public:
  explicit RandomChooser(std::uint64_t seed) : rng_(seed) {}

 protected:
  std::size_t pick(const ChoicePoint& point) override;

 private:
  std::mt19937_64 rng_;
};

/// Follows a fixed index sequence over the multi-option points; points past
/// the end of the script take option 0. `diverged()` reports a scripted index
/// that was out of range.
class ScriptedChooser final : public Chooser {
 public:
  explicit ScriptedChooser(std::vector<std::size_t> script = {}) : script_(std::move(script)) {}
  bool diverged() const { return diverged_; }
  bool consumed() const { return next_ == script_.size(); }

 protected:
  std::size_t pick(const ChoicePoint& point) override;

 private:
  std::vector<std::size_t> script_;
  std::size_t next_{0};
  bool diverged_{false};
};

}  // namespace rover
