#pragma once

#include <chrono>

namespace antsess {

// Wall-clock seconds spent in each pipeline phase.
struct PhaseTimings {
  double parse = 0;
  double sessionize = 0;
  double similarity = 0;
  double init = 0;      // template learning
  double simulate = 0;  // random meetings
  double assign = 0;    // pruning + orphan reassignment

  double total() const { return parse + sessionize + similarity + init + simulate + assign; }
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace antsess
