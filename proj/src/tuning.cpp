#include "ctd/tuning.hpp"

#include <algorithm>
#include <cmath>

#include "ctd/engine.hpp"
#include "ctd/scenario.hpp"

namespace ctd {

namespace {

constexpr double kSweepFloor = 10.0;   // spikes/s, slowest drive F must cover
constexpr double kSweepCeil = 200.0;   // spikes/s, default sweep top
constexpr int kSweepPoints = 48;
constexpr int kSweepHorizon = 3000;
constexpr int kSweepBurnIn = 500;

int spike_interval(double rate, double dt) {
  return static_cast<int>(std::llround(1.0 / (rate * dt)));
}

// Scalar replica of one probe neuron on a regular constant-rate train: leaky
// accumulation, floor at zero, reset on fire, one-step refractory. True when
// the neuron fires at or after the sweep burn-in.
bool fires_at(double weight, double threshold, double leak, double dt, double rate) {
  double v = 0.0;
  double acc = 0.0;
  int refr = 0;
  for (int t = 0; t < kSweepHorizon; ++t) {
    v *= leak;
    acc += rate * dt;
    if (acc >= 1.0) {
      v += weight;
      acc = std::min(acc - 1.0, 1.0);
    }
    if (v < 0.0) v = 0.0;
    if (v >= threshold && refr == 0) {
      if (t >= kSweepBurnIn) return true;
      v = 0.0;
      refr = 1;
    } else if (refr > 0) {
      --refr;
    }
  }
  return false;
}

// Smallest weight that makes the neuron respond to constant drive at the
// given rate; the onset then sits at that rate.
double solve_weight(double threshold, double leak, double dt, double rate) {
  double lo = 0.5 * threshold * (1.0 - leak);
  double hi = 1.001 * threshold;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (fires_at(mid, threshold, leak, dt, rate)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

void check_bands(const BandSpec& bands) {
  if (!(bands.f1 > 0.0 && bands.f1 < bands.f2))
    throw InfeasibleBands("bands must satisfy 0 < f1 < f2");
  if (!(bands.tolerance > 0.0 && bands.tolerance < 0.5))
    throw InfeasibleBands("tolerance must lie in (0, 0.5)");
}

double onset_rate(double weight, double threshold, double leak, double dt) {
  if (!(weight > 0.0)) throw std::invalid_argument("onset_rate: weight must be > 0");
  if (!(threshold > 0.0))
    throw std::invalid_argument("onset_rate: threshold must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("onset_rate: dt must be > 0");
  if (leak < 0.0 || leak >= 1.0)
    throw std::invalid_argument("onset_rate: leak must lie in [0, 1)");
  return threshold * (1.0 - leak) / (weight * dt);
}

CmdParams calibrate(const BandSpec& bands, double leak, double dt) {
  check_bands(bands);
  if (!(dt > 0.0)) throw std::invalid_argument("calibrate: dt must be > 0");
  if (leak < 0.0 || leak >= 1.0)
    throw std::invalid_argument("calibrate: leak must lie in [0, 1)");

  const int n1 = spike_interval(bands.f1, dt);
  const int n2 = spike_interval(bands.f2, dt);
  const int n_floor = spike_interval(kSweepFloor, dt);
  if (n2 < 2)
    throw InfeasibleBands("f2 exceeds the one-fire-per-two-steps ceiling at this dt");
  if (n1 <= n2)
    throw InfeasibleBands("f1 and f2 collapse onto the same spike interval at this dt");
  if (n_floor <= n1)
    throw InfeasibleBands("f1 does not clear the sweep floor of " +
                          std::to_string(kSweepFloor) + " spikes/s");
  if (leak == 0.0)
    throw InfeasibleBands("leak 0 retains nothing between spikes; no rate separation");

  double scale = 1.0;
  std::string last_failure;
  for (int attempt = 0; attempt < 3; ++attempt, scale *= 1.5) {
    CmdParams params;
    params.t_near = 2.0 * scale;
    params.t_middle = 3.0 * scale;
    params.t_far = 4.0 * scale;
    params.w_near = solve_weight(params.t_near, leak, dt, bands.f2);
    params.w_middle = solve_weight(params.t_middle, leak, dt, bands.f1);
    // the far state must answer anything from the sweep floor up
    params.w_far = 1.02 * solve_weight(params.t_far, leak, dt, kSweepFloor);
    try {
      check_cmd_params(params);
      return params;
    } catch (const std::invalid_argument& e) {
      last_failure = e.what();
    }
  }
  throw InfeasibleBands("no parameter set satisfies the orderings: " + last_failure);
}

BandReport verify_bands(const CmdParams& params, const BandSpec& bands, double leak,
                        double dt) {
  BandReport report;
  try {
    check_bands(bands);
    const double lo = std::min(kSweepFloor, 0.5 * bands.f1);
    const double hi = std::max(kSweepCeil, 1.3 * bands.f2);
    const CircuitTopology probe = build_cmd_probe(params, leak, 1, true);

    for (int i = 0; i < kSweepPoints; ++i) {
      const double rate = lo + (hi - lo) * i / (kSweepPoints - 1);
      const SpikeTrain train = regular_train(0, rate, dt, kSweepHorizon);
      const SimTrace trace = run(probe, {train}, kSweepHorizon);

      bool near = false, middle = false, far = false;
      for (int t = kSweepBurnIn; t < kSweepHorizon; ++t) {
        for (int id : trace.frames[t].fired) {
          if (id == 0) near = true;
          if (id == 1) middle = true;
          if (id == 2) far = true;
        }
      }
      Proximity state = Proximity::None;
      if (near) {
        state = Proximity::Near;
      } else if (middle) {
        state = Proximity::Middle;
      } else if (far) {
        state = Proximity::Far;
      }
      report.sweep.push_back({rate, state});
    }
  } catch (const std::exception& e) {
    report.failure = std::string("sweep failed: ") + e.what();
    return report;
  }

  int first_middle = -1;
  int first_near = -1;
  for (std::size_t i = 0; i < report.sweep.size(); ++i) {
    if (first_middle < 0 && report.sweep[i].state == Proximity::Middle)
      first_middle = static_cast<int>(i);
    if (first_near < 0 && report.sweep[i].state == Proximity::Near)
      first_near = static_cast<int>(i);
  }
  if (first_middle < 0 || first_near < 0 || first_near <= first_middle) {
    report.failure = "no F | M | N partition across the sweep";
    return report;
  }
  report.measured_f1 = report.sweep[first_middle].rate;
  report.measured_f2 = report.sweep[first_near].rate;

  // Partition check with one stray point allowed at each boundary.
  int low_bad = 0, mid_bad = 0, high_bad = 0;
  for (int i = 0; i < first_middle; ++i) {
    const Proximity s = report.sweep[i].state;
    if (s != Proximity::Far && s != Proximity::None) ++low_bad;
  }
  for (int i = first_middle; i < first_near; ++i)
    if (report.sweep[i].state != Proximity::Middle) ++mid_bad;
  for (std::size_t i = first_near; i < report.sweep.size(); ++i)
    if (report.sweep[i].state != Proximity::Near) ++high_bad;
  report.monotone = low_bad == 0 && mid_bad <= 1 && high_bad <= 1;

  const bool f1_ok =
      std::abs(report.measured_f1 - bands.f1) <= bands.tolerance * bands.f1;
  const bool f2_ok =
      std::abs(report.measured_f2 - bands.f2) <= bands.tolerance * bands.f2;
  if (!report.monotone) {
    report.failure = "band structure not monotone across the sweep";
  } else if (!f1_ok) {
    report.failure = "measured f1 " + std::to_string(report.measured_f1) +
                     " outside tolerance of " + std::to_string(bands.f1);
  } else if (!f2_ok) {
    report.failure = "measured f2 " + std::to_string(report.measured_f2) +
                     " outside tolerance of " + std::to_string(bands.f2);
  } else {
    report.pass = true;
  }
  return report;
}

}  // namespace ctd
