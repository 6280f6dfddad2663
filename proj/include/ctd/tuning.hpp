#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ctd/circuits.hpp"
#include "ctd/decode.hpp"

// Calibration of CMD weights and thresholds against prescribed spike-rate
// bands, plus the simulation sweep that verifies the resulting band
// boundaries.

namespace ctd {

// Target rate bands: far below f1, middle in [f1, f2), near above f2.
struct BandSpec {
  double f1 = 160.0;  // spikes/s, far/middle boundary
  double f2 = 250.0;  // spikes/s, middle/near boundary
  double tolerance = 0.1;  // relative, in (0, 0.5)
};

struct InfeasibleBands : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Throws InfeasibleBands unless 0 < f1 < f2 and tolerance in (0, 0.5).
void check_bands(const BandSpec& bands);

// First-order onset estimate: the constant input rate whose steady-state
// potential w*r*dt/(1-leak) reaches the threshold. Exact only when the
// inter-spike decay is small; calibration trusts simulation instead.
// Throws std::invalid_argument for leak outside [0, 1) or non-positive args.
double onset_rate(double weight, double threshold, double leak, double dt);

// Solves weights for thresholds fixed at (2, 3, 4) so that, under regular
// drive, the middle neuron switches on at f1, the near neuron at f2, and the
// far neuron responds to anything at or above the sweep floor. Each weight is
// bisected against a scalar replica of the discrete dynamics; the first-order
// onset formula is only a design guide. Throws InfeasibleBands when the bands
// cannot be separated at this leak/dt.
CmdParams calibrate(const BandSpec& bands, double leak, double dt);

struct SweepPoint {
  double rate = 0.0;
  Proximity state = Proximity::None;
};

struct BandReport {
  std::vector<SweepPoint> sweep;
  double measured_f1 = 0.0;  // first swept rate decoding Middle
  double measured_f2 = 0.0;  // first swept rate decoding Near
  bool monotone = false;     // F | M | N partition, one-point hysteresis allowed
  bool pass = false;
  std::string failure;       // empty when pass
};

// Sweeps constant-rate regular trains through a single CMD unit with priority
// inhibition enabled and reports where the decoded state changes. Never
// throws on bad params; the report carries the failure.
BandReport verify_bands(const CmdParams& params, const BandSpec& bands, double leak,
                        double dt);

}  // namespace ctd
