#pragma once

namespace bocd {

/// Probability that a change point alone pushes the windowed anomaly
/// posterior to its prior-driven ceiling: the rate of spurious anomaly
/// alarms implied by (p0, q0, delta_t). Strictly increasing in q0.
double spurious_alarm_rate(double p0, double q0, int delta_t);

/// The same quantity as log-odds. The rate saturates to 1.0 in double
/// precision for q0 near 1 at large delta_t; the log-odds never do, so
/// monotonicity is checkable at full precision.
double spurious_alarm_log_odds(double p0, double q0, int delta_t);

/// Largest q0 such that spurious_alarm_rate stays below lambda_a, found by
/// bisection on the monotone rate.
double q0_upper_bound(double p0, int delta_t, double lambda_a);

/// Smallest alert threshold that keeps prior-driven alarms silent for the
/// given q0; equals the spurious alarm rate itself.
double lambda_a_lower_bound(double p0, double q0, int delta_t);

}  // namespace bocd
