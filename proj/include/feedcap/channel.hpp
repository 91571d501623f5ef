#pragma once

#include "feedcap/riccati.hpp"
#include "feedcap/statespace.hpp"

namespace feedcap {

// Validated stable minimum-phase ISI channel, held as a minimal realization
// (F, G, H, 1) of the inverse filter.  The channel maps input u and unit
// white noise N to output y:
//
//   s+ = F s + G u,   y = H s + u + N.
struct ChannelModel {
  StateSpaceSystem inv_z;  // (F, G, H, 1)
  bool gain_normalized = true;

  int order() const { return inv_z.state_dim(); }  // m
  Mat F() const { return inv_z.A; }
  Vec G() const { return inv_z.B.col(0); }
  RowVec H() const { return inv_z.C.row(0); }
};

// Checks all channel invariants: F Schur-stable, F - G H Schur-stable
// (minimum phase), unit feedthrough, controllable and observable realization.
// Throws ValidationError naming the violated property.
ChannelModel validate(const StateSpaceSystem& inv_z);

// Scales the output equation of the inverse filter so its feedthrough is 1.
StateSpaceSystem normalize_gain(const StateSpaceSystem& inv_z);

// normalize_gain followed by validate.
ChannelModel make_channel(const StateSpaceSystem& inv_z);

// Realization of a rational inverse filter
//   num(z^-1) / den(z^-1), coefficients in ascending powers of z^-1,
// in controller companion form (denominator coefficients across the first
// row of F).
StateSpaceSystem rational_system(const Vec& num, const Vec& den);

// The identity channel (m = 0, AWGN).
ChannelModel awgn_channel();

// Builds the filtering plant for encoder (A, C) against this channel.
// Rejects encoder eigenvalues on the unit circle or colliding with
// eigenvalues of F.
AugmentedPlant augment(const ChannelModel& ch, const Mat& A, const RowVec& C);

// One step of the channel recursion; returns y_t and advances s in place.
double simulate_channel_step(const ChannelModel& ch, Vec& s, double u, double noise);

}  // namespace feedcap
