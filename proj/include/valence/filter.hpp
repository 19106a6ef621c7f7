#pragma once

#include <span>
#include <vector>

namespace valence {

/// Normalized second-order section (a0 = 1), transposed direct form II.
struct Biquad {
  double b0, b1, b2;
  double a1, a2;
};

using SosFilter = std::vector<Biquad>;

/// Digital Butterworth designs via the prewarped bilinear transform.
SosFilter butterworth_lowpass(int order, double cutoff_hz, double rate_hz);
SosFilter butterworth_highpass(int order, double cutoff_hz, double rate_hz);

/// Causal single pass, state initialised to the steady state of x[0].
std::vector<double> sos_filter(const SosFilter& sos, std::span<const double> x);

/// Forward-backward (zero-phase) application with odd-reflection padding of
/// `padlen` samples on each side (clamped to x.size() - 1).
std::vector<double> filtfilt(const SosFilter& sos, std::span<const double> x, size_t padlen);

/// Magnitude of the single-pass frequency response at `freq_hz`.
double magnitude_response(const SosFilter& sos, double freq_hz, double rate_hz);

}  // namespace valence
