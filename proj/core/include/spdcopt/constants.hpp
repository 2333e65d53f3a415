#pragma once

namespace spdcopt {

inline constexpr double kSpeedOfLight = 299'792'458.0; // m/s

// Standard single-mode fiber at 1550 nm: 18 ps/(nm km). The coefficient is
// half the group-velocity dispersion, so accumulated dispersion is beta * L.
inline constexpr double kSmfBeta = -1.15e-26;       // s^2/m
inline constexpr double kSmfAttenuation = 0.2;      // dB/km
inline constexpr double kTelecomWavelength = 1550e-9; // m

} // namespace spdcopt
