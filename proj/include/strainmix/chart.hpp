#pragma once

#include <span>
#include <string>

#include "strainmix/exact.hpp"

namespace strainmix {

/// Stacked bars of the strain composition among the infected, one bar per
/// stratum, annotated with the contrast. Throws EmptyReport without terms.
std::string render_chart(const ContrastReport& report);

/// One bar per (time point, stratum), each annotated with its contrast.
/// Throws EmptyReport for an empty series.
std::string render_chart(std::span<const TimePoint> series);

}  // namespace strainmix
