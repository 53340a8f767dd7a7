#pragma once

#include <span>

#include "mscs/cube.hpp"
#include "mscs/layout.hpp"
#include "mscs/linop.hpp"

namespace mscs {

// Fills every band of one m_u x m_v snapshot from that band's own samples.
// Output is n_bands images of m_u x m_v, band-major; at each pixel's own
// band the measured value is copied verbatim.
//
// Bands sampled on a regular lattice (mosaic layouts) use bilinear
// interpolation between lattice sites, held constant past the outermost
// sites. Other layouts use inverse-distance weighting of the nearby samples.
Vec interpolate_3d(std::span<const double> snapshot, const SensorLayout& layout);

// All snapshots of a frame, ordered (snapshot, band, u, v).
Vec interpolate_frame(const MeasurementFrame& frame, const SensorLayout& layout);

}  // namespace mscs
