#pragma once

// Umbrella header.

#include "systolic/b2_parameters.hpp"
#include "systolic/certificate.hpp"
#include "systolic/cli.hpp"
#include "systolic/config.hpp"
#include "systolic/coverage.hpp"
#include "systolic/covering.hpp"
#include "systolic/density.hpp"
#include "systolic/distance.hpp"
#include "systolic/errors.hpp"
#include "systolic/flat_optimum.hpp"
#include "systolic/geodesic.hpp"
#include "systolic/integrator.hpp"
#include "systolic/isometry.hpp"
#include "systolic/manifold.hpp"
#include "systolic/metric.hpp"
#include "systolic/profile.hpp"
#include "systolic/pushforward.hpp"
#include "systolic/quadrature.hpp"
#include "systolic/report.hpp"
#include "systolic/systole.hpp"
