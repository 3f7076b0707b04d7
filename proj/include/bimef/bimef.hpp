#pragma once

#include "bimef/camera_response.hpp"
#include "bimef/error.hpp"
#include "bimef/exposure_sampler.hpp"
#include "bimef/fusion.hpp"
#include "bimef/illumination.hpp"
#include "bimef/image.hpp"
#include "bimef/metrics.hpp"
