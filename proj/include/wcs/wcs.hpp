#ifndef WCS_WCS_HPP
#define WCS_WCS_HPP

#include "wcs/asymptotics.hpp"
#include "wcs/chain.hpp"
#include "wcs/config.hpp"
#include "wcs/intermeeting.hpp"
#include "wcs/io.hpp"
#include "wcs/kernel.hpp"
#include "wcs/montecarlo.hpp"
#include "wcs/quadrature.hpp"
#include "wcs/stats.hpp"
#include "wcs/sweep.hpp"
#include "wcs/validation.hpp"

#endif
