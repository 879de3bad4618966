#ifndef MUSKAT_MUSKAT_HPP
#define MUSKAT_MUSKAT_HPP

// Whole library minus the CLI layer (which pulls in CLI11).
#include "muskat/config.hpp"
#include "muskat/error.hpp"
#include "muskat/evolution.hpp"
#include "muskat/fft.hpp"
#include "muskat/fields.hpp"
#include "muskat/grid.hpp"
#include "muskat/io.hpp"
#include "muskat/kernels.hpp"
#include "muskat/linear.hpp"
#include "muskat/operator.hpp"
#include "muskat/quadrature.hpp"
#include "muskat/snapshot.hpp"
#include "muskat/tolerances.hpp"
#include "muskat/verify.hpp"

#endif  // MUSKAT_MUSKAT_HPP
