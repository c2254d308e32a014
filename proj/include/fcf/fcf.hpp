#pragma once

#include "bloch.hpp"
#include "chern.hpp"
#include "drive.hpp"
#include "effective.hpp"
#include "error.hpp"
#include "fourier.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "optimizer.hpp"
#include "parallel.hpp"
#include "validate.hpp"
