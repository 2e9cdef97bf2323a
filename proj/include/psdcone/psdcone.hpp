#pragma once

#include "psdcone/error.hpp"
#include "psdcone/generators.hpp"
#include "psdcone/io.hpp"
#include "psdcone/lebesgue.hpp"
#include "psdcone/linalg.hpp"
#include "psdcone/matrix.hpp"
#include "psdcone/preserver.hpp"
#include "psdcone/projective.hpp"
#include "psdcone/psd.hpp"
#include "psdcone/relations.hpp"
#include "psdcone/scalar.hpp"
#include "psdcone/semilinear.hpp"
#include "psdcone/suite.hpp"
