#pragma once

#include "ctfpw/core/error.hpp"
#include "ctfpw/core/fourier.hpp"
#include "ctfpw/core/geometry.hpp"
#include "ctfpw/core/grid.hpp"
#include "ctfpw/core/parallel.hpp"
#include "ctfpw/forward/ctf.hpp"
#include "ctfpw/forward/phantom.hpp"
#include "ctfpw/forward/sampler.hpp"
#include "ctfpw/genfn/genfn.hpp"
#include "ctfpw/genfn/verify.hpp"
#include "ctfpw/genfn/zero_table.hpp"
#include "ctfpw/interp/paley_wiener.hpp"
#include "ctfpw/interp/wks.hpp"
#include "ctfpw/io/manifest.hpp"
#include "ctfpw/io/pgm.hpp"
#include "ctfpw/io/raw_io.hpp"
#include "ctfpw/retrieval/retrieval.hpp"
#include "ctfpw/version.hpp"
