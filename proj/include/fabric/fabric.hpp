#pragma once

#include "fabric/error.hpp"
#include "fabric/image.hpp"
#include "fabric/imgcore.hpp"
#include "fabric/io.hpp"
#include "fabric/wiener.hpp"
#include "fabric/spectral.hpp"
#include "fabric/density.hpp"
#include "fabric/metrics.hpp"
#include "fabric/weave.hpp"
#include "fabric/defect.hpp"
#include "fabric/synthgen.hpp"
