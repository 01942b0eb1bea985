#pragma once

#include "clab/matcore.hpp"
#include "clab/seqcore.hpp"
#include "clab/centralizers.hpp"
#include "clab/sampling.hpp"
#include "clab/metrology.hpp"
#include "clab/twisted.hpp"
#include "clab/io.hpp"
#include "clab/experiments.hpp"
