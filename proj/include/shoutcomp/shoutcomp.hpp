#pragma once

// Umbrella header: shouted/normal vocal-effort detection and linear
// embedding compensation, with verification-trial evaluation around it.

#include "shoutcomp/compensation.hpp"
#include "shoutcomp/dataset_io.hpp"
#include "shoutcomp/error.hpp"
#include "shoutcomp/gmm.hpp"
#include "shoutcomp/logistic.hpp"
#include "shoutcomp/loso.hpp"
#include "shoutcomp/metrics.hpp"
#include "shoutcomp/model_io.hpp"
#include "shoutcomp/scoring.hpp"
#include "shoutcomp/synth.hpp"
#include "shoutcomp/trials.hpp"
#include "shoutcomp/types.hpp"
