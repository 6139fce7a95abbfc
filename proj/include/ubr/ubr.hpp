#pragma once

// Umbrella header: deterministic ensemble synthesis plus the squared-signal
// spectral pipeline used to study low-frequency power-law enhancement.

#include "ubr/config.hpp"
#include "ubr/config_io.hpp"
#include "ubr/csv.hpp"
#include "ubr/errors.hpp"
#include "ubr/experiment.hpp"
#include "ubr/fft.hpp"
#include "ubr/melody.hpp"
#include "ubr/presets.hpp"
#include "ubr/seed_tree.hpp"
#include "ubr/spectral.hpp"
#include "ubr/synth.hpp"
#include "ubr/time_series.hpp"
#include "ubr/version.hpp"
#include "ubr/wav.hpp"
