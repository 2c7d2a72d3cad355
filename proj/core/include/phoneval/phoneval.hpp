#pragma once

#include "phoneval/beamform.hpp"
#include "phoneval/bss_eval.hpp"
#include "phoneval/digest.hpp"
#include "phoneval/dsp.hpp"
#include "phoneval/error.hpp"
#include "phoneval/fft.hpp"
#include "phoneval/log.hpp"
#include "phoneval/noise.hpp"
#include "phoneval/phoneme.hpp"
#include "phoneval/pipeline.hpp"
#include "phoneval/random.hpp"
#include "phoneval/records.hpp"
#include "phoneval/scene.hpp"
#include "phoneval/stft.hpp"
#include "phoneval/wav.hpp"
#include "phoneval/waveform.hpp"
