#pragma once

#include "overgrad/dataset.hpp"
#include "overgrad/diagnostics.hpp"
#include "overgrad/error.hpp"
#include "overgrad/experiment.hpp"
#include "overgrad/gram.hpp"
#include "overgrad/linalg.hpp"
#include "overgrad/network.hpp"
#include "overgrad/optim.hpp"
#include "overgrad/parallel.hpp"
#include "overgrad/plots.hpp"
#include "overgrad/rng.hpp"
#include "overgrad/spectral.hpp"
#include "overgrad/sweep.hpp"
#include "overgrad/theory.hpp"
#include "overgrad/trace_io.hpp"
#include "overgrad/train.hpp"
