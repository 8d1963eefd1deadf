#pragma once

// Umbrella header.
#include "data_io.hpp"
#include "dissimilarity.hpp"
#include "evaluation.hpp"
#include "matrix.hpp"
#include "mmrs.hpp"
#include "pipeline.hpp"
#include "projection.hpp"
#include "render.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "tsne.hpp"
#include "vat.hpp"
