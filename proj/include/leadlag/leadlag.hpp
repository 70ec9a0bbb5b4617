#pragma once

#include "leadlag/errors.hpp"
#include "leadlag/estimator.hpp"
#include "leadlag/filters.hpp"
#include "leadlag/ingest.hpp"
#include "leadlag/model.hpp"
#include "leadlag/model_io.hpp"
#include "leadlag/montecarlo.hpp"
#include "leadlag/parallel.hpp"
#include "leadlag/rng.hpp"
#include "leadlag/simulate.hpp"
