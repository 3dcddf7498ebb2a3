#pragma once

#include "poitour/archive.hpp"
#include "poitour/corpus.hpp"
#include "poitour/error.hpp"
#include "poitour/eval.hpp"
#include "poitour/geo.hpp"
#include "poitour/ingest.hpp"
#include "poitour/itinerary_io.hpp"
#include "poitour/model.hpp"
#include "poitour/model_io.hpp"
#include "poitour/objective.hpp"
#include "poitour/random.hpp"
#include "poitour/recommend.hpp"
#include "poitour/subword.hpp"
#include "poitour/train.hpp"
