#pragma once

#include "qdec/ansatz.hpp"
#include "qdec/bitvec.hpp"
#include "qdec/dem.hpp"
#include "qdec/matching.hpp"
#include "qdec/mld.hpp"
#include "qdec/sampler.hpp"
#include "qdec/selfcorrect.hpp"
#include "qdec/simulator.hpp"
#include "qdec/trainer.hpp"
#include "qdec/version.hpp"
