#pragma once

#include "plmix/assessment.hpp"
#include "plmix/em_map.hpp"
#include "plmix/error.hpp"
#include "plmix/gibbs.hpp"
#include "plmix/io.hpp"
#include "plmix/matrix.hpp"
#include "plmix/parallel.hpp"
#include "plmix/plmodel.hpp"
#include "plmix/random.hpp"
#include "plmix/rank_data.hpp"
#include "plmix/relabel.hpp"
#include "plmix/selection.hpp"
