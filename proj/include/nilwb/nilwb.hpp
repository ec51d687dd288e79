#pragma once

#include "nilwb/centralizer.hpp"
#include "nilwb/dense_matrix.hpp"
#include "nilwb/lattice.hpp"
#include "nilwb/malcev.hpp"
#include "nilwb/matrix_group.hpp"
#include "nilwb/rational_span.hpp"
#include "nilwb/series.hpp"
#include "nilwb/spec_io.hpp"
#include "nilwb/split_group.hpp"
#include "nilwb/suite.hpp"
#include "nilwb/uni_matrix.hpp"
#include "nilwb/unipotent_log.hpp"
#include "nilwb/weights.hpp"
