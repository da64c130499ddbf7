#pragma once

#include "nnrank/error.hpp"
#include "nnrank/lowrank.hpp"
#include "nnrank/matcore.hpp"
#include "nnrank/matrix.hpp"
#include "nnrank/matrix_io.hpp"
#include "nnrank/nmf.hpp"
#include "nnrank/nnfactor.hpp"
#include "nnrank/rank3geo.hpp"
#include "nnrank/reports.hpp"
#include "nnrank/sconelab.hpp"
