#pragma once

#include "eqt/errors.hpp"
#include "eqt/laurent.hpp"
#include "eqt/symbol.hpp"
#include "eqt/correction.hpp"
#include "eqt/qt_matrix.hpp"
#include "eqt/eqt_matrix.hpp"
#include "eqt/solver.hpp"
#include "eqt/quarter_plane.hpp"
#include "eqt/serialize.hpp"
