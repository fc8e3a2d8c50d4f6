#pragma once

#include "symba/error.hpp"
#include "symba/group.hpp"
#include "symba/modmat.hpp"
#include "symba/alphabet.hpp"
#include "symba/ca.hpp"
#include "symba/synthesis.hpp"
#include "symba/lef.hpp"
#include "symba/group_ring.hpp"
#include "symba/io.hpp"
