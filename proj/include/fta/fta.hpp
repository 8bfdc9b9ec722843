#pragma once

#include "linalg.hpp"
#include "abelian.hpp"
#include "word.hpp"
#include "automaton.hpp"
#include "folding.hpp"
#include "labeled.hpp"
#include "enriched.hpp"
#include "intersection.hpp"
