#pragma once

#include "modalcheck/builtins.hpp"
#include "modalcheck/cell.hpp"
#include "modalcheck/cell_search.hpp"
#include "modalcheck/checker.hpp"
#include "modalcheck/derivation.hpp"
#include "modalcheck/errors.hpp"
#include "modalcheck/judgements.hpp"
#include "modalcheck/lexer.hpp"
#include "modalcheck/metatheory.hpp"
#include "modalcheck/mode_theory.hpp"
#include "modalcheck/mtt.hpp"
#include "modalcheck/parser.hpp"
#include "modalcheck/path.hpp"
#include "modalcheck/printer.hpp"
#include "modalcheck/syntax.hpp"
#include "modalcheck/walking_comonad.hpp"
