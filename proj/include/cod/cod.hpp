#pragma once

#include "cod/ast.hpp"
#include "cod/basics.hpp"
#include "cod/compile.hpp"
#include "cod/diagnostics.hpp"
#include "cod/explore.hpp"
#include "cod/export_dot.hpp"
#include "cod/export_uppaal.hpp"
#include "cod/lexer.hpp"
#include "cod/nta.hpp"
#include "cod/nta_json.hpp"
#include "cod/parser.hpp"
#include "cod/printer.hpp"
#include "cod/query.hpp"
#include "cod/temporal.hpp"
#include "cod/validate.hpp"
