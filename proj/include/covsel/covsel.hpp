#pragma once

#include "covsel/errors.hpp"
#include "covsel/linalg.hpp"
#include "covsel/problem.hpp"
#include "covsel/oracle.hpp"
#include "covsel/solve_report.hpp"
#include "covsel/spg.hpp"
#include "covsel/ans.hpp"
#include "covsel/gsics.hpp"
#include "covsel/instgen.hpp"
#include "covsel/io.hpp"
