#pragma once

#include <vector>

#include "covsel/oracle.hpp"

namespace covsel {

// One record per accepted iterate (and one for the starting point).
struct TraceRecord {
  long iteration = 0;
  double g = 0.0;
  double gap = 0.0;
  double lam_max = 0.0;
  double beta = 0.0;
  // SPG acceptance data for the step that produced this iterate; zero for the start.
  double step = 0.0;
  double g_ref = 0.0;      // nonmonotone reference max of the last M dual values
  double dir_deriv = 0.0;  // <d_k, grad g(U_k)>
};

struct SolveReport {
  SymMatrix u;
  OracleEval eval;
  long iterations = 0;
  long fevals = 0;
  double gap = 0.0;
  double beta_final = 0.0;
  bool converged = false;
  std::vector<double> betas;  // every beta value used, in order
  std::vector<TraceRecord> trace;
};

}  // namespace covsel
