#pragma once

#include <functional>
#include <vector>

namespace fdkit {

struct NelderMeadOptions {
  std::size_t max_iterations = 2000;
  double tolerance = 1e-8;       // on both simplex f-spread and x-spread
  double initial_step = 0.1;     // relative to each coordinate (absolute if 0)
  std::vector<double> lower;     // optional box; points are projected into it
  std::vector<double> upper;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& options = {});

}  // namespace fdkit
