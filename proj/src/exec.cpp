#include "shellred/exec.hpp"
#include "shellred/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shellred {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::DegenerateChart: return "DegenerateChart";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::OrientationViolation: return "OrientationViolation";
    case ErrorKind::NonPositiveDeterminant: return "NonPositiveDeterminant";
    case ErrorKind::StepCollapsed: return "StepCollapsed";
    case ErrorKind::InadmissibleThickness: return "InadmissibleThickness";
    case ErrorKind::InadmissibleInitialState: return "InadmissibleInitialState";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Error";
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double ordered_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t m = n / 2;
  return ordered_sum(v, m) + ordered_sum(v + m, n - m);
}

}  // namespace shellred
