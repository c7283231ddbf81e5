#pragma once

#include <cstddef>
#include <vector>

namespace shellred {

// Serial is the reference path; Parallel runs the per-point loops under OpenMP.
// Reductions always go through a per-point buffer summed in index order, so both
// paths give bit-identical totals.
enum class Exec { Serial, Parallel };

void set_threads(int n);
int max_threads();

// Pairwise summation in fixed order.
double ordered_sum(const double* v, std::size_t n);
inline double ordered_sum(const std::vector<double>& v) { return ordered_sum(v.data(), v.size()); }

template <class F>
void for_each_index(Exec ex, int n, F&& f) {
  if (ex == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n; ++k) f(k);
  } else {
    for (int k = 0; k < n; ++k) f(k);
  }
}

}  // namespace shellred
