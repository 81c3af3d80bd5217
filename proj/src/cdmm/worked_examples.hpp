#pragma once

#include <string>
#include <vector>

#include "cdmm/simulator.hpp"

namespace cdmm {

struct ExampleCheck {
  std::string name;
  bool passed = false;
  std::size_t responses = 0;  // responses used by the fastest successful path
  std::string detail;
  double seconds = 0;
};

/// SEP K1=K2=m=2, X=2: modulo decode from the 16 roots of order 16, full
/// decode from those plus one extra point.
ExampleCheck example_sep_modulo(u64 seed);
/// TSEP K1=m=2, K2=3, X=1 (role-swapped): 17 roots of order 17 and any 20 of
/// 21 points.
ExampleCheck example_tsep(u64 seed);
/// EP K1=K2=m=2 over the 10th roots: 4 complete pairs, any 9, and exhaustive
/// threshold enumeration.
ExampleCheck example_ep_grouped(u64 seed);
/// LRC m=6, r=3, delta=3, N=15: 3 per group decodes, a short group fails, and
/// exhaustive enumeration over all subsets.
ExampleCheck example_lrc(u64 seed);

std::vector<ExampleCheck> run_worked_examples(u64 seed);
std::string worked_examples_csv(const std::vector<ExampleCheck>& checks, bool include_timing);

}  // namespace cdmm
