#pragma once

#include "qst/formula.hpp"

#include <random>
#include <string>
#include <vector>

namespace qst::testing {

// Random formula whose free variables come from `names`; bound variables are
// fresh per depth so every generated formula is closed over `names`.
inline Formula random_closed(std::mt19937_64& rng, std::vector<std::string> names, int budget, bool unbounded) {
  auto pick = [&] { return names[rng() % names.size()]; };
  const int kinds = unbounded ? 10 : 8;
  const int k = budget <= 0 ? static_cast<int>(rng() % 2) : static_cast<int>(rng() % kinds);
  const std::string fresh = "b" + std::to_string(budget);
  auto with_fresh = [&] {
    auto more = names;
    more.push_back(fresh);
    return more;
  };
  switch (k) {
    case 0: return f_eq(pick(), pick());
    case 1: return f_in(pick(), pick());
    case 2: return f_not(random_closed(rng, names, budget - 1, unbounded));
    case 3: return f_and(random_closed(rng, names, budget - 1, unbounded), random_closed(rng, names, budget - 1, unbounded));
    case 4: return f_or(random_closed(rng, names, budget - 1, unbounded), random_closed(rng, names, budget - 1, unbounded));
    case 5: return f_implies(random_closed(rng, names, budget - 1, unbounded), random_closed(rng, names, budget - 1, unbounded));
    case 6: return f_forall_in(fresh, pick(), random_closed(rng, with_fresh(), budget - 1, unbounded));
    case 7: return f_exists_in(fresh, pick(), random_closed(rng, with_fresh(), budget - 1, unbounded));
    case 8: return f_forall(fresh, random_closed(rng, with_fresh(), budget - 1, unbounded));
    default: return f_exists(fresh, random_closed(rng, with_fresh(), budget - 1, unbounded));
  }
}

}  // namespace qst::testing
