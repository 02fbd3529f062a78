#include "qst/lattice.hpp"

namespace qst {

std::string BooleanAlgebra::describe(Element a) const {
  check(a);
  if (a.bits == 0) return "0";
  if (a.bits == full_mask()) return "1";
  std::string s = "0b";
  for (int i = atoms_ - 1; i >= 0; --i) s += ((a.bits >> i) & 1u) ? '1' : '0';
  return s;
}

}  // namespace qst
