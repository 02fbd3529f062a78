#include "qst/planes.hpp"

#include <algorithm>
#include <stdexcept>

namespace qst {

BooleanPlanes::BooleanPlanes(Session<BooleanAlgebra>& session)
    : fragment_(session.fragment()), atoms_(session.lattice().atom_count()), full_(session.lattice().full_mask()) {
  if (!fragment_ || !session.dense()) throw std::invalid_argument("bit planes need a session with a small attached fragment");
  n_ = static_cast<std::uint32_t>(fragment_->size());
  words_ = (n_ + 63) / 64;
  tail_ = n_ % 64 ? (std::uint64_t{1} << (n_ % 64)) - 1 : ~std::uint64_t{0};
  const std::size_t nn = std::size_t{n_} * n_;
  eq8_.resize(nn);
  mem8_.resize(nn);
  for (std::uint32_t u = 0; u < n_; ++u) {
    const auto er = session.equality_row(u);
    const auto mr = session.membership_row(u);
    for (std::uint32_t j = 0; j < n_; ++j) {
      eq8_[std::size_t{u} * n_ + j] = er[j].bits;
      mem8_[std::size_t{u} * n_ + j] = mr[j].bits;
    }
  }
  const std::size_t total = std::size_t{n_} * atoms_ * words_;
  eq_rows_.assign(total, 0);
  mem_rows_.assign(total, 0);
  mem_cols_.assign(total, 0);
  for (std::uint32_t u = 0; u < n_; ++u) {
    for (std::uint32_t j = 0; j < n_; ++j) {
      const std::uint8_t e = eq(u, j), m = mem(u, j);
      const std::uint64_t bit = std::uint64_t{1} << (j % 64);
      for (int k = 0; k < atoms_; ++k) {
        if (e >> k & 1) eq_rows_[offset(u, k) + j / 64] |= bit;
        if (m >> k & 1) mem_rows_[offset(u, k) + j / 64] |= bit;
        if (m >> k & 1) mem_cols_[offset(j, k) + u / 64] |= std::uint64_t{1} << (u % 64);
      }
    }
  }
}

PlaneEvaluator::PlaneEvaluator(const BooleanPlanes& planes, const Formula& core, const std::vector<std::string>& params)
    : t_(planes) {
  if (params.empty()) throw std::invalid_argument("plane evaluation needs at least one parameter");
  std::vector<std::pair<std::string, int>> scope;
  std::vector<bool> slot_dep;
  for (const auto& p : params) {
    scope.emplace_back(p, static_cast<int>(slot_dep.size()));
    slot_dep.push_back(false);
  }
  batched_ = static_cast<int>(params.size()) - 1;
  slot_dep[batched_] = true;
  root_ = compile(core, scope, slot_dep);
  slots_.assign(slot_dep.size(), 0);
  stride_ = std::size_t(t_.atoms()) * t_.words();
  buffers_.assign(cells_.size() * stride_, 0);
}

int PlaneEvaluator::compile(const Formula& f, std::vector<std::pair<std::string, int>>& scope,
                            std::vector<bool>& slot_dep) {
  auto slot_of = [&](const std::string& name) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    throw UnboundVariable(name, f->span);
  };
  Cell c{f->op};
  switch (f->op) {
    case Op::Not:
      c.a = compile(f->children[0], scope, slot_dep);
      c.dep = cells_[c.a].dep;
      break;
    case Op::And:
      c.a = compile(f->children[0], scope, slot_dep);
      c.b = compile(f->children[1], scope, slot_dep);
      c.dep = cells_[c.a].dep || cells_[c.b].dep;
      break;
    case Op::ForallIn: {
      c.bound = slot_of(f->bound);
      c.var = static_cast<int>(slot_dep.size());
      slot_dep.push_back(slot_dep[c.bound]);
      scope.emplace_back(f->var, c.var);
      c.a = compile(f->children[0], scope, slot_dep);
      scope.pop_back();
      c.dep = slot_dep[c.bound] || cells_[c.a].dep;
      break;
    }
    case Op::Eq:
    case Op::In:
      c.lhs = slot_of(f->lhs);
      c.rhs = slot_of(f->rhs);
      c.dep = slot_dep[c.lhs] || slot_dep[c.rhs];
      break;
    default:
      throw std::invalid_argument("plane evaluation takes core formulas without unbounded quantifiers");
  }
  cells_.push_back(c);
  return static_cast<int>(cells_.size()) - 1;
}

std::uint8_t PlaneEvaluator::eval_scalar(int ci) {
  const Cell& c = cells_[ci];
  switch (c.op) {
    case Op::Not:
      return static_cast<std::uint8_t>(~eval_scalar(c.a) & t_.full());
    case Op::And: {
      const std::uint8_t x = eval_scalar(c.a);
      return x ? static_cast<std::uint8_t>(x & eval_scalar(c.b)) : 0;
    }
    case Op::ForallIn: {
      std::uint8_t acc = t_.full();
      for (const auto& e : t_.fragment().dom(slots_[c.bound])) {
        if (!e.value.bits) continue;
        slots_[c.var] = e.key;
        acc &= static_cast<std::uint8_t>(~e.value.bits | eval_scalar(c.a));
        if (!acc) break;
      }
      return acc;
    }
    case Op::Eq:
      return t_.eq(slots_[c.lhs], slots_[c.rhs]);
    case Op::In:
      return t_.mem(slots_[c.lhs], slots_[c.rhs]);
    default:
      return 0;
  }
}

void PlaneEvaluator::fill(std::uint64_t* dst, std::uint8_t value) {
  const std::size_t w = t_.words();
  for (int k = 0; k < t_.atoms(); ++k) {
    std::fill(dst + k * w, dst + (k + 1) * w, (value >> k & 1) ? ~std::uint64_t{0} : 0);
    dst[(k + 1) * w - 1] &= t_.tail_mask();
  }
}

void PlaneEvaluator::eval_plane(int ci) {
  const Cell& c = cells_[ci];
  std::uint64_t* out = buffer(ci);
  const std::size_t w = t_.words();
  const int m = t_.atoms();
  if (!c.dep) {
    fill(out, eval_scalar(ci));
    return;
  }
  auto per_member = [&](auto value_at) {
    std::fill(out, out + stride_, 0);
    for (std::uint32_t j = 0; j < t_.size(); ++j) {
      const std::uint8_t v = value_at(j);
      for (int k = 0; k < m; ++k) {
        if (v >> k & 1) out[k * w + j / 64] |= std::uint64_t{1} << (j % 64);
      }
    }
  };
  auto copy_planes = [&](auto plane_of) {
    for (int k = 0; k < m; ++k) std::copy_n(plane_of(k), w, out + k * w);
  };
  switch (c.op) {
    case Op::Not: {
      eval_plane(c.a);
      const std::uint64_t* x = buffer(c.a);
      for (std::size_t i = 0; i < stride_; ++i) out[i] = ~x[i];
      for (int k = 0; k < m; ++k) out[(k + 1) * w - 1] &= t_.tail_mask();
      return;
    }
    case Op::And: {
      eval_plane(c.a);
      const std::uint64_t* x = buffer(c.a);
      if (std::all_of(x, x + stride_, [](std::uint64_t v) { return v == 0; })) {
        std::fill(out, out + stride_, 0);
        return;
      }
      eval_plane(c.b);
      const std::uint64_t* y = buffer(c.b);
      for (std::size_t i = 0; i < stride_; ++i) out[i] = x[i] & y[i];
      return;
    }
    case Op::ForallIn: {
      if (c.bound == batched_) {
        per_member([&](std::uint32_t j) {
          slots_[batched_] = j;
          return eval_scalar(ci);
        });
        return;
      }
      fill(out, t_.full());
      for (const auto& e : t_.fragment().dom(slots_[c.bound])) {
        if (!e.value.bits) continue;
        slots_[c.var] = e.key;
        eval_plane(c.a);
        const std::uint64_t* body = buffer(c.a);
        bool any = false;
        for (int k = 0; k < m; ++k) {
          std::uint64_t* dst = out + k * w;
          if (e.value.bits >> k & 1) {
            for (std::size_t i = 0; i < w; ++i) dst[i] &= body[k * w + i];
          }
          for (std::size_t i = 0; i < w && !any; ++i) any = dst[i] != 0;
        }
        if (!any) return;
      }
      return;
    }
    case Op::Eq: {
      if (c.lhs == batched_ && c.rhs == batched_) {
        per_member([&](std::uint32_t j) { return t_.eq(j, j); });
      } else {
        const std::uint32_t fixed = slots_[c.lhs == batched_ ? c.rhs : c.lhs];
        copy_planes([&](int k) { return t_.eq_plane(fixed, k); });
      }
      return;
    }
    case Op::In: {
      if (c.lhs == batched_ && c.rhs == batched_) {
        per_member([&](std::uint32_t j) { return t_.mem(j, j); });
      } else if (c.lhs == batched_) {
        copy_planes([&](int k) { return t_.mem_col_plane(slots_[c.rhs], k); });
      } else {
        copy_planes([&](int k) { return t_.mem_row_plane(slots_[c.lhs], k); });
      }
      return;
    }
    default:
      return;
  }
}

std::span<const std::uint64_t> PlaneEvaluator::run(std::span<const std::uint32_t> fixed) {
  if (fixed.size() != static_cast<std::size_t>(batched_)) throw std::invalid_argument("wrong number of fixed arguments");
  std::copy(fixed.begin(), fixed.end(), slots_.begin());
  eval_plane(root_);
  return {buffer(root_), stride_};
}

std::uint8_t PlaneEvaluator::scalar(std::span<const std::uint32_t> args) {
  if (args.size() != static_cast<std::size_t>(batched_) + 1) throw std::invalid_argument("wrong number of arguments");
  std::copy(args.begin(), args.end(), slots_.begin());
  return eval_scalar(root_);
}

}  // namespace qst
