#include "cnf.hpp"

#include <algorithm>

namespace cantor::detail {

CnfSolver::CnfSolver(int n_vars)
    : n_(n_vars),
      watches_(2 * n_vars),
      assign_(n_vars, -1),
      phase_(n_vars, 0),
      reason_(n_vars, -1),
      level_(n_vars, 0),
      activity_(n_vars, 0.0),
      heap_pos_(n_vars, -1),
      seen_(n_vars, 0),
      level_stamp_(n_vars + 1, 0) {
  heap_.reserve(n_vars);
  for (int v = 0; v < n_vars; ++v) heap_insert(v);
}

bool CnfSolver::add_clause(std::vector<Lit> lits) {
  if (unsat_) return false;
  std::sort(lits.begin(), lits.end());
  std::vector<Lit> out;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    Lit p = lits[i];
    if (i && p == lits[i - 1]) continue;
    if (i && (p ^ 1) == lits[i - 1]) return true;  // tautology
    int v = value(p);
    if (v == 1) return true;  // already satisfied at root
    if (v == 0) continue;     // falsified literal drops out
    out.push_back(p);
  }
  if (out.empty()) {
    unsat_ = true;
    return false;
  }
  if (out.size() == 1) {
    if (!enqueue(out[0], -1)) {
      unsat_ = true;
      return false;
    }
    unsat_ = propagate() >= 0;
    return !unsat_;
  }
  int idx = static_cast<int>(clauses_.size());
  watches_[out[0]].push_back({idx, out[1]});
  watches_[out[1]].push_back({idx, out[0]});
  clauses_.push_back(std::move(out));
  lbd_.push_back(0);
  return true;
}

bool CnfSolver::enqueue(Lit p, int reason) {
  int v = value(p);
  if (v >= 0) return v == 1;
  int var = p >> 1;
  assign_[var] = static_cast<signed char>(1 - (p & 1));
  // permanent assignments never take part in conflict analysis, so their
  // reason clause can be dropped (this keeps clause deletion simple)
  reason_[var] = trail_lim_.empty() ? -1 : reason;
  level_[var] = static_cast<int>(trail_lim_.size());
  trail_.push_back(p);
  return true;
}

int CnfSolver::propagate() {
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    Lit false_lit = p ^ 1;
    auto& ws = watches_[false_lit];
    std::size_t keep = 0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      Watch w = ws[i];
      if (value(w.blocker) == 1) {
        ws[keep++] = w;
        continue;
      }
      auto& c = clauses_[w.clause];
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      if (value(c[0]) == 1) {
        ws[keep++] = {w.clause, c[0]};
        continue;
      }
      bool moved = false;
      for (std::size_t j = 2; j < c.size(); ++j)
        if (value(c[j]) != 0) {
          std::swap(c[1], c[j]);
          watches_[c[1]].push_back({w.clause, c[0]});
          moved = true;
          break;
        }
      if (moved) continue;
      ws[keep++] = {w.clause, c[0]};
      if (value(c[0]) == 0) {
        // conflict: keep the remaining watchers and report
        for (std::size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
        ws.resize(keep);
        qhead_ = trail_.size();
        return w.clause;
      }
      enqueue(c[0], w.clause);
    }
    ws.resize(keep);
  }
  return -1;
}

void CnfSolver::analyze(int confl, std::vector<Lit>& learnt, int& bt_level,
                        int& lbd) {
  learnt.assign(1, 0);
  int counter = 0;
  Lit p = -1;
  int idx = static_cast<int>(trail_.size()) - 1;
  int current = static_cast<int>(trail_lim_.size());
  for (;;) {
    const auto& c = clauses_[confl];
    for (std::size_t j = (p < 0 ? 0 : 1); j < c.size(); ++j) {
      Lit q = c[j];
      int v = q >> 1;
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = 1;
      bump(v);
      if (level_[v] == current)
        ++counter;
      else
        learnt.push_back(q);
    }
    while (!seen_[trail_[idx] >> 1]) --idx;
    p = trail_[idx];
    seen_[p >> 1] = 0;
    if (--counter == 0) break;
    confl = reason_[p >> 1];
  }
  learnt[0] = p ^ 1;
  seen_[p >> 1] = 1;
  scratch_ = learnt;

  // drop literals whose reason clause lies entirely inside the remainder
  // of the learnt clause (self-subsuming resolution)
  std::size_t keep = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    int v = learnt[i] >> 1;
    int r = reason_[v];
    bool redundant = r >= 0;
    if (redundant)
      for (Lit u : clauses_[r]) {
        int uv = u >> 1;
        if (uv != v && !seen_[uv] && level_[uv] > 0) {
          redundant = false;
          break;
        }
      }
    if (!redundant) learnt[keep++] = learnt[i];
  }
  learnt.resize(keep);

  bt_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (level_[learnt[i] >> 1] > level_[learnt[max_i] >> 1]) max_i = i;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = level_[learnt[1] >> 1];
  }

  ++stamp_;
  lbd = 0;
  for (Lit q : learnt) {
    int lv = level_[q >> 1];
    if (level_stamp_[lv] != stamp_) {
      level_stamp_[lv] = stamp_;
      ++lbd;
    }
  }
  for (Lit q : scratch_) seen_[q >> 1] = 0;
}

void CnfSolver::cancel_until(int level) {
  if (static_cast<int>(trail_lim_.size()) <= level) return;
  int bound = trail_lim_[level];
  for (int i = static_cast<int>(trail_.size()) - 1; i >= bound; --i) {
    int v = trail_[i] >> 1;
    phase_[v] = assign_[v];
    assign_[v] = -1;
    reason_[v] = -1;
    if (heap_pos_[v] < 0) heap_insert(v);
  }
  trail_.resize(bound);
  trail_lim_.resize(level);
  qhead_ = bound;
}

void CnfSolver::reduce_learned() {
  // called at decision level 0 only; no reason pointers survive there
  std::vector<int> order;
  for (int i = core_end_; i < static_cast<int>(clauses_.size()); ++i)
    if (lbd_[i] > 2) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (lbd_[a] != lbd_[b]) return lbd_[a] < lbd_[b];
    if (clauses_[a].size() != clauses_[b].size())
      return clauses_[a].size() < clauses_[b].size();
    return a < b;
  });
  std::vector<char> drop(clauses_.size(), 0);
  for (std::size_t i = order.size() / 2; i < order.size(); ++i)
    drop[order[i]] = 1;
  std::vector<std::vector<Lit>> kept;
  std::vector<int> kept_lbd;
  kept.reserve(clauses_.size());
  for (std::size_t i = 0; i < clauses_.size(); ++i)
    if (!drop[i]) {
      kept.push_back(std::move(clauses_[i]));
      kept_lbd.push_back(lbd_[i]);
    }
  clauses_ = std::move(kept);
  lbd_ = std::move(kept_lbd);
  for (auto& ws : watches_) ws.clear();
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    const auto& c = clauses_[i];
    watches_[c[0]].push_back({static_cast<int>(i), c[1]});
    watches_[c[1]].push_back({static_cast<int>(i), c[0]});
  }
}

void CnfSolver::bump(int var) {
  activity_[var] += var_inc_;
  if (activity_[var] > 1e100) {
    for (int v = 0; v < n_; ++v) activity_[v] *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[var] >= 0) heap_up(heap_pos_[var]);
}

void CnfSolver::heap_insert(int var) {
  heap_pos_[var] = static_cast<int>(heap_.size());
  heap_.push_back(var);
  heap_up(heap_pos_[var]);
}

int CnfSolver::heap_pop() {
  int top = heap_[0];
  heap_pos_[top] = -1;
  heap_[0] = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_pos_[heap_[0]] = 0;
    heap_down(0);
  }
  return top;
}

void CnfSolver::heap_up(int i) {
  int v = heap_[i];
  while (i > 0) {
    int parent = (i - 1) >> 1;
    if (!heap_less(v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = i;
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

void CnfSolver::heap_down(int i) {
  int v = heap_[i];
  int n = static_cast<int>(heap_.size());
  for (;;) {
    int child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && heap_less(heap_[child + 1], heap_[child])) ++child;
    if (!heap_less(heap_[child], v)) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = i;
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

int CnfSolver::pick_branch_var() {
  while (!heap_.empty()) {
    int v = heap_pop();
    if (assign_[v] < 0) return v;
  }
  return -1;
}

namespace {
long long luby(long long i) {
  // the i-th term (1-based) of the Luby restart sequence 1,1,2,1,1,2,4,...
  for (;;) {
    long long k = 1;
    while ((1ll << k) - 1 < i) ++k;
    if ((1ll << k) - 1 == i) return 1ll << (k - 1);
    i -= (1ll << (k - 1)) - 1;
  }
}
}  // namespace

SatResult CnfSolver::solve(long long max_conflicts) {
  if (unsat_) return SatResult::unsatisfiable;
  if (propagate() >= 0) return SatResult::unsatisfiable;
  core_end_ = static_cast<int>(clauses_.size());
  long long conflicts = 0, restart_idx = 2;
  long long restart_budget = 256 * luby(1);
  long long reduce_at = 2000;
  std::vector<Lit> learnt;
  for (;;) {
    int confl = propagate();
    if (confl >= 0) {
      ++conflicts;
      if (trail_lim_.empty()) return SatResult::unsatisfiable;
      int bt = 0, lbd = 0;
      analyze(confl, learnt, bt, lbd);
      cancel_until(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], -1);
      } else {
        int idx = static_cast<int>(clauses_.size());
        watches_[learnt[0]].push_back({idx, learnt[1]});
        watches_[learnt[1]].push_back({idx, learnt[0]});
        clauses_.push_back(learnt);
        lbd_.push_back(lbd);
        enqueue(learnt[0], idx);
      }
      decay();
      if (conflicts > max_conflicts) return SatResult::budget_exhausted;
      if (--restart_budget <= 0) {
        cancel_until(0);
        restart_budget = 256 * luby(restart_idx++);
        if (static_cast<int>(clauses_.size()) - core_end_ >= reduce_at) {
          reduce_learned();
          reduce_at += 500;
        }
      }
    } else {
      int v = pick_branch_var();
      if (v < 0) return SatResult::satisfiable;
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(lit(v, phase_[v] == 0), -1);
    }
  }
}

void CnfSolver::hint_activity(int var, double a) {
  activity_[var] = a;
  if (heap_pos_[var] >= 0) {
    heap_up(heap_pos_[var]);
    heap_down(heap_pos_[var]);
  }
}

bool CnfSolver::model_value(int var) const { return assign_[var] == 1; }

}  // namespace cantor::detail
