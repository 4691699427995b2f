#pragma once

#include <cstdint>
#include <vector>

namespace cantor::detail {

// Small deterministic CDCL satisfiability solver (watched literals, first-UIP
// clause learning, activity-ordered decisions, Luby restarts). Variables are
// 0-based; a literal is made with lit(v, false) for the positive phase.

using Lit = std::int32_t;

constexpr Lit lit(int var, bool negated) {
  return static_cast<Lit>(2 * var + (negated ? 1 : 0));
}

enum class SatResult { satisfiable, unsatisfiable, budget_exhausted };

class CnfSolver {
 public:
  explicit CnfSolver(int n_vars);

  // returns false when the clause is already falsified at the root level
  bool add_clause(std::vector<Lit> lits);

  // optional pre-solve hints: preferred first polarity and initial
  // branching priority
  void hint_phase(int var, bool value) {
    phase_[var] = value ? 1 : 0;
  }
  void hint_activity(int var, double a);

  SatResult solve(long long max_conflicts);

  bool model_value(int var) const;  // valid after satisfiable

 private:
  struct Watch {
    int clause;
    Lit blocker;
  };

  int value(Lit p) const {  // 1 true, 0 false, -1 unassigned
    int a = assign_[p >> 1];
    return a < 0 ? -1 : a ^ (p & 1);
  }
  bool enqueue(Lit p, int reason);
  int propagate();  // returns conflicting clause index or -1
  void analyze(int confl, std::vector<Lit>& learnt, int& bt_level, int& lbd);
  void cancel_until(int level);
  void reduce_learned();
  int pick_branch_var();
  void bump(int var);
  void decay() { var_inc_ /= 0.95; }

  void heap_insert(int var);
  int heap_pop();
  void heap_up(int i);
  void heap_down(int i);
  bool heap_less(int a, int b) const {
    return activity_[a] > activity_[b] ||
           (activity_[a] == activity_[b] && a < b);
  }

  int n_;
  std::vector<std::vector<Lit>> clauses_;
  std::vector<int> lbd_;                     // 0 for problem clauses
  std::vector<std::vector<Watch>> watches_;  // indexed by literal
  std::vector<signed char> assign_;          // -1, 0, 1 per variable
  std::vector<signed char> phase_;
  std::vector<int> reason_, level_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<double> activity_;
  double var_inc_ = 1.0;
  std::vector<int> heap_, heap_pos_;
  std::vector<char> seen_;
  std::vector<Lit> scratch_;
  std::vector<long long> level_stamp_;
  long long stamp_ = 0;
  int core_end_ = 0;
  bool unsat_ = false;
};

}  // namespace cantor::detail
