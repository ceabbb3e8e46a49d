#include "nullq/eval.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "nullq/errors.hpp"

namespace nullq {

int Domain::intern(const Value& v) {
  auto [it, fresh] = ids_.emplace(v, static_cast<int>(values_.size()));
  if (fresh) values_.push_back(v);
  return it->second;
}

int Domain::find(const Value& v) const {
  auto it = ids_.find(v);
  return it == ids_.end() ? -1 : it->second;
}

void check_schema(const Schema& used, const Database& d) {
  for (const auto& [rel, arity] : used) {
    auto ar = d.arity(rel);
    if (ar && *ar != arity)
      throw SchemaError("relation " + rel + " has arity " + std::to_string(*ar) +
                        " but is used with arity " + std::to_string(arity));
  }
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

struct Arg {
  int slot = -1;   // variable slot, or
  int value = -1;  // constant id
};

struct CNode {
  NodeKind kind = NodeKind::True;
  int rel = -1;
  std::vector<Arg> args;
  std::vector<int> slots;  // Exists
  std::vector<const CNode*> children;
  std::vector<int> free;  // sorted
};

}  // namespace

class EvalContext {
 public:
  struct Index {
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  };
  struct Rel {
    std::string name;
    std::size_t arity = 0;
    std::vector<std::vector<int>> tuples;
    std::shared_ptr<VirtualRelation> virt;
    std::unordered_map<std::uint64_t, Index> indices;  // by bound-position mask

    const std::vector<std::uint32_t>* bucket(std::uint64_t mask, std::uint64_t key) {
      auto it = indices.find(mask);
      if (it == indices.end()) {
        Index idx;
        for (std::uint32_t t = 0; t < tuples.size(); ++t) {
          std::uint64_t h = 0;
          for (std::size_t i = 0; i < arity; ++i)
            if (mask >> i & 1U) h = mix(h, static_cast<std::uint64_t>(tuples[t][i]));
          idx.buckets[h].push_back(t);
        }
        it = indices.emplace(mask, std::move(idx)).first;
      }
      auto b = it->second.buckets.find(key);
      return b == it->second.buckets.end() ? nullptr : &b->second;
    }
  };

  Domain domain;
  std::vector<Rel> rels;
  std::map<std::string, int> rel_ids;
  std::vector<int> adom;
  EvalOptions options;

  int relation_id(const std::string& name, std::size_t arity) {
    auto it = rel_ids.find(name);
    if (it != rel_ids.end()) {
      if (rels[it->second].arity != arity)
        throw SchemaError("relation " + name + " has arity " +
                          std::to_string(rels[it->second].arity) + " but is used with arity " +
                          std::to_string(arity));
      return it->second;
    }
    if (arity > 63) throw UnsupportedError("relation " + name + " has more than 63 columns");
    Rel r;
    r.name = name;
    r.arity = arity;
    rels.push_back(std::move(r));
    rel_ids[name] = static_cast<int>(rels.size()) - 1;
    return static_cast<int>(rels.size()) - 1;
  }
};

namespace {

class Compiler {
 public:
  Compiler(EvalContext& ctx, std::vector<std::unique_ptr<CNode>>& pool) : ctx_(ctx), pool_(pool) {}

  int slot_count() const { return next_slot_; }

  const CNode* compile_top(const Formula& f, const std::vector<std::string>& vars) {
    for (const auto& v : vars) scope_[v] = next_slot_++;
    return compile(f, false);
  }

 private:
  CNode* make(NodeKind k) {
    pool_.push_back(std::make_unique<CNode>());
    pool_.back()->kind = k;
    return pool_.back().get();
  }

  static void merge_free(CNode* n, const std::vector<int>& extra) {
    std::vector<int> out;
    std::set_union(n->free.begin(), n->free.end(), extra.begin(), extra.end(),
                   std::back_inserter(out));
    n->free = std::move(out);
  }

  Arg arg(const Term& t, CNode* n) {
    Arg a;
    if (t.is_const()) {
      a.value = ctx_.domain.intern(t.value);
    } else {
      auto it = scope_.find(t.name);
      if (it == scope_.end()) throw Error("unbound variable " + t.name);
      a.slot = it->second;
      merge_free(n, {a.slot});
    }
    return a;
  }

  CNode* wrap_not(CNode* c) {
    CNode* n = make(NodeKind::Not);
    n->children = {c};
    n->free = c->free;
    return n;
  }

  CNode* quantifier(const Formula& f, bool body_negated) {
    auto saved = scope_;
    CNode* n = make(NodeKind::Exists);
    for (const auto& v : f.bound_vars()) {
      int s = next_slot_++;
      scope_[v] = s;
      n->slots.push_back(s);
    }
    const CNode* body = compile(f.child(), body_negated);
    scope_ = std::move(saved);
    n->children = {body};
    for (int s : body->free)
      if (std::find(n->slots.begin(), n->slots.end(), s) == n->slots.end()) n->free.push_back(s);
    return n;
  }

  CNode* compile(const Formula& f, bool neg) {
    switch (f.kind()) {
      case NodeKind::True: return make(neg ? NodeKind::False : NodeKind::True);
      case NodeKind::False: return make(neg ? NodeKind::True : NodeKind::False);
      case NodeKind::Atom:
      case NodeKind::Eq:
      case NodeKind::IsNull: {
        CNode* n = make(f.kind());
        if (f.kind() == NodeKind::Atom) n->rel = ctx_.relation_id(f.relation(), f.terms().size());
        for (const auto& t : f.terms()) n->args.push_back(arg(t, n));
        return neg ? wrap_not(n) : n;
      }
      case NodeKind::Not: return compile(f.child(), !neg);
      case NodeKind::And:
      case NodeKind::Or: {
        bool conj = (f.kind() == NodeKind::And) != neg;
        CNode* n = make(conj ? NodeKind::And : NodeKind::Or);
        for (const auto& c : f.children()) {
          CNode* cc = compile(c, neg);
          n->children.push_back(cc);
          merge_free(n, cc->free);
        }
        return n;
      }
      case NodeKind::Exists: {
        CNode* n = quantifier(f, false);
        return neg ? wrap_not(n) : n;
      }
      case NodeKind::Forall: {
        CNode* n = quantifier(f, true);
        return neg ? n : wrap_not(n);
      }
    }
    return make(NodeKind::True);
  }

  EvalContext& ctx_;
  std::vector<std::unique_ptr<CNode>>& pool_;
  std::map<std::string, int> scope_;
  int next_slot_ = 0;
};

using Callback = std::function<bool()>;

struct KeyHash {
  std::size_t operator()(const std::vector<int>& k) const noexcept {
    std::uint64_t h = k.size();
    for (int v : k) h = mix(h, static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

class Solver {
 public:
  Solver(EvalContext& ctx, std::vector<int>& env, const std::vector<int>& range, bool guided)
      : ctx_(ctx), env_(env), range_(range), guided_(guided && !range.empty()) {}

  bool holds(const CNode* n) {
    switch (n->kind) {
      case NodeKind::True: return true;
      case NodeKind::False: return false;
      case NodeKind::Atom: return atom_holds(n);
      case NodeKind::Eq: return val(n->args[0]) == val(n->args[1]);
      case NodeKind::IsNull: return ctx_.domain.is_null(val(n->args[0]));
      case NodeKind::Not: return !holds(n->children[0]);
      case NodeKind::And:
        for (const auto* c : n->children)
          if (!holds(c)) return false;
        return true;
      case NodeKind::Or:
        for (const auto* c : n->children)
          if (holds(c)) return true;
        return false;
      case NodeKind::Exists: {
        if (!guided_) return enumerate(n->slots, 0, [&] { return holds(n->children[0]); });
        std::vector<int> key;
        key.reserve(n->free.size());
        for (int s : n->free) key.push_back(env_[s]);
        auto& table = memo_[n];
        if (auto it = table.find(key); it != table.end()) return it->second;
        bool r = solve({n->children[0]}, {}, [] { return true; });
        memo_[n].emplace(std::move(key), r);
        return r;
      }
      default: return false;
    }
  }

  /// Find bindings of every slot the goals mention (plus `needed`) that
  /// make all goals true; stop when `cb` returns true.
  bool solve(std::vector<const CNode*> goals, const std::vector<int>& needed, const Callback& cb) {
    if (!guided_) {
      std::vector<int> slots = needed;
      for (const auto* g : goals) slots.insert(slots.end(), g->free.begin(), g->free.end());
      std::sort(slots.begin(), slots.end());
      slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
      std::vector<int> unbound;
      for (int s : slots)
        if (env_[s] < 0) unbound.push_back(s);
      return enumerate(unbound, 0, [&] {
        for (const auto* g : goals)
          if (!holds(g)) return false;
        return cb();
      });
    }
    return step(std::move(goals), needed, cb);
  }

 private:
  int val(const Arg& a) const { return a.slot >= 0 ? env_[a.slot] : a.value; }
  bool bound(const Arg& a) const { return a.slot < 0 || env_[a.slot] >= 0; }

  bool all_bound(const CNode* n) const {
    for (int s : n->free)
      if (env_[s] < 0) return false;
    return true;
  }

  bool atom_holds(const CNode* n) {
    auto& rel = ctx_.rels[n->rel];
    std::vector<int>& buf = scratch_;
    buf.resize(n->args.size());
    for (std::size_t i = 0; i < n->args.size(); ++i) buf[i] = val(n->args[i]);
    if (rel.virt) return rel.virt->contains(std::span<const int>(buf.data(), buf.size()));
    std::uint64_t mask = n->args.size() >= 64 ? ~0ULL : (1ULL << n->args.size()) - 1;
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < n->args.size(); ++i) key = mix(key, static_cast<std::uint64_t>(buf[i]));
    const auto* b = rel.bucket(mask, key);
    if (!b) return false;
    for (auto t : *b)
      if (std::equal(buf.begin(), buf.end(), rel.tuples[t].begin())) return true;
    return false;
  }

  bool enumerate(const std::vector<int>& slots, std::size_t i, const Callback& cb) {
    if (i == slots.size()) return cb();
    int s = slots[i];
    if (env_[s] >= 0) return enumerate(slots, i + 1, cb);
    for (int v : range_) {
      env_[s] = v;
      if (enumerate(slots, i + 1, cb)) {
        env_[s] = -1;
        return true;
      }
    }
    env_[s] = -1;
    return false;
  }

  struct Undo {
    std::vector<int>& env;
    std::vector<int> slots;
    ~Undo() {
      for (int s : slots) env[s] = -1;
    }
  };

  bool step(std::vector<const CNode*> goals, const std::vector<int>& needed, const Callback& cb) {
    // Simplify: expand conjunctions and existentials, test bound goals.
    for (std::size_t i = 0; i < goals.size();) {
      const CNode* g = goals[i];
      if (g->kind == NodeKind::True || all_bound(g)) {
        if (!holds(g)) return false;
        goals[i] = goals.back();
        goals.pop_back();
        continue;
      }
      if (g->kind == NodeKind::And || g->kind == NodeKind::Exists) {
        goals[i] = goals.back();
        goals.pop_back();
        goals.insert(goals.end(), g->children.begin(), g->children.end());
        continue;
      }
      ++i;
    }
    if (goals.empty()) {
      std::vector<int> rest;
      for (int s : needed)
        if (env_[s] < 0) rest.push_back(s);
      return enumerate(rest, 0, cb);
    }

    // Pick the cheapest generator.
    std::size_t best = goals.size();
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < goals.size(); ++i) {
      double c = cost(goals[i]);
      if (c < best_cost) {
        best_cost = c;
        best = i;
      }
    }
    if (best_cost == 0) return false;

    int enum_slot = -1;
    double enum_cost = static_cast<double>(range_.size());
    if (best == goals.size() || best_cost > enum_cost) {
      for (const auto* g : goals) {
        for (int s : g->free)
          if (env_[s] < 0) {
            enum_slot = s;
            break;
          }
        if (enum_slot >= 0) break;
      }
    }
    if (enum_slot >= 0) {
      for (int v : range_) {
        env_[enum_slot] = v;
        if (step(goals, needed, cb)) {
          env_[enum_slot] = -1;
          return true;
        }
      }
      env_[enum_slot] = -1;
      return false;
    }

    const CNode* g = goals[best];
    goals[best] = goals.back();
    goals.pop_back();
    switch (g->kind) {
      case NodeKind::Eq: {
        const Arg& a = g->args[0];
        const Arg& b = g->args[1];
        int target = bound(a) ? b.slot : a.slot;
        int v = bound(a) ? val(a) : val(b);
        env_[target] = v;
        bool r = step(std::move(goals), needed, cb);
        env_[target] = -1;
        return r;
      }
      case NodeKind::Or: {
        for (const auto* c : g->children) {
          auto next = goals;
          next.push_back(c);
          if (step(std::move(next), needed, cb)) return true;
        }
        return false;
      }
      case NodeKind::Atom: return generate_atom(g, goals, needed, cb);
      default: return false;
    }
  }

  double cost(const CNode* g) {
    switch (g->kind) {
      case NodeKind::Eq:
        if (bound(g->args[0]) != bound(g->args[1])) return 1;
        return std::numeric_limits<double>::infinity();
      case NodeKind::Or: {
        double sum = 0;
        for (const auto* c : g->children) sum += branch_cost(c);
        return sum;
      }
      case NodeKind::Atom: {
        auto& rel = ctx_.rels[g->rel];
        if (rel.virt) {
          for (std::size_t i = 0; i < rel.virt->bound_prefix(); ++i)
            if (!bound(g->args[i])) return std::numeric_limits<double>::infinity();
          return 2;
        }
        std::uint64_t mask = 0;
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < g->args.size(); ++i)
          if (bound(g->args[i])) {
            mask |= 1ULL << i;
            key = mix(key, static_cast<std::uint64_t>(val(g->args[i])));
          }
        if (mask == 0) return static_cast<double>(rel.tuples.size());
        const auto* b = rel.bucket(mask, key);
        return b ? static_cast<double>(b->size()) : 0;
      }
      default: return std::numeric_limits<double>::infinity();
    }
  }

  // Cost of one disjunct as a branch: infinite when it cannot bind anything.
  double branch_cost(const CNode* c) {
    if (all_bound(c)) return 1;
    switch (c->kind) {
      case NodeKind::True: return 1;
      case NodeKind::False: return 0;
      case NodeKind::And: {
        double best = std::numeric_limits<double>::infinity();
        for (const auto* cc : c->children) best = std::min(best, branch_cost(cc));
        return std::max(best, 1.0);
      }
      case NodeKind::Exists: return std::max(branch_cost(c->children[0]), 1.0);
      case NodeKind::Or:
      case NodeKind::Eq:
      case NodeKind::Atom: return std::max(cost(c), 1.0);
      default: return std::numeric_limits<double>::infinity();
    }
  }

  // Bind the atom's unbound slots from `t`; false on a repeated-slot clash.
  bool bind_tuple(const CNode* g, std::span<const int> t, Undo& undo) {
    for (std::size_t i = 0; i < g->args.size(); ++i) {
      const Arg& a = g->args[i];
      int cur = val(a);
      if (cur >= 0) {
        if (cur != t[i]) return false;
      } else {
        env_[a.slot] = t[i];
        undo.slots.push_back(a.slot);
      }
    }
    return true;
  }

  bool generate_atom(const CNode* g, const std::vector<const CNode*>& goals,
                     const std::vector<int>& needed, const Callback& cb) {
    auto& rel = ctx_.rels[g->rel];
    if (rel.virt) {
      std::vector<int> prefix;
      for (std::size_t i = 0; i < rel.virt->bound_prefix(); ++i) prefix.push_back(val(g->args[i]));
      return rel.virt->match(prefix, [&](std::span<const int> t) {
        Undo undo{env_, {}};
        if (!bind_tuple(g, t, undo)) return false;
        return step(goals, needed, cb);
      });
    }
    std::uint64_t mask = 0;
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < g->args.size(); ++i)
      if (bound(g->args[i])) {
        mask |= 1ULL << i;
        key = mix(key, static_cast<std::uint64_t>(val(g->args[i])));
      }
    auto attempt = [&](std::uint32_t t) {
      Undo undo{env_, {}};
      if (!bind_tuple(g, rel.tuples[t], undo)) return false;
      return step(goals, needed, cb);
    };
    if (mask == 0) {
      for (std::uint32_t t = 0; t < rel.tuples.size(); ++t)
        if (attempt(t)) return true;
      return false;
    }
    const auto* ids = rel.bucket(mask, key);
    if (!ids) return false;
    for (auto t : *ids)
      if (attempt(t)) return true;
    return false;
  }

  EvalContext& ctx_;
  std::vector<int>& env_;
  const std::vector<int>& range_;
  bool guided_;
  std::vector<int> scratch_;
  std::unordered_map<const CNode*, std::unordered_map<std::vector<int>, bool, KeyHash>> memo_;
};

}  // namespace

Evaluator::Evaluator(const Database& d, std::set<Value> extra_constants, EvalOptions options)
    : ctx_(std::make_unique<EvalContext>()), extra_(std::move(extra_constants)) {
  ctx_->options = options;
  for (const auto& v : d.active_domain()) ctx_->adom.push_back(ctx_->domain.intern(v));
  for (const auto& [name, arity] : d.schema()) {
    int id = ctx_->relation_id(name, arity);
    auto& rel = ctx_->rels[id];
    for (const auto& t : d.relation(name)) {
      std::vector<int> row;
      row.reserve(t.size());
      for (const auto& v : t) row.push_back(ctx_->domain.intern(v));
      rel.tuples.push_back(std::move(row));
    }
  }
}

Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;
Evaluator& Evaluator::operator=(Evaluator&&) noexcept = default;

Domain& Evaluator::domain() { return ctx_->domain; }

void Evaluator::add_virtual(const std::string& name, std::shared_ptr<VirtualRelation> rel) {
  auto it = ctx_->rel_ids.find(name);
  if (it != ctx_->rel_ids.end() && !ctx_->rels[it->second].tuples.empty())
    throw ValidationError("virtual relation " + name + " clashes with a stored relation");
  int id = ctx_->relation_id(name, rel->arity());
  ctx_->rels[id].virt = std::move(rel);
  ctx_->rels[id].indices.clear();
}

namespace {

std::vector<int> make_range(EvalContext& ctx, const Formula& f, const std::set<Value>& extra) {
  std::vector<int> range = ctx.adom;
  for (const auto& c : f.constants()) range.push_back(ctx.domain.intern(c));
  for (const auto& c : extra) range.push_back(ctx.domain.intern(c));
  std::sort(range.begin(), range.end());
  range.erase(std::unique(range.begin(), range.end()), range.end());
  return range;
}

}  // namespace

TupleSet Evaluator::answers(const Formula& f, const std::vector<std::string>& vars) {
  for (const auto& v : f.free_variables())
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      throw Error("free variable " + v + " is not an answer variable");
  std::vector<std::unique_ptr<CNode>> pool;
  Compiler comp(*ctx_, pool);
  const CNode* root = comp.compile_top(f, vars);
  std::vector<int> range = make_range(*ctx_, f, extra_);
  std::vector<int> env(static_cast<std::size_t>(comp.slot_count()), -1);
  Solver solver(*ctx_, env, range, ctx_->options.guided);
  std::vector<int> needed;
  for (std::size_t i = 0; i < vars.size(); ++i) needed.push_back(static_cast<int>(i));
  TupleSet out;
  solver.solve({root}, needed, [&] {
    Tuple t;
    t.reserve(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) t.push_back(ctx_->domain.value(env[i]));
    out.insert(std::move(t));
    return false;
  });
  return out;
}

bool Evaluator::satisfies(const Formula& f, const std::map<std::string, Value>& binding) {
  std::vector<std::string> vars;
  for (const auto& [k, _] : binding) vars.push_back(k);
  for (const auto& v : f.free_variables())
    if (!binding.contains(v)) throw Error("free variable " + v + " is not bound");
  std::vector<std::unique_ptr<CNode>> pool;
  Compiler comp(*ctx_, pool);
  const CNode* root = comp.compile_top(f, vars);
  std::vector<int> range = make_range(*ctx_, f, extra_);
  std::vector<int> env(static_cast<std::size_t>(comp.slot_count()), -1);
  std::size_t i = 0;
  for (const auto& [_, v] : binding) env[i++] = ctx_->domain.intern(v);
  Solver solver(*ctx_, env, range, ctx_->options.guided);
  return solver.holds(root);
}

TupleSet eval_fo(const Formula& q, const Database& d, EvalOptions options) {
  check_schema(q.relations(), d);
  Evaluator ev(d, {}, options);
  return ev.answers(q, q.free_variables());
}

TupleSet eval_fo(const Query& q, const Database& d, EvalOptions options) {
  check_schema(q.formula.relations(), d);
  Evaluator ev(d, {}, options);
  return ev.answers(q.formula, q.answer_vars);
}

}  // namespace nullq
