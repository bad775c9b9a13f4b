#include "relcompose/matcher.hpp"

#include <algorithm>
#include <functional>

namespace relcompose {

bool CallHistory::contains(std::span<const ObjectId> binding) const {
  auto it = buckets_.find(match_hash(binding));
  if (it == buckets_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](const Binding& b) { return std::equal(b.begin(), b.end(), binding.begin(), binding.end()); });
}

bool CallHistory::record(std::span<const ObjectId> binding) {
  if (contains(binding)) return false;
  buckets_[match_hash(binding)].emplace_back(binding.begin(), binding.end());
  ++size_;
  return true;
}

bool relations_match(const Knowledge& knowledge, std::span<const LocalAtom> atoms, std::size_t level,
                     ObjectId candidate, std::span<const ObjectId> partial) {
  auto at = [&](std::uint32_t pos) { return pos == level ? candidate : partial[pos]; };
  for (const auto& a : atoms) {
    if (std::max(a.source, a.target) != level) continue;
    if (!knowledge.has_relation(a.relation, at(a.source), at(a.target))) return false;
  }
  return true;
}

namespace {

/// Shared backtracking core. `candidates[i]` lists the objects allowed at
/// position i in trial order; `accept` is the leaf test.
class Backtracker {
 public:
  Backtracker(const Knowledge& knowledge, std::span<const LocalAtom> atoms, const MatchOptions& options,
              std::vector<std::span<const ObjectId>> candidates, std::function<bool(const Binding&)> accept)
      : knowledge_(knowledge),
        options_(options),
        candidates_(std::move(candidates)),
        accept_(std::move(accept)),
        by_level_(candidates_.size()) {
    for (const auto& a : atoms) {
      const auto level = std::max(a.source, a.target);
      if (options_.prune_levels) {
        by_level_[level].push_back(a);
      } else {
        leaf_atoms_.push_back(a);
      }
    }
  }

  std::optional<Binding> run() {
    binding_.clear();
    if (search(0)) return binding_;
    return std::nullopt;
  }

 private:
  bool search(std::size_t level) {
    if (level == candidates_.size()) {
      for (const auto& a : leaf_atoms_) {
        if (!knowledge_.has_relation(a.relation, binding_[a.source], binding_[a.target])) return false;
      }
      return accept_(binding_);
    }
    for (ObjectId c : candidates_[level]) {
      if (options_.injective && std::find(binding_.begin(), binding_.end(), c) != binding_.end()) continue;
      if (!relations_match(knowledge_, by_level_[level], level, c, binding_)) continue;
      binding_.push_back(c);
      if (search(level + 1)) return true;
      binding_.pop_back();
    }
    return false;
  }

  const Knowledge& knowledge_;
  const MatchOptions& options_;
  std::vector<std::span<const ObjectId>> candidates_;
  std::function<bool(const Binding&)> accept_;
  std::vector<std::vector<LocalAtom>> by_level_;
  std::vector<LocalAtom> leaf_atoms_;
  Binding binding_;
};

}  // namespace

std::optional<Binding> find_match(const MatchSpec& spec, const Knowledge& knowledge, const CallHistory* history,
                                  const MatchOptions& options, std::span<const std::optional<ObjectId>> fixed) {
  const auto n = spec.types.size();
  std::vector<std::vector<ObjectId>> pinned(n);
  std::vector<std::span<const ObjectId>> candidates(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < fixed.size() && fixed[i]) {
      pinned[i] = {*fixed[i]};
      candidates[i] = pinned[i];
    } else if (spec.types[i]) {
      candidates[i] = knowledge.objects_subsumed_by(*spec.types[i]);
    } else {
      candidates[i] = knowledge.live_objects();
    }
  }
  Backtracker bt(knowledge, spec.atoms, options, std::move(candidates),
                 [&](const Binding& b) { return !history || !history->contains(b); });
  return bt.run();
}

std::optional<Binding> find_rule_match(const CompiledRule& rule, const Knowledge& knowledge,
                                       const CallHistory& history, const MatchOptions& options) {
  const auto n = rule.variables.size();
  // Restrict each variable to objects sitting at the right end of every
  // premise relation it takes part in.
  std::vector<std::optional<std::vector<bool>>> allowed(n);
  const auto object_slots = knowledge.id_bound();
  for (const auto& a : rule.premise) {
    std::vector<bool> src(object_slots, false), tgt(object_slots, false);
    for (TripleIndex i : knowledge.relation_triples(a.relation)) {
      const auto& t = knowledge.triple(i);
      src[t.source.value] = true;
      tgt[t.target.value] = true;
    }
    auto narrow = [&](std::uint32_t var, const std::vector<bool>& mask) {
      if (!allowed[var]) {
        allowed[var] = mask;
      } else {
        for (std::size_t k = 0; k < mask.size(); ++k) (*allowed[var])[k] = (*allowed[var])[k] && mask[k];
      }
    };
    narrow(a.source, src);
    narrow(a.target, tgt);
  }

  std::vector<std::vector<ObjectId>> lists(n);
  std::vector<std::span<const ObjectId>> candidates(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!allowed[v]) {
      candidates[v] = knowledge.live_objects();
      continue;
    }
    for (ObjectId o : knowledge.live_objects()) {
      if (o.value < allowed[v]->size() && (*allowed[v])[o.value]) lists[v].push_back(o);
    }
    if (lists[v].empty()) return std::nullopt;
    candidates[v] = lists[v];
  }

  Backtracker bt(knowledge, rule.premise, options, std::move(candidates), [&](const Binding& b) {
    if (history.contains(b)) return false;
    return std::any_of(rule.conclusion.begin(), rule.conclusion.end(), [&](const LocalAtom& c) {
      return !knowledge.has_relation(c.relation, b[c.source], b[c.target]);
    });
  });
  return bt.run();
}

}  // namespace relcompose
