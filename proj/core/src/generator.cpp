#include "relcompose/generator.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "relcompose/engine.hpp"
#include "relcompose/formats.hpp"
#include "relcompose/knowledge.hpp"
#include "relcompose/matcher.hpp"
#include "relcompose/random.hpp"

namespace relcompose {

std::vector<std::string> check_config(const GenConfig& c) {
  std::vector<std::string> why;
  auto need = [&](bool ok, std::string msg) {
    if (!ok) why.push_back(std::move(msg));
  };
  need(c.stages >= 2, "stages must be at least 2");
  need(c.objects_per_stage >= 1, "objectsPerStage must be at least 1");
  need(c.services_per_layer >= 1, "servicesPerLayer must be at least 1");
  need(c.params_min >= 1, "paramsPerServiceMin must be at least 1");
  need(c.params_min <= c.params_max, "paramsPerServiceMin exceeds paramsPerServiceMax");
  need(c.objects_per_stage >= c.params_min,
       "objectsPerStage (" + std::to_string(c.objects_per_stage) + ") is smaller than paramsPerServiceMin (" +
           std::to_string(c.params_min) + "): first-layer services cannot be bound");
  need(c.concept_count >= 1, "conceptCount must be at least 1");
  need(c.hierarchy_depth >= 1, "hierarchyDepth must be at least 1");
  need(c.query_outputs >= 1, "queryOutputs must be at least 1");
  need(c.noise_services == 0 || c.noise_concepts >= 1, "noise services need at least one noise concept");
  if (!c.hierarchy_only) {
    need(c.relations_per_stage == 0 || c.relation_type_count >= 1, "relations need at least one relation type");
    need(c.rule_count == 0 || c.relation_type_count >= 1, "rules need at least one relation type");
  }
  return why;
}

namespace {

struct GenConcept {
  std::string name;
  int parent = -1;  // index; -1 is the root
  std::uint32_t stage = 0;  // 0 for noise concepts
  std::uint32_t depth = 0;
};

struct ChainRule {
  std::size_t a, b, c;  // relation indices: a(X,Y), b(Y,Z) -> c(X,Z)
};

struct PendingFact {
  std::size_t relation;
  ObjectId source;
  ObjectId target;
};

class Builder {
 public:
  explicit Builder(const GenConfig& config) : c_(config), rng_(config.seed) {
    if (c_.hierarchy_only) {
      c_.relation_type_count = 0;
      c_.relations_per_stage = 0;
      c_.rule_count = 0;
    }
  }

  GeneratedInstance run() {
    make_ontology();
    onto_ = Ontology::from_draft(out_.ontology);
    kb_.emplace(onto_);
    for (const auto& r : onto_.rules()) {
      (void)r;
      rule_history_.emplace_back();
    }
    for (const auto& gc : concepts_) stage_of_[onto_.concept_id(gc.name).value] = gc.stage;

    name_services();
    make_seed();
    for (std::uint32_t layer = 1; layer < c_.stages; ++layer) make_layer(layer);
    make_query();
    make_noise();

    std::vector<ServiceDef> repo(slots_.size());
    for (auto& s : real_) repo[position(s.name)] = std::move(s);
    for (auto& s : noise_) repo[position(s.name)] = std::move(s);
    for (auto& s : detours_) repo[position(s.name)] = std::move(s);
    out_.repository = std::move(repo);
    return std::move(out_);
  }

 private:
  // --- ontology -----------------------------------------------------------

  void make_ontology() {
    const std::uint32_t n = c_.stages;
    for (std::uint32_t s = 1; s <= n; ++s) {
      const int first = static_cast<int>(concepts_.size());
      concepts_.push_back(GenConcept{{}, -1, s, 0});
      for (std::uint32_t k = 1; k < c_.concept_count; ++k) {
        std::vector<int> open;
        for (int i = first; i < static_cast<int>(concepts_.size()); ++i) {
          if (concepts_[static_cast<std::size_t>(i)].depth < c_.hierarchy_depth) open.push_back(i);
        }
        const int parent = open.empty() ? first : rng_.pick(open);
        concepts_.push_back(GenConcept{{}, parent, s, concepts_[static_cast<std::size_t>(parent)].depth + 1});
      }
    }
    for (std::uint32_t k = 0; k < c_.noise_concepts; ++k) {
      noise_concept_.push_back(concepts_.size());
      concepts_.push_back(GenConcept{{}, -1, 0, 0});
    }
    if (c_.rule_detours) {
      for (std::size_t k = 0; k < c_.rule_count; ++k) injected_at_.insert(injection_site(k));
      for (std::size_t k = 0; k < injected_at_.size(); ++k) {
        token_concept_.push_back(concepts_.size());
        concepts_.push_back(GenConcept{{}, -1, 0, 0});
      }
    }
    // Names carry no stage information.
    std::vector<std::size_t> label(concepts_.size());
    std::iota(label.begin(), label.end(), 0);
    rng_.shuffle(label);
    for (std::size_t i = 0; i < concepts_.size(); ++i) concepts_[i].name = "T" + std::to_string(label[i]);

    auto& d = out_.ontology;
    d.concepts.push_back(ConceptDecl{std::string(Ontology::kRootName), std::nullopt});
    for (const auto& gc : concepts_) {
      d.concepts.push_back(ConceptDecl{
          gc.name, gc.parent < 0 ? std::string(Ontology::kRootName) : concepts_[static_cast<std::size_t>(gc.parent)].name});
    }
    for (std::uint32_t r = 0; r < c_.relation_type_count; ++r) {
      d.relations.push_back(RelationTypeDecl{"rel" + std::to_string(r), rng_.chance(0.2), rng_.chance(0.2)});
    }
    const std::size_t m = c_.relation_type_count;
    for (std::uint32_t k = 0; k < c_.rule_count; ++k) {
      ChainRule cr{rng_.below(m), rng_.below(m), rng_.below(m)};
      if (m >= 3) {
        while (cr.b == cr.a) cr.b = rng_.below(m);
        while (cr.c == cr.a || cr.c == cr.b) cr.c = rng_.below(m);
      }
      chains_.push_back(cr);
      d.rules.push_back(InferenceRule{"rule" + std::to_string(k),
                                      {"X", "Y", "Z"},
                                      {{rel(cr.a), "X", "Y"}, {rel(cr.b), "Y", "Z"}},
                                      {{rel(cr.c), "X", "Z"}}});
    }
  }

  /// Layer and service ordinal within it that carries rule chain k.
  std::pair<std::uint32_t, std::uint32_t> injection_site(std::size_t k) const {
    const std::uint32_t layers = c_.stages - 1;
    return {static_cast<std::uint32_t>(1 + k % layers), static_cast<std::uint32_t>((k / layers) % c_.services_per_layer)};
  }

  std::string rel(std::size_t i) const { return out_.ontology.relations[i].name; }

  std::vector<std::size_t> stage_concepts(std::uint32_t stage) const {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < concepts_.size(); ++i) {
      if (concepts_[i].stage == stage) v.push_back(i);
    }
    return v;
  }

  /// The object's own type, sometimes its parent within the same stage.
  std::string param_type(ObjectId o) {
    const auto& name = onto_.concept_name(kb_->object(o).type);
    auto it = std::find_if(concepts_.begin(), concepts_.end(), [&](const GenConcept& g) { return g.name == name; });
    if (it->parent >= 0 && rng_.chance(0.25)) return concepts_[static_cast<std::size_t>(it->parent)].name;
    return name;
  }

  std::uint32_t stage(ObjectId o) const { return stage_of_.at(kb_->object(o).type.value); }

  // --- services -------------------------------------------------------------

  void name_services() {
    const std::size_t total =
        std::size_t{c_.services_per_layer} * (c_.stages - 1) + c_.noise_services + 2 * injected_at_.size();
    slots_.resize(total);
    std::iota(slots_.begin(), slots_.end(), 0);
    rng_.shuffle(slots_);
  }

  std::string service_name(std::size_t ordinal) const { return "svc" + std::to_string(slots_[ordinal]); }
  std::size_t position(const std::string& name) const { return std::stoul(name.substr(3)); }

  /// Runs a service in the witness knowledge and records the step.
  std::vector<ObjectId> call(const ServiceDef& s, const std::vector<ObjectId>& inputs, StepKind kind) {
    std::map<std::string, ObjectId> local;
    for (std::size_t i = 0; i < inputs.size(); ++i) local[s.inputs[i].name] = inputs[i];
    std::vector<ObjectId> fresh;
    for (const auto& p : s.outputs) {
      auto id = kb_->add_object(p.type, Provenance{s.name, p.name, kind == StepKind::query ? 0u : 1u}).first;
      local[p.name] = id;
      fresh.push_back(id);
    }
    std::vector<RelationAtom> effects;
    for (const auto& a : s.relations) {
      const bool is_effect = kind == StepKind::query ||
                             std::any_of(s.outputs.begin(), s.outputs.end(), [&](const ParamSpec& p) {
                               return p.name == a.source || p.name == a.target;
                             });
      if (!is_effect) continue;
      kb_->add_relation(a.relation, local.at(a.source), local.at(a.target));
      effects.push_back(a);
    }
    const auto merged = kb_->dedup_new_objects(fresh, DedupMode::identity);
    for (auto& [name, id] : local) {
      if (auto it = merged.find(id); it != merged.end()) id = it->second;
    }

    Invocation inv{kind, s.name, {}, {}, {}};
    for (const auto& p : s.inputs) inv.binding.push_back(NamedObject{p.name, kb_->object(local[p.name]).name});
    std::vector<ObjectId> produced;
    for (const auto& p : s.outputs) {
      inv.produced.push_back(NamedObject{p.name, kb_->object(local[p.name]).name});
      produced.push_back(local[p.name]);
    }
    for (const auto& a : effects) {
      inv.asserted.push_back(FactRef{a.relation, kb_->object(local[a.source]).name, kb_->object(local[a.target]).name});
    }
    out_.witness.push_back(std::move(inv));
    saturate();
    return produced;
  }

  void saturate() {
    const auto& rules = onto_.rules();
    for (bool progress = true; progress;) {
      progress = false;
      for (std::size_t r = 0; r < rules.size(); ++r) {
        while (auto b = find_rule_match(rules[r], *kb_, rule_history_[r])) {
          rule_history_[r].record(*b);
          Invocation inv{StepKind::rule, rules[r].name, {}, {}, {}};
          for (std::size_t i = 0; i < b->size(); ++i) {
            inv.binding.push_back(NamedObject{rules[r].variables[i], kb_->object((*b)[i]).name});
          }
          for (const auto& cc : rules[r].conclusion) {
            for (TripleIndex t : kb_->add_relation(cc.relation, (*b)[cc.source], (*b)[cc.target])) inferred_.insert(t);
            inv.asserted.push_back(FactRef{onto_.relation_name(cc.relation), kb_->object((*b)[cc.source]).name,
                                           kb_->object((*b)[cc.target]).name});
          }
          out_.witness.push_back(std::move(inv));
          progress = true;
        }
      }
    }
  }

  /// Whether a fact needs a rule application somewhere in its derivation.
  /// Such facts are never picked as preconditions or query facts, except for
  /// the chain facts, which have detours.
  bool needs_rules(TripleIndex t) const {
    if (inferred_.contains(t)) return true;
    const auto& f = kb_->triple(t);
    if (!f.derived) return false;
    for (TripleIndex s : f.support) {
      if (s != kNoTriple && needs_rules(s)) return true;
    }
    return false;
  }

  void make_seed() {
    auto& q = out_.query;
    q.name = "query";
    const auto pool = stage_concepts(1);
    for (std::uint32_t k = 0; k < c_.objects_per_stage; ++k) {
      q.inputs.push_back(ParamSpec{"in" + std::to_string(k), concepts_[rng_.pick(pool)].name});
    }
    if (q.inputs.size() >= 2) {
      for (std::uint32_t k = 0; k < c_.relations_per_stage; ++k) {
        const auto i = rng_.below(q.inputs.size());
        auto j = rng_.below(q.inputs.size() - 1);
        if (j >= i) ++j;
        RelationAtom a{rel(rng_.below(c_.relation_type_count)), q.inputs[i].name, q.inputs[j].name};
        if (std::find(q.relations.begin(), q.relations.end(), a) == q.relations.end()) q.relations.push_back(a);
      }
    }
    const auto produced = call(ServiceDef{"query", {}, q.inputs, q.relations}, {}, StepKind::query);
    for (std::size_t k = 0; k < produced.size(); ++k) {
      seed_objects_.push_back(produced[k]);
      seed_param_.try_emplace(produced[k].value, q.inputs[k].name);
    }
  }

  void make_layer(std::uint32_t layer) {
    const std::uint32_t spl = c_.services_per_layer;
    const bool last = layer + 1 == c_.stages;
    std::vector<std::vector<PendingFact>> consume(spl);
    for (std::size_t k = 0; k < pending_.size(); ++k) consume[k % spl].push_back(pending_[k]);
    pending_.clear();

    std::vector<std::vector<std::size_t>> inject(spl);
    for (std::size_t k = 0; k < chains_.size(); ++k) {
      const auto [at_layer, at] = injection_site(k);
      if (at_layer == layer) inject[at].push_back(k);
    }

    const auto out_pool = stage_concepts(layer + 1);
    for (std::uint32_t s = 0; s < spl; ++s) {
      std::vector<ObjectId> available, latest;
      for (ObjectId o : kb_->live_objects()) {
        if (stage(o) <= layer) available.push_back(o);
        if (stage(o) == layer) latest.push_back(o);
      }

      std::vector<ObjectId> chosen;
      auto take = [&](ObjectId o) {
        if (std::find(chosen.begin(), chosen.end(), o) == chosen.end()) chosen.push_back(o);
      };
      for (const auto& f : consume[s]) {
        take(f.source);
        take(f.target);
      }
      ObjectId anchor;
      if (!inject[s].empty() && last) {
        anchor = rng_.pick(seed_objects_);
        take(anchor);
      }
      if (std::none_of(chosen.begin(), chosen.end(), [&](ObjectId o) { return stage(o) == layer; })) {
        take(rng_.pick(latest));
      }
      const auto want = std::max<std::size_t>(static_cast<std::size_t>(rng_.between(c_.params_min, c_.params_max)),
                                              chosen.size());
      while (chosen.size() < std::min(want, available.size())) {
        std::vector<ObjectId> near;
        for (ObjectId o : chosen) {
          for (TripleIndex t : kb_->incident(o)) {
            const auto& f = kb_->triple(t);
            for (ObjectId p : {f.source, f.target}) {
              if (stage(p) <= layer && std::find(chosen.begin(), chosen.end(), p) == chosen.end()) near.push_back(p);
            }
          }
        }
        if (!near.empty() && rng_.chance(0.7)) {
          take(rng_.pick(near));
        } else {
          std::vector<ObjectId> rest;
          for (ObjectId o : available) {
            if (std::find(chosen.begin(), chosen.end(), o) == chosen.end()) rest.push_back(o);
          }
          if (rest.empty()) break;
          take(rng_.pick(rest));
        }
      }

      ServiceDef svc;
      svc.name = service_name(next_ordinal_++);
      std::unordered_map<std::uint32_t, std::string> pname;
      for (std::size_t i = 0; i < chosen.size(); ++i) {
        svc.inputs.push_back(ParamSpec{"p" + std::to_string(i), param_type(chosen[i])});
        pname[chosen[i].value] = svc.inputs.back().name;
      }

      // Preconditions: the consumed rule facts plus a few facts that hold.
      auto add_atom = [&](RelationAtom a) {
        if (std::find(svc.relations.begin(), svc.relations.end(), a) == svc.relations.end()) svc.relations.push_back(a);
      };
      for (const auto& f : consume[s]) add_atom({rel(f.relation), pname[f.source.value], pname[f.target.value]});
      std::vector<RelationAtom> holding;
      for (ObjectId o : chosen) {
        for (TripleIndex t : kb_->incident(o)) {
          const auto& f = kb_->triple(t);
          if (needs_rules(t)) continue;
          if (pname.contains(f.source.value) && pname.contains(f.target.value)) {
            holding.push_back({onto_.relation_name(f.relation), pname[f.source.value], pname[f.target.value]});
          }
        }
      }
      std::sort(holding.begin(), holding.end(), [](const RelationAtom& a, const RelationAtom& b) {
        return std::tie(a.relation, a.source, a.target) < std::tie(b.relation, b.source, b.target);
      });
      holding.erase(std::unique(holding.begin(), holding.end()), holding.end());
      rng_.shuffle(holding);
      for (std::size_t k = 0; k < holding.size() && k < 2; ++k) {
        if (rng_.chance(0.6)) add_atom(holding[k]);
      }

      std::size_t n_out = c_.objects_per_stage / spl + (s < c_.objects_per_stage % spl ? 1 : 0);
      n_out = std::max<std::size_t>(n_out, inject[s].empty() ? 1 : 2);
      for (std::size_t k = 0; k < n_out; ++k) {
        svc.outputs.push_back(ParamSpec{"o" + std::to_string(k), concepts_[rng_.pick(out_pool)].name});
      }

      const std::size_t n_eff = c_.relations_per_stage / spl + (s < c_.relations_per_stage % spl ? 1 : 0);
      for (std::size_t k = 0; k < n_eff; ++k) {
        const auto& o = rng_.pick(svc.outputs).name;
        std::vector<std::string> others;
        for (const auto& p : svc.inputs) others.push_back(p.name);
        for (const auto& p : svc.outputs) {
          if (p.name != o) others.push_back(p.name);
        }
        const auto& other = rng_.pick(others);
        const auto r = rel(rng_.below(c_.relation_type_count));
        add_atom(rng_.chance(0.5) ? RelationAtom{r, o, other} : RelationAtom{r, other, o});
      }

      struct Injected {
        std::size_t chain;
        std::string x, z;
      };
      std::vector<Injected> injected;
      for (std::size_t k : inject[s]) {
        const auto& ch = chains_[k];
        const auto x = last ? pname[anchor.value] : rng_.pick(svc.inputs).name;
        const auto yi = rng_.below(n_out);
        auto zi = rng_.below(n_out - 1);
        if (zi >= yi) ++zi;
        const auto& y = svc.outputs[yi].name;
        const auto& z = svc.outputs[zi].name;
        add_atom({rel(ch.a), x, y});
        add_atom({rel(ch.b), y, z});
        injected.push_back({k, x, z});
      }

      if (!injected.empty() && c_.rule_detours) {
        std::vector<RelationAtom> shortcut;
        for (const auto& inj : injected) shortcut.push_back({rel(chains_[inj.chain].c), inj.x, inj.z});
        make_detour(svc, shortcut);
      }

      const auto produced = call(svc, chosen, StepKind::service);
      auto object_of = [&](const std::string& p) {
        for (std::size_t i = 0; i < svc.inputs.size(); ++i) {
          if (svc.inputs[i].name == p) return chosen[i];
        }
        for (std::size_t i = 0; i < svc.outputs.size(); ++i) {
          if (svc.outputs[i].name == p) return produced[i];
        }
        throw Error("generator: unknown parameter " + p);
      };
      for (const auto& inj : injected) {
        PendingFact f{chains_[inj.chain].c, object_of(inj.x), object_of(inj.z)};
        (last ? required_ : pending_).push_back(f);
      }
      real_.push_back(std::move(svc));
    }
  }

  /// A rule-free way to the facts a rule chain derives, one call longer: a
  /// permit service makes a token, and a copy of `svc` that also takes the
  /// token asserts the derived facts directly. The witness never uses it.
  void make_detour(const ServiceDef& svc, const std::vector<RelationAtom>& shortcut) {
    const auto& token = concepts_[token_concept_.at(detours_.size() / 2)].name;
    ServiceDef permit;
    permit.name = service_name(next_ordinal_++);
    permit.inputs.push_back(ParamSpec{"p0", svc.inputs.front().type});
    permit.outputs.push_back(ParamSpec{"o0", token});

    ServiceDef copy = svc;
    copy.name = service_name(next_ordinal_++);
    copy.inputs.push_back(ParamSpec{"p" + std::to_string(svc.inputs.size()), token});
    for (const auto& a : shortcut) {
      if (std::find(copy.relations.begin(), copy.relations.end(), a) == copy.relations.end()) copy.relations.push_back(a);
    }
    detours_.push_back(std::move(permit));
    detours_.push_back(std::move(copy));
  }

  void make_query() {
    auto& q = out_.query;
    std::vector<ObjectId> finals;
    for (ObjectId o : kb_->live_objects()) {
      if (stage(o) == c_.stages) finals.push_back(o);
    }
    std::vector<ObjectId> outs;
    for (const auto& f : required_) {
      if (std::find(outs.begin(), outs.end(), f.target) == outs.end()) outs.push_back(f.target);
    }
    rng_.shuffle(finals);
    for (ObjectId o : finals) {
      if (outs.size() >= c_.query_outputs) break;
      if (std::find(outs.begin(), outs.end(), o) == outs.end()) outs.push_back(o);
    }
    std::unordered_map<std::uint32_t, std::string> pname(seed_param_.begin(), seed_param_.end());
    for (std::size_t k = 0; k < outs.size(); ++k) {
      q.outputs.push_back(ParamSpec{"out" + std::to_string(k), param_type(outs[k])});
      pname[outs[k].value] = q.outputs.back().name;
    }
    auto add_atom = [&](RelationAtom a) {
      if (std::find(q.relations.begin(), q.relations.end(), a) == q.relations.end()) q.relations.push_back(a);
    };
    for (const auto& f : required_) add_atom({rel(f.relation), pname[f.source.value], pname[f.target.value]});
    for (ObjectId o : outs) {
      std::vector<RelationAtom> facts;
      for (TripleIndex t : kb_->incident(o)) {
        const auto& f = kb_->triple(t);
        if (needs_rules(t)) continue;
        if (pname.contains(f.source.value) && pname.contains(f.target.value)) {
          facts.push_back({onto_.relation_name(f.relation), pname[f.source.value], pname[f.target.value]});
        }
      }
      if (!facts.empty()) add_atom(rng_.pick(facts));
    }
  }

  void make_noise() {
    std::vector<std::size_t> real_pool;
    for (std::size_t i = 0; i < concepts_.size(); ++i) {
      if (concepts_[i].stage != 0) real_pool.push_back(i);
    }
    const std::size_t nc = noise_concept_.size();
    for (std::uint32_t k = 0; k < c_.noise_services; ++k) {
      ServiceDef svc;
      svc.name = service_name(next_ordinal_++);
      // Noise outputs are always of a later noise concept than noise inputs,
      // so noise cannot feed itself forever.
      std::size_t max_noise = 0;
      bool any_noise = false;
      const auto n_in = rng_.between(c_.params_min, c_.params_max);
      for (std::int64_t i = 0; i < n_in; ++i) {
        std::size_t pick;
        if (nc > 1 && rng_.chance(0.5)) {
          const auto j = rng_.below(nc - 1);
          max_noise = any_noise ? std::max(max_noise, j) : j;
          any_noise = true;
          pick = noise_concept_[j];
        } else {
          pick = rng_.pick(real_pool);
        }
        svc.inputs.push_back(ParamSpec{"p" + std::to_string(i), concepts_[pick].name});
      }
      const auto lo = any_noise ? max_noise + 1 : 0;
      const auto n_out = rng_.between(1, 2);
      for (std::int64_t i = 0; i < n_out; ++i) {
        const auto j = lo + rng_.below(nc - lo);
        svc.outputs.push_back(ParamSpec{"o" + std::to_string(i), concepts_[noise_concept_[j]].name});
      }
      if (c_.relation_type_count > 0) {
        if (svc.inputs.size() >= 2 && rng_.chance(0.3)) {
          svc.relations.push_back({rel(rng_.below(c_.relation_type_count)), svc.inputs[0].name, svc.inputs[1].name});
        }
        if (rng_.chance(0.5)) {
          svc.relations.push_back(
              {rel(rng_.below(c_.relation_type_count)), rng_.pick(svc.inputs).name, svc.outputs[0].name});
        }
      }
      noise_.push_back(std::move(svc));
    }
  }

  GenConfig c_;
  Rng rng_;
  GeneratedInstance out_;
  std::vector<GenConcept> concepts_;
  std::vector<std::size_t> noise_concept_;
  std::vector<ChainRule> chains_;
  Ontology onto_;
  std::optional<Knowledge> kb_;
  std::vector<CallHistory> rule_history_;
  std::unordered_map<std::uint32_t, std::uint32_t> stage_of_;
  std::vector<std::size_t> slots_;
  std::vector<ObjectId> seed_objects_;
  std::unordered_map<std::uint32_t, std::string> seed_param_;
  std::vector<PendingFact> pending_;
  std::vector<PendingFact> required_;
  std::vector<ServiceDef> real_;
  std::vector<ServiceDef> noise_;
  std::vector<ServiceDef> detours_;
  std::set<std::pair<std::uint32_t, std::uint32_t>> injected_at_;
  std::vector<std::size_t> token_concept_;
  std::set<TripleIndex> inferred_;
  std::size_t next_ordinal_ = 0;
};

}  // namespace

GeneratedInstance generate_instance(const GenConfig& config) {
  if (auto why = check_config(config); !why.empty()) {
    std::string msg = "infeasible generator configuration:";
    for (const auto& w : why) msg += "\n  " + w;
    throw Error(msg);
  }
  auto inst = Builder(config).run();
  const auto bundle = to_bundle(inst);
  const Problem problem(bundle);
  auto reference = prune_steps(problem, inst.witness);
  if (!reference) throw Error("generator: witness plan does not replay");
  inst.reference = std::move(*reference);
  return inst;
}

InstanceBundle to_bundle(const GeneratedInstance& instance) {
  auto rules = instance.ontology.rules;
  auto draft = instance.ontology;
  draft.rules.clear();
  auto linked = link_instance(std::move(draft), std::move(rules), instance.repository, instance.query,
                              SourcePaths{"ontology.jsonld", "rules.xml", "repository.xml", "query.xml"});
  if (!linked.value) {
    std::string msg = "generated instance does not link:";
    for (const auto& d : linked.diagnostics) msg += "\n  " + to_string(d);
    throw Error(msg);
  }
  return std::move(*linked.value);
}

std::string describe_config(const GenConfig& c) {
  std::ostringstream out;
  out << "seed " << c.seed << '\n'
      << "stages " << c.stages << '\n'
      << "objectsPerStage " << c.objects_per_stage << '\n'
      << "relationsPerStage " << c.relations_per_stage << '\n'
      << "servicesPerLayer " << c.services_per_layer << '\n'
      << "paramsPerServiceMin " << c.params_min << '\n'
      << "paramsPerServiceMax " << c.params_max << '\n'
      << "conceptCount " << c.concept_count << '\n'
      << "hierarchyDepth " << c.hierarchy_depth << '\n'
      << "relationTypeCount " << c.relation_type_count << '\n'
      << "ruleCount " << c.rule_count << '\n'
      << "noiseServices " << c.noise_services << '\n'
      << "noiseConcepts " << c.noise_concepts << '\n'
      << "queryOutputs " << c.query_outputs << '\n'
      << "hierarchyOnly " << (c.hierarchy_only ? "true" : "false") << '\n'
      << "ruleDetours " << (c.rule_detours ? "true" : "false") << '\n';
  return out.str();
}

std::map<std::string, std::string> render_instance(const GeneratedInstance& instance, const GenConfig& config) {
  std::map<std::string, std::string> files;
  auto draft = instance.ontology;
  draft.rules.clear();
  files["ontology.jsonld"] = write_ontology(draft);
  files["rules.xml"] = write_rules(instance.ontology.rules);
  files["repository.xml"] = write_repository(instance.repository);
  files["query.xml"] = write_query(instance.query);

  PlanDocument plan;
  plan.verdict = Verdict::composed;
  plan.steps = instance.reference.steps;
  plan.goal = instance.reference.goal;
  plan.stats.service_calls = service_step_count(instance.reference);
  plan.stats.rule_applications = rule_step_count(instance.reference);
  files["solution.reference.txt"] = write_plan(plan);

  files["generator.txt"] = "random " + std::string(Rng::kAlgorithm) + '\n' + describe_config(config);
  return files;
}

GenConfig relational_preset(int row, std::uint64_t seed) {
  GenConfig c;
  c.seed = seed;
  c.objects_per_stage = 4;
  c.relations_per_stage = 4;
  c.concept_count = 6;
  c.relation_type_count = 5;
  c.rule_count = 3;
  c.noise_concepts = 8;
  switch (row) {
    // Three rule chains add three permit/copy pairs to each.
    case 0: c.stages = 6; c.services_per_layer = 6; c.noise_services = 27; break;  // 63
    case 1: c.stages = 4; c.services_per_layer = 5; c.noise_services = 9; break;   // 30
    case 2: c.stages = 3; c.services_per_layer = 6; c.noise_services = 12; break;  // 30
    case 3: c.stages = 5; c.services_per_layer = 6; c.noise_services = 16; break;  // 46
    default: throw Error("no relational preset " + std::to_string(row));
  }
  return c;
}

GenConfig hierarchy_preset(int row, std::uint64_t seed) {
  GenConfig c;
  c.seed = seed;
  c.hierarchy_only = true;
  c.objects_per_stage = 2;
  c.services_per_layer = 2;
  c.concept_count = 4;
  c.hierarchy_depth = 3;
  c.noise_concepts = 40;
  c.query_outputs = 1;
  switch (row) {
    case 0: c.stages = 20; c.noise_services = 1003; break;  // 1041
    case 1: c.stages = 32; c.noise_services = 1028; break;  // 1090
    case 2: c.stages = 57; c.noise_services = 2086; break;  // 2198
    default: throw Error("no hierarchy preset " + std::to_string(row));
  }
  return c;
}

}  // namespace relcompose
