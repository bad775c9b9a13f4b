#include <charconv>
#include <sstream>

#include "relcompose/formats.hpp"

// plan.txt, one record per line:
//
//   relcompose-plan 1
//   verdict <composed|unsolvable|budget-exceeded>
//   dedup <identity|type-level>
//   sweeps N
//   calls N
//   rule-applications N
//   step <query|service|rule> <name>
//     in <param> <object>
//     out <param> <object>
//     fact <relation> <source> <target>
//   end
//   goal <param> <object>
//
// Blank lines and lines starting with '#' are ignored.

namespace relcompose {

namespace {

constexpr std::string_view kMagic = "relcompose-plan";
constexpr int kVersion = 1;

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<StepKind> parse_kind(std::string_view s) {
  if (s == "query") return StepKind::query;
  if (s == "service") return StepKind::service;
  if (s == "rule") return StepKind::rule;
  return std::nullopt;
}

std::optional<std::uint64_t> parse_count(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string write_plan(const PlanDocument& plan) {
  std::ostringstream out;
  out << kMagic << ' ' << kVersion << '\n';
  out << "verdict " << to_string(plan.verdict) << '\n';
  out << "dedup " << to_string(plan.dedup) << '\n';
  out << "sweeps " << plan.stats.sweeps << '\n';
  out << "calls " << plan.stats.service_calls << '\n';
  out << "rule-applications " << plan.stats.rule_applications << '\n';
  for (const auto& s : plan.steps) {
    out << "step " << to_string(s.kind) << ' ' << s.name << '\n';
    for (const auto& b : s.binding) out << "  in " << b.parameter << ' ' << b.object << '\n';
    for (const auto& p : s.produced) out << "  out " << p.parameter << ' ' << p.object << '\n';
    for (const auto& f : s.asserted) out << "  fact " << f.relation << ' ' << f.source << ' ' << f.target << '\n';
    out << "end\n";
  }
  for (const auto& g : plan.goal) out << "goal " << g.parameter << ' ' << g.object << '\n';
  return out.str();
}

Parsed<PlanDocument> read_plan(std::string_view text, std::string_view file) {
  Parsed<PlanDocument> out;
  PlanDocument doc;
  std::size_t line_no = 0;
  auto fail = [&](std::string msg) {
    out.diagnostics.push_back(
        Diagnostic{Severity::error, std::string(file), "line " + std::to_string(line_no), std::move(msg)});
  };

  bool header = false;
  bool seen_verdict = false;
  bool seen_dedup = false;
  Invocation* open = nullptr;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tok = split(line);
    if (tok.empty() || tok[0].front() == '#') continue;

    if (!header) {
      if (tok.size() != 2 || tok[0] != kMagic || tok[1] != "1") {
        fail("expected header 'relcompose-plan 1'");
        return out;
      }
      header = true;
      continue;
    }
    const auto& key = tok[0];
    if (open) {
      if (key == "end" && tok.size() == 1) {
        open = nullptr;
      } else if ((key == "in" || key == "out") && tok.size() == 3) {
        (key == "in" ? open->binding : open->produced)
            .push_back(NamedObject{std::string(tok[1]), std::string(tok[2])});
      } else if (key == "fact" && tok.size() == 4) {
        open->asserted.push_back(FactRef{std::string(tok[1]), std::string(tok[2]), std::string(tok[3])});
      } else {
        fail("unexpected '" + std::string(line) + "' inside a step");
        return out;
      }
      continue;
    }
    if (key == "verdict" && tok.size() == 2) {
      auto v = parse_verdict(tok[1]);
      if (!v) {
        fail("unknown verdict '" + std::string(tok[1]) + "'");
        return out;
      }
      doc.verdict = *v;
      seen_verdict = true;
    } else if (key == "dedup" && tok.size() == 2) {
      auto m = parse_dedup_mode(tok[1]);
      if (!m) {
        fail("unknown dedup mode '" + std::string(tok[1]) + "'");
        return out;
      }
      doc.dedup = *m;
      seen_dedup = true;
    } else if ((key == "sweeps" || key == "calls" || key == "rule-applications") && tok.size() == 2) {
      auto n = parse_count(tok[1]);
      if (!n) {
        fail("expected a count after '" + std::string(key) + "'");
        return out;
      }
      (key == "sweeps" ? doc.stats.sweeps : key == "calls" ? doc.stats.service_calls : doc.stats.rule_applications) =
          *n;
    } else if (key == "step" && tok.size() == 3) {
      auto kind = parse_kind(tok[1]);
      if (!kind) {
        fail("unknown step kind '" + std::string(tok[1]) + "'");
        return out;
      }
      if (!doc.goal.empty()) {
        fail("step after goal lines");
        return out;
      }
      doc.steps.push_back(Invocation{*kind, std::string(tok[2]), {}, {}, {}});
      open = &doc.steps.back();
    } else if (key == "goal" && tok.size() == 3) {
      doc.goal.push_back(NamedObject{std::string(tok[1]), std::string(tok[2])});
    } else {
      fail("unrecognized line '" + std::string(line) + "'");
      return out;
    }
  }
  if (!header) {
    fail("empty plan document");
    return out;
  }
  if (open) {
    fail("step '" + open->name + "' is missing 'end'");
    return out;
  }
  if (!seen_verdict || !seen_dedup) {
    fail("plan is missing its verdict or dedup line");
    return out;
  }
  out.value = std::move(doc);
  return out;
}

}  // namespace relcompose
