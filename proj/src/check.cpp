#include "exgrad/harness/check.hpp"

#include <ostream>

namespace exgrad::harness {

const CheckItem* HypothesisReport::find(std::string_view prefix) const {
  for (const auto& item : items)
    if (std::string_view(item.name).substr(0, prefix.size()) == prefix) return &item;
  return nullptr;
}

HypothesisReport check_hypotheses(const ExperimentSpec& spec, int samples, std::uint64_t seed) {
  const auto& p = spec.problem;
  HypothesisReport report;
  auto& items = report.items;

  for (auto& item : check_bifunction_axioms(p.space, p.f, p.set, samples, seed)) items.push_back(std::move(item));

  for (const auto& [label, map] : {std::pair{"T", &p.map_t}, std::pair{"S", &p.map_s}}) {
    try {
      for (auto& item : check_relatively_nonexpansive(p.space, *map, p.set, samples, seed, label))
        items.push_back(std::move(item));
    } catch (const InvalidArgument& e) {
      items.push_back(CheckItem{std::string(label) + ": declared fixed points", CheckStatus::fail, 0.0, e.what()});
    }
  }

  const auto alpha = estimate_alpha(p.space, p.op, p.set, samples, seed);
  CheckItem alpha_item{"alpha: declared alpha <= sampled bound"};
  alpha_item.note = "declared " + format_scalar(alpha.declared) + ", sampled bound " +
                    (alpha.constant_operator() ? std::string("+inf (constant operator)") : format_scalar(alpha.value));
  if (alpha.declared_exceeds) {
    alpha_item.status = CheckStatus::fail;
    alpha_item.worst = alpha.declared - alpha.value;
  }
  items.push_back(std::move(alpha_item));

  if (p.reference_solution) {
    items.push_back(check_norm_domination(p.space, p.op, *p.reference_solution, p.set, samples, seed));
  } else {
    items.push_back(CheckItem{"norm domination ||Ax|| <= ||Ax - Au||", CheckStatus::warn, 0.0, "",
                              "skipped: no reference solution"});
  }

  if (spec.schedule) {
    for (auto& item : validate_schedule(*spec.schedule, p.op.alpha(), p.space.c()).conditions)
      items.push_back(std::move(item));
  }
  return report;
}

void print_report(std::ostream& out, const HypothesisReport& report) {
  for (const auto& item : report.items) {
    out << '[' << to_string(item.status) << "] " << item.name;
    if (item.worst > 0) out << "  worst=" << item.worst;
    if (!item.witness.empty()) out << "  at " << item.witness;
    if (!item.note.empty()) out << "  (" << item.note << ')';
    out << '\n';
  }
  out << (report.ok() ? "all hypotheses hold on the samples\n" : "hypothesis check FAILED\n");
}

}  // namespace exgrad::harness
