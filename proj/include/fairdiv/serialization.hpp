#pragma once

// JSON documents for the `alloc` subcommand. Agent and item indices are 0-based.

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "fairdiv/allocators.hpp"
#include "fairdiv/model.hpp"

namespace fairdiv {

inline nlohmann::json to_json(const Instance& inst) {
  return {{"n", inst.agents()}, {"m", inst.items()}, {"utilities", inst.utilities()}};
}

inline Instance instance_from_json(const nlohmann::json& doc) {
  return Instance(doc.at("n").get<std::size_t>(), doc.at("m").get<std::size_t>(),
                  doc.at("utilities").get<std::vector<double>>());
}

inline nlohmann::json to_json(const Allocation& alloc) {
  return {{"bundles", alloc.bundles()}, {"unallocated", alloc.unallocated()}};
}

inline Allocation allocation_from_json(const nlohmann::json& doc, std::size_t items) {
  return Allocation(doc.at("bundles").get<std::vector<Bundle>>(), items);
}

inline nlohmann::json to_json(const std::optional<Witness>& witness) {
  if (!witness) return nullptr;
  nlohmann::json out = {{"agent", witness->agent}, {"other", nullptr}, {"item", nullptr}};
  if (witness->other) out["other"] = *witness->other;
  if (witness->item) out["item"] = *witness->item;
  return out;
}

inline nlohmann::json to_json(const FairnessReport& report) {
  return {{"flags",
           {{"envy_free", report.envy_free},
            {"ef1", report.ef1},
            {"efx", report.efx},
            {"proportional", report.proportional}}},
          {"witness", to_json(report.witness)}};
}

/// Single-instance document: instance, allocator output and its fairness report.
/// A NULL allocation has `bundles`, `flags` and `witness` set to null.
inline nlohmann::json alloc_document(const Instance& inst, const AllocatorResult& result) {
  nlohmann::json doc = to_json(inst);
  doc["algorithm"] = result.algorithm_tag;
  doc["fallback_used"] = result.fallback_used;
  doc["diagnostics"] = result.diagnostics;
  if (result.allocation) {
    const auto body = to_json(*result.allocation);
    doc["bundles"] = body["bundles"];
    doc["unallocated"] = body["unallocated"];
    const auto report = to_json(fairness_report(inst, *result.allocation));
    doc["flags"] = report["flags"];
    doc["witness"] = report["witness"];
  } else {
    doc["bundles"] = nullptr;
    doc["unallocated"] = nullptr;
    doc["flags"] = nullptr;
    doc["witness"] = nullptr;
  }
  return doc;
}

}  // namespace fairdiv
