#include "cachelab/factory.hpp"

#include "cachelab/policies.hpp"

namespace cachelab {

const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names = {
      "lru",        "lip",          "bip",         "dip",          "nru1",
      "nru2",       "nru3",         "nru4",        "srrip2",       "srrip3",
      "brrip2",     "brrip3",       "drrip2",      "drrip3",       "ship-mem",
      "pin25",      "pin50",        "pin75",       "pin100",       "random",
      "opt",        "opt-bypass",   "leeway-lru",  "leeway-nru1",  "leeway-nru2",
      "leeway-nru3", "leeway-nru4", "leeway-static-bop", "leeway-static-rop", "leeway-static-vtt7",
      "grasp",      "grasp-hints",  "grasp-insert"};
  return names;
}

std::unique_ptr<ReplacementPolicy> make_policy(const std::string& name, const PolicyOptions& o) {
  const SetDueling dueling(o.leader_sets, o.psel_bits);
  if (name == "lru") return std::make_unique<LruFamilyPolicy>(LruInsertion::Mru, o.bimodal_epsilon, dueling);
  if (name == "lip") return std::make_unique<LruFamilyPolicy>(LruInsertion::Lru, o.bimodal_epsilon, dueling);
  if (name == "bip") return std::make_unique<LruFamilyPolicy>(LruInsertion::Bimodal, o.bimodal_epsilon, dueling);
  if (name == "dip") return std::make_unique<LruFamilyPolicy>(LruInsertion::Dueling, o.bimodal_epsilon, dueling);
  for (std::uint32_t bits = 1; bits <= 4; ++bits)
    if (name == "nru" + std::to_string(bits)) return std::make_unique<NruPolicy>(bits);
  for (std::uint32_t bits : {2u, 3u}) {
    const std::string m = std::to_string(bits);
    if (name == "srrip" + m) return std::make_unique<RripPolicy>(RripInsertion::Static, bits, o.bimodal_epsilon, dueling);
    if (name == "brrip" + m) return std::make_unique<RripPolicy>(RripInsertion::Bimodal, bits, o.bimodal_epsilon, dueling);
    if (name == "drrip" + m) return std::make_unique<RripPolicy>(RripInsertion::Dueling, bits, o.bimodal_epsilon, dueling);
  }
  if (name == "ship-mem") return std::make_unique<ShipMemPolicy>(3, o.ship_sampler_sets);
  for (std::uint32_t x : {25u, 50u, 75u, 100u}) {
    if (name == "pin" + std::to_string(x)) {
      if (o.pin_base.rfind("pin", 0) == 0) throw UnknownPolicyError("pin: base policy cannot itself pin");
      return std::make_unique<PinPolicy>(x, make_policy(o.pin_base, o), o.abrs);
    }
  }
  if (name == "random") return std::make_unique<RandomPolicy>();
  if (name == "opt") return std::make_unique<OptPolicy>(false);
  if (name == "opt-bypass") return std::make_unique<OptPolicy>(true);

  LeewayConfig leeway = o.leeway;
  if (name == "leeway-lru") {
    leeway.base = LeewayBase::Lru;
    leeway.mode = LeewayMode::Dynamic;
    return std::make_unique<LeewayPolicy>(leeway);
  }
  for (std::uint32_t bits = 1; bits <= 4; ++bits) {
    if (name == "leeway-nru" + std::to_string(bits)) {
      leeway.base = LeewayBase::Nru;
      leeway.nru_bits = bits;
      leeway.mode = LeewayMode::Dynamic;
      return std::make_unique<LeewayPolicy>(leeway);
    }
  }
  const std::pair<const char*, LeewayMode> statics[] = {{"leeway-static-bop", LeewayMode::StaticBop},
                                                         {"leeway-static-rop", LeewayMode::StaticRop},
                                                         {"leeway-static-vtt7", LeewayMode::StaticVtt7}};
  for (const auto& [prefix, mode] : statics) {
    if (name == prefix) {
      leeway.base = LeewayBase::Lru;
      leeway.mode = mode;
      return std::make_unique<LeewayPolicy>(leeway);
    }
  }

  if (name == "grasp") return grasp_policy(o.abrs, GraspKind::Full);
  if (name == "grasp-hints") return grasp_policy(o.abrs, GraspKind::RripPlusHints);
  if (name == "grasp-insert") return grasp_policy(o.abrs, GraspKind::InsertionOnly);
  throw UnknownPolicyError("unknown policy '" + name + "'");
}

}  // namespace cachelab
