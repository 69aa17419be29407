#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachelab/cache.hpp"
#include "cachelab/grasp.hpp"
#include "cachelab/leeway.hpp"

namespace cachelab {

struct UnknownPolicyError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Tunables shared by the named policies; each policy reads the ones it uses.
struct PolicyOptions {
  std::vector<AddressBoundRegister> abrs;
  double bimodal_epsilon = 1.0 / 32;
  std::uint32_t leader_sets = 32;
  std::uint32_t psel_bits = 10;
  std::uint32_t ship_sampler_sets = 64;
  std::string pin_base = "drrip3";
  LeewayConfig leeway;  // base and mode are taken from the name
};

/// Every name make_policy() accepts.
const std::vector<std::string>& policy_names();

std::unique_ptr<ReplacementPolicy> make_policy(const std::string& name, const PolicyOptions& options = {});

}  // namespace cachelab
