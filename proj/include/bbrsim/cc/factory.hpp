#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bbrsim/cc/bbr.hpp"
#include "bbrsim/cc/bbr2.hpp"
#include "bbrsim/cc/cubic.hpp"
#include "bbrsim/cc/reno.hpp"

namespace bbrsim {

inline constexpr std::array<std::string_view, 8> kAlgorithmNames{
    "reno", "cubic", "bbr", "bbr_prime", "bbrplus", "bbr_hsr", "tsunami", "bbr2"};

struct ControllerParams {
  uint64_t seed = 1;
  uint32_t flow_index = 0;
  bool rtprop_compensation = false;
  double lambda = 1.0;
};

inline bool IsKnownAlgorithm(std::string_view name) {
  for (auto n : kAlgorithmNames) {
    if (n == name) return true;
  }
  return false;
}

inline std::unique_ptr<CongestionController> MakeController(std::string_view name,
                                                            const ControllerParams& p = {}) {
  if (name == "reno") return std::make_unique<RenoSender>();
  if (name == "cubic") return std::make_unique<CubicSender>();
  if (name == "bbr2") return std::make_unique<Bbr2Sender>(Bbr2Options{p.seed, p.flow_index});
  for (BbrVariant v : {BbrVariant::kBbr, BbrVariant::kBbrPrime, BbrVariant::kBbrPlus,
                       BbrVariant::kBbrHsr, BbrVariant::kTsunami}) {
    if (VariantName(v) == name) {
      return std::make_unique<BbrSender>(
          BbrOptions{v, p.seed, p.flow_index, p.rtprop_compensation, p.lambda});
    }
  }
  throw std::invalid_argument("unknown algorithm: " + std::string(name));
}

}  // namespace bbrsim
