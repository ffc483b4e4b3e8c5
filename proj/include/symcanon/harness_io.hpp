#pragma once

// Run configuration and on-disk formats for harness reports and weights.

#include <optional>
#include <string>
#include <vector>

#include "symcanon/harness.hpp"
#include "symcanon/json_io.hpp"

namespace symcanon {

inline constexpr int kConfigVersion = 1;
inline constexpr int kWeightsVersion = 1;

struct RunConfig {
  Scene scene;
  HarnessParams harness;
  std::uint64_t seed = 0;
  int runs = 1;  ///< demo seeds are seed, seed+1, ..., seed+runs-1
  std::vector<Mode> modes{Mode::raw, Mode::map_only, Mode::map_prime};
  /// Points for ADI in eval; box corners when absent.
  std::optional<ModelPoints> model_points;

  void validate() const;
};

/// Missing sections take the defaults above; "version" must match when given.
RunConfig run_config_from_json(const Json& j);
Json to_json(const RunConfig& c);

/// Header: epoch,loss,val_rms_px,val_rot_err_rad,clf_acc. Epochs without a
/// rotation evaluation or without a classifier leave the field empty.
std::string report_csv(const HarnessReport& r);
Json to_json(const HarnessReport& r);

Json weights_to_json(const TrainedModel& m);
TrainedModel weights_from_json(const Json& j);

}  // namespace symcanon
