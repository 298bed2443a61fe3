#pragma once

#include <span>
#include <vector>

#include "ranharness/config/scenario.hpp"

namespace ranharness::ransim {

/// Log-distance path loss. Distances below the reference distance are
/// clamped to it.
double path_loss_db(double distance_m, const config::ChannelSpec& channel);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// rx_dbm - 10*log10(noise + sum of interferers), all powers summed linearly.
double sinr_db(double rx_dbm, std::span<const double> interferers_dbm, double noise_dbm);

struct LinkBudget {
  double tx_power_dbm = 0;
  double distance_m = 0;
  double rx_power_dbm = 0;
  std::vector<double> interference_dbm;
  double sinr_db = 0;
};

LinkBudget compute_link(double tx_power_dbm, double distance_m,
                        std::vector<double> interference_dbm,
                        const config::ChannelSpec& channel);

}  // namespace ranharness::ransim
