#include "ranharness/ransim/channel.hpp"

#include <algorithm>
#include <cmath>

namespace ranharness::ransim {

double path_loss_db(double distance_m, const config::ChannelSpec& channel) {
  const double d = std::max(distance_m, channel.d0_m);
  return channel.pl0_db + 10.0 * channel.exponent * std::log10(d / channel.d0_m);
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double sinr_db(double rx_dbm, std::span<const double> interferers_dbm, double noise_dbm) {
  double total = dbm_to_mw(noise_dbm);
  for (double i : interferers_dbm) total += dbm_to_mw(i);
  return rx_dbm - mw_to_dbm(total);
}

LinkBudget compute_link(double tx_power_dbm, double distance_m,
                        std::vector<double> interference_dbm,
                        const config::ChannelSpec& channel) {
  LinkBudget link;
  link.tx_power_dbm = tx_power_dbm;
  link.distance_m = distance_m;
  link.rx_power_dbm = tx_power_dbm - path_loss_db(distance_m, channel);
  link.interference_dbm = std::move(interference_dbm);
  link.sinr_db = sinr_db(link.rx_power_dbm, link.interference_dbm, channel.noise_dbm);
  return link;
}

}  // namespace ranharness::ransim
