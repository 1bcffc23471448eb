// SPDX-License-Identifier: Apache-2.0
//
// Experiment harness: configuration parsing, the three sweeps (position
// error bound, estimator RMSE, receive-SNR map), and CSV serialization.
// All sweeps are deterministic functions of (config, seed) regardless of
// thread count.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rislens/estimator.hpp"
#include "rislens/geometry.hpp"
#include "rislens/profiles.hpp"

namespace rislens {

struct RunConfig {
  Scenario scenario = Scenario::defaults();
  SearchGrids grids;
  LocalizeOptions estimator;
  ProfileKind profile = ProfileKind::kRandom;
  double prior_sigma = 0.1;             // m
  bool prior_mean_set = false;          // default: prior centered on truth
  CartesianPosition prior_mean = CartesianPosition::Zero();
  std::vector<double> distances = {1.0, 3.0, 10.0, 15.0};  // m, along the
                                        // default source ray (see below)
  int trials = 200;                     // RMSE Monte Carlo trials per point
  int profile_realizations = 10;        // PEB averaging draws per point
  int quant_bits = 0;                   // 0: unquantized
  std::uint64_t seed = 1;
  int threads = 1;
  // SNR map extents: positions ((s/sqrt(2), s/sqrt(2), z)) over an s x z grid.
  double map_s_min = -3.0, map_s_max = 3.0;
  int map_s_points = 61;
  double map_z_min = 0.05, map_z_max = 3.0;
  int map_z_points = 60;

  // Flat "key = value" text, '#' comments. Unknown keys are errors.
  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text);
  void validate() const;
};

// Sources sit on the diagonal direction (1,1,1)/sqrt(3): elevation
// atan(sqrt(2)) ~ 54.74 deg, azimuth 45 deg. Scaled to distance d.
CartesianPosition source_position(double distance);

struct PebRow {
  double distance = 0.0;
  std::string profile;
  double sigma = 0.0;
  double peb = 0.0;
  double prior_peb = 0.0;
};

struct RmseRow {
  double distance = 0.0;
  std::string profile;
  double sigma = 0.0;
  int trials = 0;
  double rmse = 0.0;
  double rmse_theta = 0.0;   // rad
  double rmse_phi = 0.0;     // rad
  double rmse_d = 0.0;       // m
  double outlier_rate = 0.0; // fraction with position error > d/2
  double stderr_m = 0.0;     // standard error of the position RMSE
};

struct SnrRow {
  double x = 0.0, y = 0.0, z = 0.0;
  std::string profile;
  double snr_db = 0.0;  // truncated below at 0 dB
};

// Position error bound per configured distance, averaged over
// profile_realizations independent profile draws.
std::vector<PebRow> run_peb_sweep(const RunConfig& cfg);

// Full estimator Monte Carlo per configured distance.
std::vector<RmseRow> run_rmse_sweep(const RunConfig& cfg);

// Receive SNR over the diagonal-plane grid for all three profile kinds,
// one profile realization each.
std::vector<SnrRow> run_snr_map(const RunConfig& cfg);

std::string to_csv(const std::vector<PebRow>& rows);
std::string to_csv(const std::vector<RmseRow>& rows);
std::string to_csv(const std::vector<SnrRow>& rows);

void write_file(const std::string& path, const std::string& content);

// Deterministic parallel map: calls fn(i) for i in [0, n) on `threads`
// threads. Results must be written to pre-sized slots; the iteration order
// within a thread is ascending, and any exception is rethrown on the caller.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace rislens
