// SPDX-License-Identifier: Apache-2.0

#include "rislens/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rislens/fisher.hpp"

namespace rislens {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::runtime_error("config: bad number for '" + key + "': " + s);
  }
}

long long to_ll(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::runtime_error("config: bad integer for '" + key + "': " + s);
  }
}

std::uint64_t to_u64(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::runtime_error("config: bad unsigned integer for '" + key +
                             "': " + s);
  }
}

bool to_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::runtime_error("config: bad boolean for '" + key + "': " + s);
}

// One antenna coordinate: a plain number, or "lambda" with an optional sign,
// resolved once the wavelength is known.
double antenna_component(const std::string& raw, double wavelength,
                         const std::string& key) {
  if (raw == "lambda" || raw == "+lambda") return wavelength;
  if (raw == "-lambda") return -wavelength;
  return to_double(raw, key);
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return from_string(text.str());
}

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig cfg;
  // Raw values first; derived quantities get resolved in a fixed order below
  // so key order in the file never matters.
  double carrier_hz = 28.0e9;
  double spacing_wavelengths = 0.5;
  std::string element_area = "quarter_wavelength_sq";
  std::string antenna_pos;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 8.0;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty())
      throw std::runtime_error("config: empty value for '" + key + "'");

    if (key == "carrier_hz") {
      carrier_hz = to_double(value, key);
    } else if (key == "ris_rows") {
      cfg.scenario.ris_rows = static_cast<int>(to_ll(value, key));
    } else if (key == "ris_cols") {
      cfg.scenario.ris_cols = static_cast<int>(to_ll(value, key));
    } else if (key == "spacing_wavelengths") {
      spacing_wavelengths = to_double(value, key);
    } else if (key == "element_area") {
      element_area = value;
    } else if (key == "antenna_pos_m") {
      antenna_pos = value;
    } else if (key == "tx_power_w") {
      cfg.scenario.tx_power = to_double(value, key);
    } else if (key == "noise_psd_dbm_hz") {
      noise_psd_dbm_hz = to_double(value, key);
    } else if (key == "noise_figure_db") {
      noise_figure_db = to_double(value, key);
    } else if (key == "bandwidth_hz") {
      cfg.scenario.bandwidth = to_double(value, key);
    } else if (key == "num_pilots") {
      cfg.scenario.num_pilots = static_cast<int>(to_ll(value, key));
    } else if (key == "profile") {
      const auto kind = profile_kind_from_string(value);
      if (!kind) throw std::runtime_error("config: unknown profile: " + value);
      cfg.profile = *kind;
    } else if (key == "prior_sigma_m") {
      cfg.prior_sigma = to_double(value, key);
    } else if (key == "prior_mean_m") {
      const auto parts = split(value, ',');
      if (parts.size() != 3)
        throw std::runtime_error("config: prior_mean_m needs 3 components");
      for (int i = 0; i < 3; ++i)
        cfg.prior_mean(i) = to_double(parts[i], key);
      cfg.prior_mean_set = true;
    } else if (key == "distances_m") {
      cfg.distances.clear();
      for (const auto& part : split(value, ','))
        cfg.distances.push_back(to_double(part, key));
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(to_ll(value, key));
    } else if (key == "profile_realizations") {
      cfg.profile_realizations = static_cast<int>(to_ll(value, key));
    } else if (key == "grid_theta_bins") {
      cfg.grids.theta_bins = static_cast<int>(to_ll(value, key));
    } else if (key == "grid_phi_bins") {
      cfg.grids.phi_bins = static_cast<int>(to_ll(value, key));
    } else if (key == "grid_d_bins") {
      cfg.grids.d_bins = static_cast<int>(to_ll(value, key));
    } else if (key == "d_min_m") {
      cfg.grids.d_min = to_double(value, key);
    } else if (key == "d_max_m") {
      cfg.grids.d_max = to_double(value, key);
    } else if (key == "bessel_n") {
      cfg.estimator.order_cap = static_cast<int>(to_ll(value, key));
    } else if (key == "quant_bits") {
      cfg.quant_bits = static_cast<int>(to_ll(value, key));
    } else if (key == "seed") {
      cfg.seed = to_u64(value, key);
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(to_ll(value, key));
    } else if (key == "refine_local") {
      cfg.estimator.local_search = to_bool(value, key);
    } else if (key == "refine_zoom") {
      cfg.estimator.zoom = to_bool(value, key);
    } else if (key == "map_s_min_m") {
      cfg.map_s_min = to_double(value, key);
    } else if (key == "map_s_max_m") {
      cfg.map_s_max = to_double(value, key);
    } else if (key == "map_s_points") {
      cfg.map_s_points = static_cast<int>(to_ll(value, key));
    } else if (key == "map_z_min_m") {
      cfg.map_z_min = to_double(value, key);
    } else if (key == "map_z_max_m") {
      cfg.map_z_max = to_double(value, key);
    } else if (key == "map_z_points") {
      cfg.map_z_points = static_cast<int>(to_ll(value, key));
    } else {
      throw std::runtime_error("config: unknown key '" + key + "'");
    }
  }

  // Derived scenario quantities.
  if (!(carrier_hz > 0.0)) throw std::runtime_error("config: carrier_hz <= 0");
  cfg.scenario.wavelength = kSpeedOfLight / carrier_hz;
  cfg.scenario.element_spacing = spacing_wavelengths * cfg.scenario.wavelength;
  if (element_area == "quarter_wavelength_sq") {
    cfg.scenario.element_side = 0.5 * cfg.scenario.wavelength;
  } else {
    const double area = to_double(element_area, "element_area");
    if (!(area > 0.0)) throw std::runtime_error("config: element_area <= 0");
    cfg.scenario.element_side = std::sqrt(area);
  }
  if (!antenna_pos.empty()) {
    const auto parts = split(antenna_pos, ',');
    if (parts.size() != 3)
      throw std::runtime_error("config: antenna_pos_m needs 3 components");
    for (int i = 0; i < 3; ++i)
      cfg.scenario.antenna_position(i) = antenna_component(
          parts[i], cfg.scenario.wavelength, "antenna_pos_m");
  } else {
    cfg.scenario.antenna_position =
        CartesianPosition(0.0, 0.0, -cfg.scenario.wavelength);
  }
  cfg.scenario.noise_psd = std::pow(10.0, (noise_psd_dbm_hz - 30.0) / 10.0);
  cfg.scenario.noise_figure = std::pow(10.0, noise_figure_db / 10.0);
  cfg.scenario.symbol_energy = cfg.scenario.tx_power / cfg.scenario.bandwidth;
  cfg.scenario.noise_variance =
      cfg.scenario.noise_psd * cfg.scenario.noise_figure;

  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  scenario.validate();
  grids.validate();
  if (!(prior_sigma >= 0.0))
    throw std::runtime_error("config: prior_sigma_m must be >= 0");
  if (distances.empty())
    throw std::runtime_error("config: distances_m must not be empty");
  for (double d : distances)
    if (!(d > 0.0)) throw std::runtime_error("config: distances must be > 0");
  if (trials < 1) throw std::runtime_error("config: trials must be >= 1");
  if (profile_realizations < 1)
    throw std::runtime_error("config: profile_realizations must be >= 1");
  if (quant_bits < 0)
    throw std::runtime_error("config: quant_bits must be >= 0");
  if (threads < 1) throw std::runtime_error("config: threads must be >= 1");
  if (estimator.order_cap < 0)
    throw std::runtime_error("config: bessel_n must be >= 0");
  if (map_s_points < 1 || map_z_points < 1)
    throw std::runtime_error("config: map grids need at least one point");
  if (!(map_z_min > 0.0))
    throw std::runtime_error("config: map_z_min_m must be > 0");
}

CartesianPosition source_position(double distance) {
  return distance / std::sqrt(3.0) * CartesianPosition(1.0, 1.0, 1.0);
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

template <typename Row>
void sort_rows(std::vector<Row>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.profile != b.profile) return a.profile < b.profile;
    if (a.sigma != b.sigma) return a.sigma < b.sigma;
    return a.distance < b.distance;
  });
}

}  // namespace

std::vector<PebRow> run_peb_sweep(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  const RisArray ris = build_ris_grid(sc.ris_rows, sc.ris_cols,
                                      sc.element_spacing);
  const Eigen::VectorXcd h_ant = antenna_coupling(sc, ris);
  const int points = static_cast<int>(cfg.distances.size());
  const int reals = cfg.profile_realizations;
  std::vector<double> bounds(static_cast<std::size_t>(points) * reals, 0.0);

  parallel_for(points * reals, cfg.threads, [&](int task) {
    const int pi = task / reals;
    const CartesianPosition p_true = source_position(cfg.distances[pi]);
    const std::uint64_t tid = static_cast<std::uint64_t>(task);
    RandomStream profile_rng(cfg.seed, tid, StreamPurpose::kProfile);
    RandomStream prior_rng(cfg.seed, tid, StreamPurpose::kPrior);
    PriorBelief prior;
    prior.mean = cfg.prior_mean_set ? cfg.prior_mean : p_true;
    prior.sigma = cfg.prior_sigma;
    const Eigen::MatrixXcd W =
        make_profile_w(cfg.profile, prior, sc, ris, h_ant, cfg.quant_bits,
                       profile_rng, prior_rng);
    const double rho = cm1_amplitude(spherical_from_cartesian(p_true), sc);
    bounds[task] = peb(efim_projection(p_true, rho, W, sc, ris));
  });

  std::vector<PebRow> rows;
  rows.reserve(points);
  for (int pi = 0; pi < points; ++pi) {
    PebRow row;
    row.distance = cfg.distances[pi];
    row.profile = to_string(cfg.profile);
    row.sigma = cfg.prior_sigma;
    double sum = 0.0;
    for (int r = 0; r < reals; ++r) sum += bounds[pi * reals + r];
    row.peb = sum / reals;
    row.prior_peb = prior_peb(cfg.prior_sigma);
    rows.push_back(std::move(row));
  }
  sort_rows(rows);
  return rows;
}

std::vector<RmseRow> run_rmse_sweep(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  const RisArray ris = build_ris_grid(sc.ris_rows, sc.ris_cols,
                                      sc.element_spacing);
  const Eigen::VectorXcd h_ant = antenna_coupling(sc, ris);
  const Localizer loc(sc, ris, cfg.grids, cfg.estimator);
  const int points = static_cast<int>(cfg.distances.size());
  const int trials = cfg.trials;

  struct TrialErr {
    double pos2 = 0.0, th2 = 0.0, ph2 = 0.0, d2 = 0.0;
    bool outlier = false;
  };
  std::vector<TrialErr> errs(static_cast<std::size_t>(points) * trials);

  parallel_for(points * trials, cfg.threads, [&](int task) {
    const int pi = task / trials;
    const CartesianPosition p_true = source_position(cfg.distances[pi]);
    const SphericalCoords truth = spherical_from_cartesian(p_true);
    const std::uint64_t tid = static_cast<std::uint64_t>(task);
    RandomStream profile_rng(cfg.seed, tid, StreamPurpose::kProfile);
    RandomStream prior_rng(cfg.seed, tid, StreamPurpose::kPrior);
    RandomStream noise_rng(cfg.seed, tid, StreamPurpose::kNoise);
    RandomStream sync_rng(cfg.seed, tid, StreamPurpose::kSync);
    PriorBelief prior;
    prior.mean = cfg.prior_mean_set ? cfg.prior_mean : p_true;
    prior.sigma = cfg.prior_sigma;
    const Eigen::MatrixXcd W =
        make_profile_w(cfg.profile, prior, sc, ris, h_ant, cfg.quant_bits,
                       profile_rng, prior_rng);
    const ObservationSet obs =
        synthesize_observations(W, p_true, sc, ris, sync_rng, noise_rng);
    const Estimate est = loc(obs.y, W);
    TrialErr& e = errs[task];
    e.pos2 = (est.p_hat - p_true).squaredNorm();
    const double dth = est.theta_hat - truth.theta;
    const double dph = std::remainder(est.phi_hat - truth.phi, 2.0 * kPi);
    const double dd = est.d_hat - truth.d;
    e.th2 = dth * dth;
    e.ph2 = dph * dph;
    e.d2 = dd * dd;
    e.outlier = std::sqrt(e.pos2) > 0.5 * truth.d;
  });

  std::vector<RmseRow> rows;
  rows.reserve(points);
  for (int pi = 0; pi < points; ++pi) {
    RmseRow row;
    row.distance = cfg.distances[pi];
    row.profile = to_string(cfg.profile);
    row.sigma = cfg.prior_sigma;
    row.trials = trials;
    double pos2 = 0.0, th2 = 0.0, ph2 = 0.0, d2 = 0.0;
    int outliers = 0;
    for (int t = 0; t < trials; ++t) {
      const TrialErr& e = errs[pi * trials + t];
      pos2 += e.pos2;
      th2 += e.th2;
      ph2 += e.ph2;
      d2 += e.d2;
      outliers += e.outlier ? 1 : 0;
    }
    const double n = static_cast<double>(trials);
    row.rmse = std::sqrt(pos2 / n);
    row.rmse_theta = std::sqrt(th2 / n);
    row.rmse_phi = std::sqrt(ph2 / n);
    row.rmse_d = std::sqrt(d2 / n);
    row.outlier_rate = outliers / n;
    // Delta-method standard error of the RMSE from the spread of squared
    // errors: se(rmse) = sd(e^2) / (2 * rmse * sqrt(n)).
    if (trials > 1 && row.rmse > 0.0) {
      const double mean2 = pos2 / n;
      double var2 = 0.0;
      for (int t = 0; t < trials; ++t) {
        const double dev = errs[pi * trials + t].pos2 - mean2;
        var2 += dev * dev;
      }
      var2 /= (n - 1.0);
      row.stderr_m = std::sqrt(var2 / n) / (2.0 * row.rmse);
    }
    rows.push_back(std::move(row));
  }
  sort_rows(rows);
  return rows;
}

std::vector<SnrRow> run_snr_map(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  const RisArray ris = build_ris_grid(sc.ris_rows, sc.ris_cols,
                                      sc.element_spacing);
  const Eigen::VectorXcd h_ant = antenna_coupling(sc, ris);
  const ProfileKind kinds[] = {ProfileKind::kRandom, ProfileKind::kDirectional,
                               ProfileKind::kPositional};

  PriorBelief prior;
  prior.mean = cfg.prior_mean_set ? cfg.prior_mean
                                  : CartesianPosition(0.1, 0.1, 0.1);
  prior.sigma = cfg.prior_sigma;

  std::vector<Eigen::MatrixXcd> profiles;
  profiles.reserve(3);
  for (int ki = 0; ki < 3; ++ki) {
    RandomStream profile_rng(cfg.seed, static_cast<std::uint64_t>(ki),
                             StreamPurpose::kProfile);
    RandomStream prior_rng(cfg.seed, static_cast<std::uint64_t>(ki),
                           StreamPurpose::kPrior);
    profiles.push_back(make_profile_w(kinds[ki], prior, sc, ris, h_ant,
                                      cfg.quant_bits, profile_rng, prior_rng));
  }

  const int ns = cfg.map_s_points;
  const int nz = cfg.map_z_points;
  auto s_at = [&](int i) {
    return (ns == 1) ? cfg.map_s_min
                     : cfg.map_s_min + (cfg.map_s_max - cfg.map_s_min) * i /
                           static_cast<double>(ns - 1);
  };
  auto z_at = [&](int i) {
    return (nz == 1) ? cfg.map_z_min
                     : cfg.map_z_min + (cfg.map_z_max - cfg.map_z_min) * i /
                           static_cast<double>(nz - 1);
  };

  std::vector<SnrRow> rows(static_cast<std::size_t>(3) * ns * nz);
  parallel_for(3 * ns * nz, cfg.threads, [&](int task) {
    const int ki = task / (ns * nz);
    const int si = (task / nz) % ns;
    const int zi = task % nz;
    const double s = s_at(si);
    const double z = z_at(zi);
    const CartesianPosition p(s / std::sqrt(2.0), s / std::sqrt(2.0), z);
    SnrRow& row = rows[task];
    row.x = p.x();
    row.y = p.y();
    row.z = p.z();
    row.profile = to_string(kinds[ki]);
    row.snr_db = std::max(snr_db(profiles[ki], p, sc, ris), 0.0);
  });

  std::stable_sort(rows.begin(), rows.end(),
                   [](const SnrRow& a, const SnrRow& b) {
                     if (a.profile != b.profile) return a.profile < b.profile;
                     if (a.x != b.x) return a.x < b.x;
                     return a.z < b.z;
                   });
  return rows;
}

std::string to_csv(const std::vector<PebRow>& rows) {
  std::string out = "distance_m,profile,sigma_m,peb_m,prior_peb_m\n";
  for (const auto& r : rows) {
    out += fmt(r.distance) + "," + r.profile + "," + fmt(r.sigma) + "," +
           fmt(r.peb) + "," + fmt(r.prior_peb) + "\n";
  }
  return out;
}

std::string to_csv(const std::vector<RmseRow>& rows) {
  std::string out =
      "distance_m,profile,sigma_m,trials,rmse_m,rmse_theta_rad,rmse_phi_rad,"
      "rmse_d_m,outlier_rate,stderr_m\n";
  for (const auto& r : rows) {
    out += fmt(r.distance) + "," + r.profile + "," + fmt(r.sigma) + "," +
           std::to_string(r.trials) + "," + fmt(r.rmse) + "," +
           fmt(r.rmse_theta) + "," + fmt(r.rmse_phi) + "," + fmt(r.rmse_d) +
           "," + fmt(r.outlier_rate) + "," + fmt(r.stderr_m) + "\n";
  }
  return out;
}

std::string to_csv(const std::vector<SnrRow>& rows) {
  std::string out = "x_m,y_m,z_m,profile,snr_db\n";
  for (const auto& r : rows) {
    out += fmt(r.x) + "," + fmt(r.y) + "," + fmt(r.z) + "," + r.profile +
           "," + fmt(r.snr_db) + "\n";
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace rislens
