#include "clocknet/scenario.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "clocknet/epr.hpp"
#include "clocknet/network.hpp"
#include "clocknet/optics.hpp"
#include "clocknet/protocol.hpp"
#include "clocknet/sequence.hpp"

namespace clocknet {

namespace {

using nlohmann::json;

void require_known_keys(const json& obj, const std::string& ctx,
                        const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw scenario_validation_error("unknown key '" + it.key() + "' in " + ctx);
    }
  }
}

double get_num(const json& obj, const char* key, double def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_number()) {
    throw scenario_validation_error(std::string("key '") + key + "' must be a number");
  }
  return obj[key].get<double>();
}

long long get_int(const json& obj, const char* key, long long def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_number_integer()) {
    throw scenario_validation_error(std::string("key '") + key + "' must be an integer");
  }
  return obj[key].get<long long>();
}

bool get_bool(const json& obj, const char* key, bool def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_boolean()) {
    throw scenario_validation_error(std::string("key '") + key + "' must be a boolean");
  }
  return obj[key].get<bool>();
}

std::string get_str(const json& obj, const char* key, const std::string& def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_string()) {
    throw scenario_validation_error(std::string("key '") + key + "' must be a string");
  }
  return obj[key].get<std::string>();
}

void require_positive(double v, const char* key) {
  if (!(v > 0.0)) {
    throw scenario_validation_error(std::string("key '") + key + "' must be positive");
  }
}

void require_nonnegative(double v, const char* key) {
  if (v < 0.0) {
    throw scenario_validation_error(std::string("key '") + key + "' must be >= 0");
  }
}

ScenarioMode mode_from_string(const std::string& s) {
  if (s == "squeeze") return ScenarioMode::squeeze;
  if (s == "cavity") return ScenarioMode::cavity;
  if (s == "chain") return ScenarioMode::chain;
  if (s == "sequence") return ScenarioMode::sequence;
  if (s == "epr") return ScenarioMode::epr;
  if (s == "protocol") return ScenarioMode::protocol;
  throw scenario_validation_error("unknown mode '" + s + "'");
}

TransmissionConvention convention_from_string(const std::string& s) {
  if (s == "per_hop_exponent") return TransmissionConvention::per_hop_exponent;
  if (s == "total_over_m") return TransmissionConvention::total_over_m;
  if (s == "total_over_m_minus_1") return TransmissionConvention::total_over_m_minus_1;
  throw scenario_validation_error("unknown convention '" + s + "'");
}

const std::set<std::string>& allowed_sweep_parameters(ScenarioMode mode) {
  static const std::set<std::string> squeeze = {"eta"};
  static const std::set<std::string> chain = {"clocks"};
  static const std::set<std::string> epr = {"mu_over_nu"};
  static const std::set<std::string> none;
  switch (mode) {
    case ScenarioMode::squeeze: return squeeze;
    case ScenarioMode::chain: return chain;
    case ScenarioMode::epr: return epr;
    default: return none;
  }
}

json validate_mode_params(ScenarioMode mode, const json& section) {
  json p = json::object();
  switch (mode) {
    case ScenarioMode::squeeze: {
      require_known_keys(section, "squeeze", {"n_atoms", "d", "eta"});
      p["n_atoms"] = get_int(section, "n_atoms", 1000);
      if (p["n_atoms"].get<long long>() < 1) {
        throw scenario_validation_error("key 'n_atoms' must be >= 1");
      }
      p["d"] = get_num(section, "d", 1000.0);
      require_positive(p["d"].get<double>(), "d");
      p["eta"] = get_num(section, "eta", 0.5);
      require_nonnegative(p["eta"].get<double>(), "eta");
      break;
    }
    case ScenarioMode::cavity: {
      require_known_keys(section, "cavity",
                         {"n_atoms", "d", "finesse", "length", "omega", "big_gamma",
                          "gamma", "sigma_over_a"});
      p["n_atoms"] = get_int(section, "n_atoms", 1000);
      if (p["n_atoms"].get<long long>() < 1) {
        throw scenario_validation_error("key 'n_atoms' must be >= 1");
      }
      p["d"] = get_num(section, "d", 0.012);
      require_positive(p["d"].get<double>(), "d");
      p["finesse"] = get_num(section, "finesse", 1e5);
      require_positive(p["finesse"].get<double>(), "finesse");
      p["length"] = get_num(section, "length", 0.05);
      p["omega"] = get_num(section, "omega", 0.0);
      p["big_gamma"] = get_num(section, "big_gamma", 0.0);
      p["gamma"] = get_num(section, "gamma", 0.0);
      p["sigma_over_a"] = get_num(
          section, "sigma_over_a",
          p["d"].get<double>() / static_cast<double>(p["n_atoms"].get<long long>()));
      break;
    }
    case ScenarioMode::chain: {
      require_known_keys(section, "chain",
                         {"clocks", "total_transmission", "convention", "n_atoms", "d",
                          "finesse_last", "eta"});
      p["clocks"] = get_int(section, "clocks", 4);
      if (p["clocks"].get<long long>() < 1) {
        throw scenario_validation_error("key 'clocks' must be >= 1");
      }
      p["total_transmission"] = get_num(section, "total_transmission", 0.5);
      if (!(p["total_transmission"].get<double>() > 0.0) ||
          p["total_transmission"].get<double>() > 1.0) {
        throw scenario_validation_error("key 'total_transmission' must be in (0, 1]");
      }
      p["convention"] = get_str(section, "convention", "total_over_m");
      convention_from_string(p["convention"].get<std::string>());
      p["n_atoms"] = get_int(section, "n_atoms", 1000);
      if (p["n_atoms"].get<long long>() < 1) {
        throw scenario_validation_error("key 'n_atoms' must be >= 1");
      }
      p["d"] = get_num(section, "d", 0.012);
      require_positive(p["d"].get<double>(), "d");
      p["finesse_last"] = get_num(section, "finesse_last", 1e5);
      require_positive(p["finesse_last"].get<double>(), "finesse_last");
      p["eta"] = get_num(section, "eta", 0.5);
      require_nonnegative(p["eta"].get<double>(), "eta");
      break;
    }
    case ScenarioMode::sequence: {
      require_known_keys(
          section, "sequence",
          {"n_atoms", "shots", "probe_mode", "kappa", "d", "finesse", "eta",
           "precession_angle", "pulse_error_rms", "atom_jitter_rms", "stark_coeff",
           "n_dr", "flip_second_detuning", "hp_ratio", "detector_noise_var",
           "emit_shots"});
      p["n_atoms"] = get_int(section, "n_atoms", 1000);
      if (p["n_atoms"].get<long long>() < 1) {
        throw scenario_validation_error("key 'n_atoms' must be >= 1");
      }
      p["shots"] = get_int(section, "shots", 20000);
      if (p["shots"].get<long long>() < 1) {
        throw scenario_validation_error("key 'shots' must be >= 1");
      }
      const std::string probe_mode = get_str(section, "probe_mode", "qnd");
      if (probe_mode != "qnd" && probe_mode != "css") {
        throw scenario_validation_error("key 'probe_mode' must be 'qnd' or 'css'");
      }
      p["probe_mode"] = probe_mode;
      p["eta"] = get_num(section, "eta", probe_mode == "css" ? 0.0 : 0.5);
      require_nonnegative(p["eta"].get<double>(), "eta");
      if (probe_mode == "css") {
        p["kappa"] = 0.0;
      } else if (section.contains("kappa")) {
        p["kappa"] = get_num(section, "kappa", 0.0);
        require_nonnegative(p["kappa"].get<double>(), "kappa");
      } else if (section.contains("d") && section.contains("finesse")) {
        const double d = get_num(section, "d", 0.0);
        const double f = get_num(section, "finesse", 0.0);
        require_positive(d, "d");
        require_positive(f, "finesse");
        p["kappa"] = kappa_cavity_substituted(d, f, p["eta"].get<double>());
      } else {
        throw scenario_validation_error(
            "sequence: either 'kappa' or both 'd' and 'finesse' required in qnd mode");
      }
      p["precession_angle"] = get_num(section, "precession_angle", 0.0);
      p["pulse_error_rms"] = get_num(section, "pulse_error_rms", 0.0);
      require_nonnegative(p["pulse_error_rms"].get<double>(), "pulse_error_rms");
      p["atom_jitter_rms"] = get_num(section, "atom_jitter_rms", 0.0);
      require_nonnegative(p["atom_jitter_rms"].get<double>(), "atom_jitter_rms");
      p["stark_coeff"] = get_num(section, "stark_coeff", 0.0);
      p["n_dr"] = get_num(section, "n_dr", 0.0);
      require_nonnegative(p["n_dr"].get<double>(), "n_dr");
      p["flip_second_detuning"] = get_bool(section, "flip_second_detuning", true);
      p["hp_ratio"] = get_num(section, "hp_ratio", 0.1);
      require_positive(p["hp_ratio"].get<double>(), "hp_ratio");
      p["detector_noise_var"] = get_num(section, "detector_noise_var", 0.0);
      require_nonnegative(p["detector_noise_var"].get<double>(), "detector_noise_var");
      p["emit_shots"] = get_bool(section, "emit_shots", true);
      break;
    }
    case ScenarioMode::epr:
    case ScenarioMode::protocol: {
      const std::string ctx = (mode == ScenarioMode::epr) ? "epr" : "protocol";
      std::set<std::string> keys = {"n_atoms", "j_len", "nu", "mu_over_nu", "extra_loss"};
      if (mode == ScenarioMode::protocol) {
        keys.insert({"rounds", "eavesdropper", "meter_noise_var", "resend_noise_var",
                     "significance"});
      }
      require_known_keys(section, ctx, keys);
      p["n_atoms"] = get_int(section, "n_atoms", 1000);
      if (p["n_atoms"].get<long long>() < 1) {
        throw scenario_validation_error("key 'n_atoms' must be >= 1");
      }
      p["j_len"] = get_num(section, "j_len",
                           0.5 * static_cast<double>(p["n_atoms"].get<long long>()));
      require_positive(p["j_len"].get<double>(), "j_len");
      p["nu"] = get_num(section, "nu", 1.0);
      require_positive(p["nu"].get<double>(), "nu");
      p["mu_over_nu"] = get_num(section, "mu_over_nu", 1.0 / 3.0);
      if (p["mu_over_nu"].get<double>() < 0.0 || p["mu_over_nu"].get<double>() >= 1.0) {
        throw scenario_validation_error("key 'mu_over_nu' must be in [0, 1)");
      }
      p["extra_loss"] = get_num(section, "extra_loss", 0.0);
      require_nonnegative(p["extra_loss"].get<double>(), "extra_loss");
      if (mode == ScenarioMode::protocol) {
        p["rounds"] = get_int(section, "rounds", 2000);
        if (p["rounds"].get<long long>() < 16) {
          throw scenario_validation_error("key 'rounds' must be >= 16");
        }
        p["eavesdropper"] = get_bool(section, "eavesdropper", false);
        p["meter_noise_var"] = get_num(section, "meter_noise_var", 0.5);
        p["resend_noise_var"] = get_num(section, "resend_noise_var", 0.5);
        p["significance"] = get_num(section, "significance", 0.01);
        const double alpha = p["significance"].get<double>();
        if (!(alpha > 0.0 && alpha < 1.0)) {
          throw scenario_validation_error("key 'significance' must be in (0, 1)");
        }
      }
      break;
    }
  }
  return p;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot open output file " + tmp.string());
    }
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::vector<double> sweep_values(const SweepSpec& sweep) {
  std::vector<double> vals;
  if (sweep.steps == 1) {
    vals.push_back(sweep.from);
    return vals;
  }
  for (int i = 0; i < sweep.steps; ++i) {
    vals.push_back(sweep.from +
                   (sweep.to - sweep.from) * static_cast<double>(i) /
                       static_cast<double>(sweep.steps - 1));
  }
  return vals;
}

void run_squeeze(const ScenarioConfig& cfg, ResultRecord& rec) {
  const json& p = cfg.params;
  const double d = p["d"].get<double>();
  auto xi_at = [&](double eta) { return xi_closed_form(kappa_free(d, eta), eta); };
  if (cfg.sweep) {
    rec.series_columns = {"eta", "kappa", "xi", "xi_db"};
    double best_eta = 0.0, best_xi = std::numeric_limits<double>::infinity();
    for (double eta : sweep_values(*cfg.sweep)) {
      const double kappa = kappa_free(d, eta);
      const double xi = xi_closed_form(kappa, eta);
      rec.series_rows.push_back({eta, kappa, xi, -10.0 * std::log10(xi)});
      if (xi < best_xi) {
        best_xi = xi;
        best_eta = eta;
      }
    }
    rec.scalars["eta_opt"] = {best_eta, "dimensionless"};
    rec.scalars["xi_min"] = {best_xi, "dimensionless"};
  } else {
    const double eta = p["eta"].get<double>();
    rec.scalars["eta"] = {eta, "dimensionless"};
    rec.scalars["kappa"] = {kappa_free(d, eta), "dimensionless"};
    rec.scalars["xi"] = {xi_at(eta), "dimensionless"};
  }
  rec.scalars["xi_min_asymptotic"] = {2.0 * M_E / d, "dimensionless"};
}

void run_cavity(const ScenarioConfig& cfg, ResultRecord& rec) {
  const json& p = cfg.params;
  const double d = p["d"].get<double>();
  const double f = p["finesse"].get<double>();
  const double df = d * f;
  const double xi_min = M_E * M_PI / (2.0 * df);
  rec.scalars["d"] = {d, "dimensionless"};
  rec.scalars["finesse"] = {f, "dimensionless"};
  rec.scalars["d_times_finesse"] = {df, "dimensionless"};
  rec.scalars["xi_min"] = {xi_min, "dimensionless"};
  rec.scalars["xi_min_db"] = {-10.0 * std::log10(xi_min), "dB"};
  rec.scalars["kappa_cav"] = {kappa_cavity_substituted(d, f, 0.5), "dimensionless"};
  rec.scalars["eta_n_for_half"] = {M_PI / (2.0 * f), "dimensionless"};
  const double sigma_over_a = p["sigma_over_a"].get<double>();
  rec.scalars["hp_bound_ok"] = {hp_validity(sigma_over_a, f) ? 1.0 : 0.0, "boolean"};
  if (p["omega"].get<double>() > 0.0 && p["big_gamma"].get<double>() > 0.0 &&
      p["gamma"].get<double>() > 0.0) {
    CavityParams cav;
    cav.d = d;
    cav.big_gamma = p["big_gamma"].get<double>();
    // Mirror budget chosen to reproduce the requested finesse.
    cav.t1 = cav.t2 = M_PI / f;
    cav.length = p["length"].get<double>();
    const auto coop = cooperativity_check(cav, p["omega"].get<double>(),
                                          p["gamma"].get<double>());
    rec.scalars["cooperativity"] = {coop.value, "dimensionless"};
    rec.scalars["cooperativity_rel_dev"] = {coop.rel_deviation, "dimensionless"};
    rec.scalars["cooperativity_consistent"] = {coop.consistent ? 1.0 : 0.0, "boolean"};
  }
}

void run_chain(const ScenarioConfig& cfg, ResultRecord& rec) {
  const json& p = cfg.params;
  const auto conv = convention_from_string(p["convention"].get<std::string>());
  const double t = p["total_transmission"].get<double>();
  const long long n_atoms = p["n_atoms"].get<long long>();
  const double d = p["d"].get<double>();
  const double f_last = p["finesse_last"].get<double>();
  const double eta = p["eta"].get<double>();

  if (cfg.sweep) {
    rec.series_columns = {"clocks", "improvement"};
    for (double mv : sweep_values(*cfg.sweep)) {
      const int m = static_cast<int>(std::llround(mv));
      rec.series_rows.push_back({static_cast<double>(m), chain_improvement(m, t, conv)});
    }
    const auto& last = rec.series_rows.back();
    rec.scalars["improvement_last"] = {last[1], "dimensionless"};
    return;
  }

  const int m = static_cast<int>(p["clocks"].get<long long>());
  const double lnt = std::abs(std::log(t));
  double r = 0.0;
  switch (conv) {
    case TransmissionConvention::per_hop_exponent: r = lnt; break;
    case TransmissionConvention::total_over_m: r = lnt / m; break;
    case TransmissionConvention::total_over_m_minus_1:
      r = (m > 1) ? lnt / (m - 1) : 0.0;
      break;
  }
  const ChainConfig chain = make_uniform_chain(m, n_atoms, d, f_last, r, eta);
  const double snr = chain_snr(chain);
  const double single =
      chain_snr_term(ChainClock{n_atoms, d, f_last, eta}, 0.0);

  rec.series_columns = {"clock", "r_i", "finesse_i", "eta_i", "snr_term"};
  const auto acc = chain.accumulated_attenuation();
  for (int i = 0; i < m; ++i) {
    rec.series_rows.push_back({static_cast<double>(i + 1), acc[i],
                               chain.clocks[i].finesse, chain.clocks[i].eta,
                               chain_snr_term(chain.clocks[i], acc[i])});
  }
  rec.scalars["improvement"] = {chain_improvement(m, t, conv), "dimensionless"};
  rec.scalars["snr"] = {snr, "dimensionless"};
  rec.scalars["snr_single_clock"] = {single, "dimensionless"};
  rec.scalars["precision"] = {1.0 / snr, "rad"};
  rec.scalars["per_hop_r"] = {r, "dimensionless"};
}

void run_sequence_mode(const ScenarioConfig& cfg, ResultRecord& rec) {
  const json& p = cfg.params;
  SequenceConfig sc;
  sc.n_atoms = p["n_atoms"].get<long long>();
  sc.shots = p["shots"].get<long long>();
  sc.kappa_total = p["kappa"].get<double>();
  sc.eta_total = p["eta"].get<double>();
  sc.precession_angle = p["precession_angle"].get<double>();
  sc.pulse_error_rms = p["pulse_error_rms"].get<double>();
  sc.atom_jitter_rms = p["atom_jitter_rms"].get<double>();
  sc.stark_coeff = p["stark_coeff"].get<double>();
  sc.n_dr = p["n_dr"].get<double>();
  sc.flip_second_detuning = p["flip_second_detuning"].get<bool>();
  sc.hp_ratio = p["hp_ratio"].get<double>();
  sc.detector_noise_var = p["detector_noise_var"].get<double>();
  sc.seed = cfg.seed;

  const SequenceResult run = run_sequence(sc);
  if (p["emit_shots"].get<bool>()) {
    rec.series_columns = {"shot", "qnd1_outcome", "qnd2_outcome",
                          "population_signal", "estimator"};
    for (std::size_t i = 0; i < run.records.size(); ++i) {
      const auto& r = run.records[i];
      rec.series_rows.push_back({static_cast<double>(i), r.qnd1_outcome, r.qnd2_outcome,
                                 r.final_population_signal, r.estimator});
    }
  }
  rec.scalars["mean_estimator"] = {run.summary.mean_estimator, "rad"};
  rec.scalars["std_estimator"] = {run.summary.std_estimator, "rad"};
  rec.scalars["std_error_of_mean"] = {run.summary.std_error_of_mean, "rad"};
  rec.scalars["xi_predicted"] = {run.summary.xi_predicted, "dimensionless"};
  rec.scalars["predicted_std"] = {run.summary.predicted_std, "rad"};
  rec.scalars["kappa"] = {sc.kappa_total, "dimensionless"};
  rec.scalars["eta"] = {sc.eta_total, "dimensionless"};
}

CouplingRates rates_from_params(const json& p, double ratio) {
  CouplingRates rates;
  rates.nu1 = rates.nu2 = p["nu"].get<double>();
  rates.mu1 = rates.mu2 = ratio * rates.nu1;
  rates.extra_loss = p["extra_loss"].get<double>();
  return rates;
}

void run_epr(const ScenarioConfig& cfg, ResultRecord& rec) {
  const json& p = cfg.params;
  const double j = p["j_len"].get<double>();
  auto closed_form = [&](double ratio) { return 2.0 * j * (1.0 - ratio) / (1.0 + ratio); };

  if (cfg.sweep) {
    rec.series_columns = {"mu_over_nu", "criterion_value", "closed_form", "entangled"};
    for (double ratio : sweep_values(*cfg.sweep)) {
      const EPRState s = steady_state(rates_from_params(p, ratio), j);
      const auto crit = epr_criterion(s);
      rec.series_rows.push_back(
          {ratio, crit.value, closed_form(ratio), crit.entangled ? 1.0 : 0.0});
    }
    return;
  }
  const double ratio = p["mu_over_nu"].get<double>();
  const EPRState s = steady_state(rates_from_params(p, ratio), j);
  const auto crit = epr_criterion(s);
  rec.scalars["criterion_value"] = {crit.value, "dimensionless"};
  rec.scalars["criterion_closed_form"] = {closed_form(ratio), "dimensionless"};
  rec.scalars["entangled"] = {crit.entangled ? 1.0 : 0.0, "boolean"};
  rec.scalars["single_party_variance"] = {single_party_variance(s, 1), "dimensionless"};
  rec.scalars["two_j"] = {2.0 * j, "dimensionless"};
}

void run_protocol(const ScenarioConfig& cfg, ResultRecord& rec) {
  const json& p = cfg.params;
  const double j = p["j_len"].get<double>();
  const double ratio = p["mu_over_nu"].get<double>();
  const EPRState s = steady_state(rates_from_params(p, ratio), j);

  std::optional<Eavesdropper> eve;
  if (p["eavesdropper"].get<bool>()) {
    eve = Eavesdropper{p["meter_noise_var"].get<double>(),
                       p["resend_noise_var"].get<double>()};
  }
  ProtocolOptions opts;
  opts.significance = p["significance"].get<double>();
  const ProtocolTranscript tr =
      secret_time_protocol(s, p["rounds"].get<long long>(), eve, cfg.seed, opts);

  rec.series_columns = {"round", "choice1", "choice2", "outcome1", "outcome2", "sifted"};
  for (std::size_t i = 0; i < tr.rounds.size(); ++i) {
    const auto& r = tr.rounds[i];
    rec.series_rows.push_back({static_cast<double>(i), r.choice1 ? 1.0 : 0.0,
                               r.choice2 ? 1.0 : 0.0, r.outcome1, r.outcome2,
                               r.sifted ? 1.0 : 0.0});
    rec.transcript.push_back(json{{"round", i},
                                  {"choice1", r.choice1},
                                  {"choice2", r.choice2},
                                  {"outcome1", r.outcome1},
                                  {"outcome2", r.outcome2},
                                  {"sifted", r.sifted}});
  }
  rec.scalars["sift_fraction"] = {tr.sift_fraction, "dimensionless"};
  rec.scalars["joint_variance"] = {tr.joint_variance, "dimensionless"};
  rec.scalars["expected_variance"] = {tr.expected_variance, "dimensionless"};
  rec.scalars["eavesdrop_flag"] = {tr.eavesdrop_flag ? 1.0 : 0.0, "boolean"};
  rec.scalars["criterion_value"] = {epr_criterion(s).value, "dimensionless"};
}

}  // namespace

std::string to_string(ScenarioMode mode) {
  switch (mode) {
    case ScenarioMode::squeeze: return "squeeze";
    case ScenarioMode::cavity: return "cavity";
    case ScenarioMode::chain: return "chain";
    case ScenarioMode::sequence: return "sequence";
    case ScenarioMode::epr: return "epr";
    case ScenarioMode::protocol: return "protocol";
  }
  return "unknown";
}

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ScenarioConfig parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw scenario_parse_error("cannot open scenario file " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw scenario_parse_error(std::string("scenario parse error: ") + e.what());
  }
  return parse_scenario_json(doc, path.stem().string());
}

ScenarioConfig parse_scenario_json(const json& doc, const std::string& name) {
  if (!doc.is_object()) {
    throw scenario_validation_error("scenario root must be an object");
  }
  if (!doc.contains("mode")) {
    throw scenario_validation_error("missing key 'mode'");
  }
  ScenarioConfig cfg;
  cfg.mode = mode_from_string(get_str(doc, "mode", ""));
  const std::string section_name = to_string(cfg.mode);
  require_known_keys(doc, "scenario",
                     {"mode", "seed", "sweep", "output", "format", section_name});
  cfg.seed = static_cast<std::uint64_t>(get_int(doc, "seed", 1));
  cfg.base_name = name;

  if (doc.contains("sweep")) {
    const json& sw = doc["sweep"];
    require_known_keys(sw, "sweep", {"parameter", "from", "to", "steps"});
    SweepSpec spec;
    spec.parameter = get_str(sw, "parameter", "");
    spec.from = get_num(sw, "from", 0.0);
    spec.to = get_num(sw, "to", 0.0);
    spec.steps = static_cast<int>(get_int(sw, "steps", 0));
    if (spec.steps < 1) {
      throw scenario_validation_error("key 'steps' must be >= 1 (nonempty range)");
    }
    const auto& allowed = allowed_sweep_parameters(cfg.mode);
    if (!allowed.count(spec.parameter)) {
      throw scenario_validation_error("sweep parameter '" + spec.parameter +
                                      "' not supported in mode " + section_name);
    }
    cfg.sweep = spec;
  }

  if (doc.contains("output")) {
    const json& out = doc["output"];
    require_known_keys(out, "output", {"dir", "base_name"});
    cfg.out_dir = get_str(out, "dir", "");
    cfg.base_name = get_str(out, "base_name", cfg.base_name);
  }
  if (cfg.out_dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    cfg.out_dir = (env != nullptr && *env != '\0') ? env : ".";
  }
  const std::string fmt = get_str(doc, "format", "both");
  if (fmt == "csv") {
    cfg.format = OutputFormat::csv;
  } else if (fmt == "json") {
    cfg.format = OutputFormat::json;
  } else if (fmt == "both") {
    cfg.format = OutputFormat::both;
  } else {
    throw scenario_validation_error("key 'format' must be csv, json or both");
  }

  const json section = doc.contains(section_name) ? doc[section_name] : json::object();
  cfg.params = validate_mode_params(cfg.mode, section);
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"paper-chain-4", "paper-chain-8", "paper-cavity-sr", "paper-sequence-sr"};
}

json preset_scenario(const std::string& name) {
  if (name == "paper-chain-4" || name == "paper-chain-8") {
    return json{{"mode", "chain"},
                {"seed", 1},
                {"chain",
                 {{"clocks", name == "paper-chain-4" ? 4 : 8},
                  {"total_transmission", 0.5},
                  {"convention", "total_over_m"},
                  {"n_atoms", 1000},
                  {"d", 0.012},
                  {"finesse_last", 1e5},
                  {"eta", 0.5}}}};
  }
  if (name == "paper-cavity-sr") {
    // F = 1e5, 5 cm cavity, N = 1000 Sr atoms.
    return json{{"mode", "cavity"},
                {"seed", 1},
                {"cavity",
                 {{"n_atoms", 1000},
                  {"d", 0.012},
                  {"finesse", 1e5},
                  {"length", 0.05},
                  {"omega", 500e3},
                  {"big_gamma", 29e3},
                  {"gamma", 7e3}}}};
  }
  if (name == "paper-sequence-sr") {
    return json{{"mode", "sequence"},
                {"seed", 1},
                {"sequence",
                 {{"n_atoms", 1000},
                  {"shots", 20000},
                  {"d", 0.012},
                  {"finesse", 1e5},
                  {"eta", 0.5},
                  {"hp_ratio", 5.5},
                  {"emit_shots", false}}}};
  }
  throw scenario_validation_error("unknown preset '" + name + "'");
}

ResultRecord run(const ScenarioConfig& cfg) {
  ResultRecord rec;
  rec.mode = to_string(cfg.mode);
  rec.timestamp = iso_timestamp();
  rec.scenario_hash = fnv1a_hex(json{{"mode", rec.mode},
                                     {"seed", cfg.seed},
                                     {"params", cfg.params}}
                                    .dump());

  switch (cfg.mode) {
    case ScenarioMode::squeeze: run_squeeze(cfg, rec); break;
    case ScenarioMode::cavity: run_cavity(cfg, rec); break;
    case ScenarioMode::chain: run_chain(cfg, rec); break;
    case ScenarioMode::sequence: run_sequence_mode(cfg, rec); break;
    case ScenarioMode::epr: run_epr(cfg, rec); break;
    case ScenarioMode::protocol: run_protocol(cfg, rec); break;
  }

  std::filesystem::create_directories(cfg.out_dir);

  if (cfg.format != OutputFormat::json && !rec.series_rows.empty()) {
    std::string csv;
    for (std::size_t i = 0; i < rec.series_columns.size(); ++i) {
      if (i) csv += ',';
      csv += rec.series_columns[i];
    }
    csv += '\n';
    for (const auto& row : rec.series_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) csv += ',';
        csv += format_double(row[i]);
      }
      csv += '\n';
    }
    rec.csv_path = cfg.out_dir / (cfg.base_name + "_series.csv");
    atomic_write(rec.csv_path, csv);
  }

  if (!rec.transcript.empty() && cfg.format != OutputFormat::csv) {
    std::string lines;
    for (const auto& entry : rec.transcript) {
      lines += entry.dump();
      lines += '\n';
    }
    atomic_write(cfg.out_dir / (cfg.base_name + "_transcript.jsonl"), lines);
  }

  if (cfg.format != OutputFormat::csv) {
    json summary;
    summary["schema_version"] = rec.schema_version;
    summary["version"] = rec.version;
    summary["scenario_hash"] = rec.scenario_hash;
    summary["timestamp"] = rec.timestamp;
    summary["mode"] = rec.mode;
    summary["seed"] = cfg.seed;
    json scalars = json::object();
    for (const auto& [name, out] : rec.scalars) {
      scalars[name] = {{"value", out.value}, {"unit", out.unit}};
    }
    summary["outputs"] = scalars;
    if (!rec.csv_path.empty()) {
      summary["series_csv"] = rec.csv_path.filename().string();
    }
    rec.json_path = cfg.out_dir / (cfg.base_name + "_summary.json");
    atomic_write(rec.json_path, summary.dump(2) + "\n");
  }
  return rec;
}

}  // namespace clocknet
