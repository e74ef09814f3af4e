#include "channelstab/config.hpp"

#include <cstdlib>
#include <sstream>

#include "channelstab/errors.hpp"
#include "channelstab/io.hpp"

namespace cstab {

namespace {

template <class T>
T get(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Config, "config field '" + key + "' has the wrong type");
  }
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::Config, msg);
}

}  // namespace

void RunConfig::validate() const {
  check(schema_version == kConfigSchemaVersion, "unsupported schema_version " + std::to_string(schema_version));
  params.validate();
  check(n >= 16 && n % 2 == 0, "n must be even and at least 16");
  check(eta_target > 0.0, "eta_target must be positive");
  check(scan_limit >= 4, "scan_limit must be at least 4");
  check(K_max >= 0, "K_max must be non-negative");
  check(T > 0.0 && dt > 0.0 && dt <= T, "T and dt must be positive with dt <= T");
  check(record_every >= 1, "record_every must be positive");
  check(startup_steps >= 0, "startup_steps must be non-negative");
  check(threads >= 0, "threads must be non-negative");
  check(ic.amplitude > 0.0, "ic.amplitude must be positive");
  check(ic.recipe == "random-smooth" || ic.recipe == "unstable-eigenvector" || ic.recipe == "single-mode" ||
            ic.recipe == "zero",
        "unknown ic.recipe '" + ic.recipe + "'");
  check(ic.recipe != "single-mode" || ic.mode.has_value(), "ic.recipe single-mode needs ic.mode");
  check(!output_dir.empty(), "output_dir must not be empty");
  check(gamma_base >= 0.0, "gamma_base must be non-negative");
  parse_target_guess(phi_tg);
  parse_scheme(scheme);
}

TargetGuess parse_target_guess(const std::string& s) {
  if (s == "kink") return TargetGuess::Kink;
  if (s == "plus") return TargetGuess::PlusOne;
  if (s == "minus") return TargetGuess::MinusOne;
  if (s == "zero") return TargetGuess::Zero;
  throw Error(ErrorKind::Config, "phi_tg must be kink, plus, minus or zero");
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig c) {
  check(j.is_object(), "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const auto& v = *it;
    if (k == "schema_version") c.schema_version = get<int>(v, k);
    else if (k == "params") c.params = params_from_json(v, c.params);
    else if (k == "n") c.n = get<int>(v, k);
    else if (k == "eta_target") c.eta_target = get<double>(v, k);
    else if (k == "scan_limit") c.scan_limit = get<int>(v, k);
    else if (k == "K_max") c.K_max = get<int>(v, k);
    else if (k == "T") c.T = get<double>(v, k);
    else if (k == "dt") c.dt = get<double>(v, k);
    else if (k == "record_every") c.record_every = get<int>(v, k);
    else if (k == "scheme") c.scheme = get<std::string>(v, k);
    else if (k == "startup_steps") c.startup_steps = get<int>(v, k);
    else if (k == "output_dir") c.output_dir = get<std::string>(v, k);
    else if (k == "threads") c.threads = get<int>(v, k);
    else if (k == "phi_tg") c.phi_tg = get<std::string>(v, k);
    else if (k == "feedback") c.feedback = get<bool>(v, k);
    else if (k == "gamma_base") c.gamma_base = get<double>(v, k);
    else if (k == "actuator_a") c.actuator_a = v.is_null() ? std::nullopt : std::optional<cd>(complex_from_json(v));
    else if (k == "actuator_b") c.actuator_b = v.is_null() ? std::nullopt : std::optional<cd>(complex_from_json(v));
    else if (k == "ic") {
      check(v.is_object(), "ic must be an object");
      for (auto jt = v.begin(); jt != v.end(); ++jt) {
        const std::string& ik = jt.key();
        if (ik == "recipe") c.ic.recipe = get<std::string>(*jt, ik);
        else if (ik == "seed") c.ic.seed = get<std::uint64_t>(*jt, ik);
        else if (ik == "amplitude") c.ic.amplitude = get<double>(*jt, ik);
        else if (ik == "mode") {
          if (jt->is_null()) {
            c.ic.mode.reset();
          } else {
            check(jt->is_array() && jt->size() == 2, "ic.mode must be [k, l]");
            c.ic.mode = ModeIndex{get<int>((*jt)[0], ik), get<int>((*jt)[1], ik)};
          }
        } else throw Error(ErrorKind::Config, "unknown ic field '" + ik + "'");
      }
    } else if (k == "emit") {
      check(v.is_object(), "emit must be an object");
      for (auto jt = v.begin(); jt != v.end(); ++jt) {
        const std::string& ek = jt.key();
        const bool b = get<bool>(*jt, ek);
        if (ek == "spectra") c.emit.spectra = b;
        else if (ek == "gains") c.emit.gains = b;
        else if (ek == "energies") c.emit.energies = b;
        else if (ek == "states") c.emit.states = b;
        else throw Error(ErrorKind::Config, "unknown emit flag '" + ek + "'");
      }
    } else {
      throw Error(ErrorKind::Config, "unknown config field '" + k + "'");
    }
  }
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json ic = {{"recipe", c.ic.recipe}, {"seed", c.ic.seed}, {"amplitude", c.ic.amplitude}};
  ic["mode"] = c.ic.mode ? nlohmann::json{c.ic.mode->k, c.ic.mode->l} : nlohmann::json(nullptr);
  return {{"schema_version", c.schema_version},
          {"params", to_json(c.params)},
          {"n", c.n},
          {"eta_target", c.eta_target},
          {"scan_limit", c.scan_limit},
          {"K_max", c.K_max},
          {"T", c.T},
          {"dt", c.dt},
          {"record_every", c.record_every},
          {"scheme", c.scheme},
          {"startup_steps", c.startup_steps},
          {"ic", ic},
          {"output_dir", c.output_dir},
          {"emit",
           {{"spectra", c.emit.spectra}, {"gains", c.emit.gains}, {"energies", c.emit.energies},
            {"states", c.emit.states}}},
          {"threads", c.threads},
          {"phi_tg", c.phi_tg},
          {"feedback", c.feedback},
          {"actuator_a", c.actuator_a ? complex_json(*c.actuator_a) : nlohmann::json(nullptr)},
          {"actuator_b", c.actuator_b ? complex_json(*c.actuator_b) : nlohmann::json(nullptr)},
          {"gamma_base", c.gamma_base}};
}

RunConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json(path)); }

std::filesystem::path resolve_output_dir(const RunConfig& c) {
  const char* env = std::getenv("CHANNELSTAB_OUT");
  if (env && *env) return env;
  return c.output_dir;
}

cd parse_complex(const std::string& s) {
  std::istringstream is(s);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(is >> re)) throw Error(ErrorKind::Config, "cannot parse complex value '" + s + "'");
  if (is >> comma) {
    if (comma != ',' || !(is >> im)) throw Error(ErrorKind::Config, "cannot parse complex value '" + s + "'");
  }
  std::string rest;
  if (is >> rest) throw Error(ErrorKind::Config, "trailing characters in complex value '" + s + "'");
  return {re, im};
}

ModeIndex parse_mode(const std::string& s) {
  std::istringstream is(s);
  int k = 0, l = 0;
  char comma = 0;
  std::string rest;
  if (!(is >> k >> comma >> l) || comma != ',' || (is >> rest))
    throw Error(ErrorKind::Config, "cannot parse mode '" + s + "', expected k,l");
  return {k, l};
}

}  // namespace cstab
