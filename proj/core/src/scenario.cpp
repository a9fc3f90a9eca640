#include "rotorsim/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "rotorsim/decoherence.hpp"
#include "rotorsim/dynamics.hpp"
#include "rotorsim/errors.hpp"
#include "rotorsim/gates.hpp"
#include "rotorsim/readout.hpp"
#include "rotorsim/rng.hpp"
#include "rotorsim/units.hpp"
#include "rotorsim/version.hpp"

namespace rotorsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

ConfigError config_error(const std::string& path, const std::string& what) {
  return ConfigError(path.empty() ? what : path + ": " + what);
}

// Strict reader over one JSON object: typed getters record which keys were
// consumed, and done() rejects everything else, so misspelled keys fail
// loudly instead of silently falling back to defaults.
class Checker {
 public:
  Checker(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw config_error(path_, "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }
  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw config_error(child(key), "expected a number");
    return v->get<double>();
  }

  long long integer(const std::string& key, long long fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (v->is_number_integer() || v->is_number_unsigned()) return v->get<long long>();
    if (v->is_number_float()) {
      const double d = v->get<double>();
      if (std::nearbyint(d) == d && std::abs(d) < 9.0e15) return static_cast<long long>(d);
    }
    throw config_error(child(key), "expected an integer");
  }

  std::uint64_t useed(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    const long long i = v->is_number_integer() ? v->get<long long>() : -1;
    if (!v->is_number_integer() || i < 0)
      throw config_error(child(key), "expected a non-negative integer");
    return static_cast<std::uint64_t>(i);
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw config_error(child(key), "expected true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw config_error(child(key), "expected a string");
    return v->get<std::string>();
  }

  RotState rot_state(const std::string& key, RotState fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() ||
        !(*v)[1].is_number_integer())
      throw config_error(child(key), "expected [J, M] with integer entries");
    RotState s{(*v)[0].get<int>(), (*v)[1].get<int>()};
    if (s.j < 0 || s.j % 2 != 0)
      throw config_error(child(key), "J must be even and non-negative");
    if (std::abs(s.m) > s.j) throw config_error(child(key), "|M| must not exceed J");
    return s;
  }

  std::optional<Checker> object(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return Checker(*v, child(key));
  }

  Checker require_object(const std::string& key) {
    const json* v = find(key);
    if (!v) throw config_error(child(key), "required object is missing");
    return Checker(*v, child(key));
  }

  const json& require_array(const std::string& key) {
    const json* v = find(key);
    if (!v) throw config_error(child(key), "required array is missing");
    if (!v->is_array()) throw config_error(child(key), "expected an array");
    return *v;
  }

  const json& require_raw(const std::string& key) {
    const json* v = find(key);
    if (!v) throw config_error(child(key), "required key is missing");
    return *v;
  }

  void done() const {
    for (const auto& item : obj_.items())
      if (!used_.count(item.key())) throw config_error(child(item.key()), "unknown key");
  }

 private:
  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

void check(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw config_error(path, what);
}

double positive(Checker& c, const std::string& key, double fallback) {
  const double v = c.number(key, fallback);
  check(v > 0.0, c.child(key), "must be positive");
  return v;
}

double fraction(Checker& c, const std::string& key, double fallback) {
  const double v = c.number(key, fallback);
  check(v >= 0.0 && v <= 1.0, c.child(key), "must be in [0, 1]");
  return v;
}

// ---------------------------------------------------------------------------
// Scenario model

struct Common {
  std::string kind;
  std::string label;
  std::uint64_t seed = 1;
  int threads = 0;
  std::optional<std::string> format;   // from out.format
  std::optional<std::string> out_dir;  // from out.dir
};

struct RunContext {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string format = "csv";
  fs::path out_dir = ".";
  bool write_files = true;
  std::string stem;
};

struct KindOutput {
  json results;
  std::vector<ResultTable> tables;
  std::vector<fs::path> files;  // written by nested runs (sweep points)
};

struct ParsedScenario {
  Common common;
  std::optional<json> molecule_echo;
  std::function<json(const RunContext&)> fragment;  // kind-specific echo keys
  std::function<KindOutput(const RunContext&)> run;
};

struct MoleculeSpec {
  std::string name = "NS2+";
  double b0_hz = 3.44e9;
  double delta_alpha_a3 = 8.47;
  double g_r = -0.014;
  double mass_amu = 77.95;

  MoleculeParams params() const {
    return MoleculeParams::from_conventional(name, b0_hz, delta_alpha_a3, g_r, mass_amu);
  }
  json resolved() const {
    return json{{"name", name},
                {"b0_hz", b0_hz},
                {"delta_alpha_a3", delta_alpha_a3},
                {"g_r", g_r},
                {"mass_amu", mass_amu}};
  }
};

Common parse_common(Checker& top, const json& doc) {
  Common c;
  const std::string schema = top.text("schema", scenario_schema);
  check(schema == scenario_schema, "schema",
        "unsupported schema '" + schema + "' (expected " + std::string(scenario_schema) + ")");
  if (!doc.contains("kind")) throw config_error("kind", "required key is missing");
  c.kind = top.text("kind", "");
  c.label = top.text("label", c.kind);
  check(!c.label.empty(), "label", "must not be empty");
  c.seed = top.useed("seed", 1);
  c.threads = static_cast<int>(top.integer("threads", 0));
  check(c.threads >= 0, "threads", "must be non-negative");
  if (auto out = top.object("out")) {
    if (out->has("dir")) c.out_dir = out->text("dir", ".");
    if (out->has("format")) {
      const std::string f = out->text("format", "csv");
      check(f == "csv" || f == "json", out->child("format"), "expected \"csv\" or \"json\"");
      c.format = f;
    }
    out->done();
  }
  return c;
}

MoleculeSpec parse_molecule(Checker& top) {
  MoleculeSpec m;
  if (auto c = top.object("molecule")) {
    m.name = c->text("name", m.name);
    m.b0_hz = positive(*c, "b0_hz", m.b0_hz);
    m.delta_alpha_a3 = c->number("delta_alpha_a3", m.delta_alpha_a3);
    check(m.delta_alpha_a3 != 0.0, c->child("delta_alpha_a3"), "must be nonzero");
    m.g_r = c->number("g_r", m.g_r);
    m.mass_amu = positive(*c, "mass_amu", m.mass_amu);
    c->done();
  }
  return m;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

std::string rot_label(const RotState& s) {
  return "J" + std::to_string(s.j) + "M" + std::to_string(s.m);
}

json rot_json(const RotState& s) { return json::array({s.j, s.m}); }

// ---------------------------------------------------------------------------
// rabi

ParsedScenario parse_rabi(Checker& top, const json& doc) {
  ParsedScenario p;
  p.common = parse_common(top, doc);
  const MoleculeSpec mol = parse_molecule(top);
  p.molecule_echo = mol.resolved();

  RabiScenario sc;
  sc.molecule = mol.params();
  sc.propagation.tolerance = 1e-6;
  std::string drive = "linear";
  double detuning_hz = 0.0;
  double rwa_cutoff_hz = 0.0;  // 0 means "no cutoff"
  std::string restriction = "all";
  std::string frame = "interaction";
  if (auto c = top.object("rabi")) {
    drive = c->text("drive", drive);
    check(drive == "linear" || drive == "rotating", c->child("drive"),
          "expected \"linear\" or \"rotating\"");
    sc.from = c->rot_state("from", sc.from);
    sc.to = c->rot_state("to", sc.to);
    sc.intensity_w_cm2 = positive(*c, "intensity_w_cm2", sc.intensity_w_cm2);
    detuning_hz = c->number("detuning_hz", 0.0);
    sc.phase = c->number("phase_rad", 0.0);
    sc.stark_corrected = c->boolean("stark_corrected", true);
    sc.duration = c->number("duration_s", 0.0);
    check(sc.duration >= 0.0, c->child("duration_s"), "must be non-negative (0 = auto)");
    sc.samples = static_cast<int>(c->integer("samples", sc.samples));
    check(sc.samples >= 2, c->child("samples"), "need at least 2 samples");
    sc.j_max = static_cast<int>(c->integer("j_max", sc.j_max));
    restriction = c->text("m_restriction", restriction);
    frame = c->text("frame", frame);
    if (c->has("rwa_cutoff_hz")) rwa_cutoff_hz = positive(*c, "rwa_cutoff_hz", 0.0);
    sc.propagation.tolerance = positive(*c, "tolerance", sc.propagation.tolerance);
    check(sc.propagation.tolerance < 1.0, c->child("tolerance"), "must be below 1");
    c->done();
  }
  top.done();

  sc.kind = drive == "linear" ? DriveKind::LinearPair : DriveKind::RotatingPair;
  sc.detuning = units::hz_to_rad(detuning_hz);
  sc.rwa_cutoff = rwa_cutoff_hz > 0.0 ? units::hz_to_rad(rwa_cutoff_hz)
                                      : std::numeric_limits<double>::infinity();
  check(sc.j_max >= std::max({2, sc.from.j, sc.to.j}), "rabi.j_max",
        "must reach both drive levels");
  if (restriction == "all") sc.restriction = MRestriction::All;
  else if (restriction == "even") sc.restriction = MRestriction::EvenM;
  else if (restriction == "zero") sc.restriction = MRestriction::ZeroM;
  else throw config_error("rabi.m_restriction", "expected \"all\", \"even\" or \"zero\"");
  if (frame == "interaction") sc.frame = Frame::Interaction;
  else if (frame == "lab") sc.frame = Frame::Lab;
  else throw config_error("rabi.frame", "expected \"interaction\" or \"lab\"");

  check(!(sc.from == sc.to), "rabi.to", "drive levels must differ");
  const RotorBasis rb = RotorBasis::even_states(sc.j_max, sc.restriction);
  check(rb.contains(sc.from), "rabi.from", "state outside the restricted basis");
  check(rb.contains(sc.to), "rabi.to", "state outside the restricted basis");
  check(transition_rabi(sc.molecule, sc.kind, 1.0, sc.from, sc.to) != 0.0, "rabi.to",
        "selection rules forbid this drive (check dJ, dM against the polarization)");

  json frag;
  frag["rabi"] = {{"drive", drive},
                  {"from", rot_json(sc.from)},
                  {"to", rot_json(sc.to)},
                  {"intensity_w_cm2", sc.intensity_w_cm2},
                  {"detuning_hz", detuning_hz},
                  {"phase_rad", sc.phase},
                  {"stark_corrected", sc.stark_corrected},
                  {"duration_s", sc.duration},
                  {"samples", sc.samples},
                  {"j_max", sc.j_max},
                  {"m_restriction", restriction},
                  {"frame", frame},
                  {"tolerance", sc.propagation.tolerance}};
  if (rwa_cutoff_hz > 0.0) frag["rabi"]["rwa_cutoff_hz"] = rwa_cutoff_hz;
  p.fragment = [frag](const RunContext&) { return frag; };

  p.run = [sc](const RunContext&) {
    const RabiResult r = simulate_rabi_flopping(sc);
    KindOutput out;
    out.results = {{"predicted_rabi_hz", units::rad_to_hz(r.predicted_rabi)},
                   {"fitted_rabi_hz", units::rad_to_hz(r.fitted_rabi)},
                   {"generalized_rabi_hz", units::rad_to_hz(r.generalized_rabi)},
                   {"fit_residual_rms", r.fit_residual_rms},
                   {"max_pair_leakage", r.max_pair_leakage},
                   {"max_symmetry_leakage", r.max_symmetry_leakage},
                   {"duration_s", r.times.empty() ? 0.0 : r.times.back()},
                   {"norm_drift", r.stats.norm_drift},
                   {"steps", r.stats.total_steps}};
    ResultTable t;
    t.name = "populations";
    const RotorBasis rb = RotorBasis::even_states(sc.j_max, sc.restriction);
    if (rb.size() != r.populations.cols())
      throw SimulationError("population trace does not match the rotor basis");
    t.columns.push_back("time_s");
    for (const RotState& s : rb.states()) t.columns.push_back("population_" + rot_label(s));
    for (int i = 0; i < static_cast<int>(r.times.size()); ++i) {
      std::vector<double> row;
      row.reserve(rb.size() + 1);
      row.push_back(r.times[i]);
      for (int k = 0; k < rb.size(); ++k) row.push_back(r.populations(i, k));
      t.rows.push_back(std::move(row));
    }
    out.tables.push_back(std::move(t));
    return out;
  };
  return p;
}

// ---------------------------------------------------------------------------
// gate-cz / gate-cnot / gate-sm

json pulse_json(const PulseReport& p) {
  return json{{"role", p.role},
              {"start_s", p.start},
              {"duration_s", p.duration},
              {"beat_hz", units::rad_to_hz(p.beat)},
              {"phase_rad", p.phase},
              {"e0_sq", p.e0_sq}};
}

ResultTable pulse_table(const std::vector<PulseReport>& pulses) {
  ResultTable t;
  t.name = "pulses";
  t.columns = {"pulse", "start_s", "duration_s", "beat_hz", "phase_rad", "e0_sq"};
  for (std::size_t i = 0; i < pulses.size(); ++i)
    t.rows.push_back({static_cast<double>(i), pulses[i].start, pulses[i].duration,
                      units::rad_to_hz(pulses[i].beat), pulses[i].phase, pulses[i].e0_sq});
  return t;
}

json matrix_json(const Eigen::Matrix4cd& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int k = 0; k < 4; ++k) row.push_back(json::array({m(i, k).real(), m(i, k).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ParsedScenario parse_gate_cz(Checker& top, const json& doc, bool cnot) {
  ParsedScenario p;
  p.common = parse_common(top, doc);
  const MoleculeSpec mol = parse_molecule(top);
  p.molecule_echo = mol.resolved();

  TwoIonParams params;
  params.molecule = mol.params();
  double nu_hz = 1.0e6, rabi_hz = 1.0e4, rwa_hz = 5.0e7;
  if (auto c = top.object("gate")) {
    nu_hz = positive(*c, "nu_hz", nu_hz);
    params.eta = c->number("eta", params.eta);
    check(params.eta > 0.0 && params.eta < 1.0, c->child("eta"), "must be in (0, 1)");
    rabi_hz = positive(*c, "rabi_hz", rabi_hz);
    params.j_max = static_cast<int>(c->integer("j_max", params.j_max));
    check(params.j_max >= 2, c->child("j_max"), "must reach the auxiliary level (J = 2)");
    params.n_max = static_cast<int>(c->integer("n_max", params.n_max));
    check(params.n_max >= 2, c->child("n_max"), "need at least 2 motional levels");
    rwa_hz = positive(*c, "rwa_cutoff_hz", rwa_hz);
    params.propagation.tolerance = positive(*c, "tolerance", params.propagation.tolerance);
    c->done();
  }
  top.done();
  params.nu = units::hz_to_rad(nu_hz);
  params.rabi = units::hz_to_rad(rabi_hz);
  params.rwa_cutoff = units::hz_to_rad(rwa_hz);
  check(params.rabi < params.nu, "gate.rabi_hz",
        "carrier Rabi frequency must stay below the mode frequency");

  json frag;
  frag["gate"] = {{"nu_hz", nu_hz},
                  {"eta", params.eta},
                  {"rabi_hz", rabi_hz},
                  {"j_max", params.j_max},
                  {"n_max", params.n_max},
                  {"rwa_cutoff_hz", rwa_hz},
                  {"tolerance", params.propagation.tolerance}};
  p.fragment = [frag](const RunContext&) { return frag; };

  p.run = [params, cnot](const RunContext& ctx) {
    TwoIonParams run_params = params;
    run_params.threads = static_cast<unsigned>(ctx.threads);
    KindOutput out;
    if (cnot) {
      const CnotGateResult r = simulate_cnot(run_params);
      out.results = {{"truth_fidelity", r.truth_fidelity},
                     {"worst_truth_fidelity", r.worst_truth_fidelity},
                     {"bell_fidelity", r.bell_fidelity},
                     {"max_leakage", r.max_leakage},
                     {"duration_s", r.duration},
                     {"virtual_z", {{"control_rad", r.ledger.control}, {"target_rad", r.ledger.target}}},
                     {"corrected", matrix_json(r.corrected)},
                     {"steps", r.total_steps}};
      json pj = json::array();
      for (const auto& pr : r.pulses) pj.push_back(pulse_json(pr));
      out.results["pulses"] = std::move(pj);
      out.tables.push_back(pulse_table(r.pulses));
    } else {
      const CzGateResult r = simulate_cz(run_params);
      out.results = {{"entangling_phase_rad", r.entangling_phase},
                     {"truth_fidelity", r.truth_fidelity},
                     {"worst_truth_fidelity", r.worst_truth_fidelity},
                     {"max_leakage", r.max_leakage},
                     {"duration_s", r.duration},
                     {"virtual_z", {{"control_rad", r.ledger.control}, {"target_rad", r.ledger.target}}},
                     {"corrected", matrix_json(r.corrected)},
                     {"steps", r.total_steps}};
      json pj = json::array();
      for (const auto& pr : r.pulses) pj.push_back(pulse_json(pr));
      out.results["pulses"] = std::move(pj);
      out.tables.push_back(pulse_table(r.pulses));
    }
    return out;
  };
  return p;
}

ParsedScenario parse_gate_sm(Checker& top, const json& doc) {
  ParsedScenario p;
  p.common = parse_common(top, doc);
  const MoleculeSpec mol = parse_molecule(top);
  p.molecule_echo = mol.resolved();

  MsGateParams params;
  params.molecule = mol.params();
  double nu_hz = 1.0e6, rabi_hz = 2.5e4, delta_hz = 5.0e3, rwa_hz = 5.0e7;
  if (auto c = top.object("gate")) {
    nu_hz = positive(*c, "nu_hz", nu_hz);
    params.eta = c->number("eta", params.eta);
    check(params.eta > 0.0 && params.eta < 1.0, c->child("eta"), "must be in (0, 1)");
    rabi_hz = positive(*c, "rabi_hz", rabi_hz);
    delta_hz = positive(*c, "delta_hz", delta_hz);
    params.j_max = static_cast<int>(c->integer("j_max", params.j_max));
    check(params.j_max >= 2, c->child("j_max"), "must be at least 2");
    params.nbar = c->number("nbar", params.nbar);
    check(params.nbar >= 0.0, c->child("nbar"), "must be non-negative");
    params.thermal_tail = c->number("thermal_tail", params.thermal_tail);
    check(params.thermal_tail > 0.0 && params.thermal_tail < 1.0, c->child("thermal_tail"),
          "must be in (0, 1)");
    params.n_headroom = static_cast<int>(c->integer("n_headroom", params.n_headroom));
    check(params.n_headroom >= 1, c->child("n_headroom"), "must be at least 1");
    rwa_hz = positive(*c, "rwa_cutoff_hz", rwa_hz);
    params.propagation.tolerance = positive(*c, "tolerance", params.propagation.tolerance);
    c->done();
  }
  top.done();
  params.nu = units::hz_to_rad(nu_hz);
  params.rabi = units::hz_to_rad(rabi_hz);
  params.delta = units::hz_to_rad(delta_hz);
  params.rwa_cutoff = units::hz_to_rad(rwa_hz);
  check(params.delta < params.nu, "gate.delta_hz", "gate detuning must stay below the mode");

  json frag;
  frag["gate"] = {{"nu_hz", nu_hz},
                  {"eta", params.eta},
                  {"rabi_hz", rabi_hz},
                  {"delta_hz", delta_hz},
                  {"j_max", params.j_max},
                  {"nbar", params.nbar},
                  {"thermal_tail", params.thermal_tail},
                  {"n_headroom", params.n_headroom},
                  {"rwa_cutoff_hz", rwa_hz},
                  {"tolerance", params.propagation.tolerance}};
  p.fragment = [frag](const RunContext&) { return frag; };

  p.run = [params](const RunContext& ctx) {
    MsGateParams run_params = params;
    run_params.threads = static_cast<unsigned>(ctx.threads);
    const MsGateResult r = simulate_ms(run_params);
    KindOutput out;
    out.results = {{"thermal_fidelity", r.thermal_fidelity},
                   {"min_run_fidelity", r.min_run_fidelity},
                   {"max_run_fidelity", r.max_run_fidelity},
                   {"ledger_z_rad", r.ledger_z},
                   {"duration_s", r.duration},
                   {"steps", r.total_steps}};
    ResultTable t;
    t.name = "fock_runs";
    t.columns = {"n", "weight", "fidelity", "phonon_return"};
    for (const MsFockRun& run : r.runs)
      t.rows.push_back({static_cast<double>(run.n), run.weight, run.fidelity, run.phonon_return});
    out.tables.push_back(std::move(t));
    return out;
  };
  return p;
}

// ---------------------------------------------------------------------------
// readout

ParsedScenario parse_readout(Checker& top, const json& doc) {
  ParsedScenario p;
  p.common = parse_common(top, doc);
  const MoleculeSpec mol = parse_molecule(top);
  p.molecule_echo = mol.resolved();

  AtomicIonModel atom;
  double atom_rabi_hz = 5.0e4;
  if (auto c = top.object("atom")) {
    atom.detection.bright_mean = positive(*c, "bright_mean", atom.detection.bright_mean);
    atom.detection.dark_mean = c->number("dark_mean", atom.detection.dark_mean);
    check(atom.detection.dark_mean >= 0.0, c->child("dark_mean"), "must be non-negative");
    atom.detection.threshold = static_cast<int>(c->integer("threshold", atom.detection.threshold));
    check(atom.detection.threshold >= 1, c->child("threshold"), "must be at least 1");
    check(atom.detection.threshold > atom.detection.dark_mean, c->child("threshold"),
          "must exceed the dark count mean");
    check(atom.detection.threshold <= atom.detection.bright_mean, c->child("threshold"),
          "must not exceed the bright count mean");
    atom.eta = c->number("eta", atom.eta);
    check(atom.eta > 0.0 && atom.eta < 1.0, c->child("eta"), "must be in (0, 1)");
    atom_rabi_hz = positive(*c, "rabi_hz", units::rad_to_hz(atom.rabi));
    c->done();
  }
  atom.rabi = units::hz_to_rad(atom_rabi_hz);

  ReadoutConfig config;
  if (auto c = top.object("protocol")) {
    config.repetitions = static_cast<int>(c->integer("repetitions", config.repetitions));
    check(config.repetitions >= 1, c->child("repetitions"), "must be at least 1");
    config.pulse_infidelity = fraction(*c, "pulse_infidelity", 0.0);
    config.cooling_error = fraction(*c, "cooling_error", 0.0);
    config.prep_error = fraction(*c, "prep_error", 0.0);
    config.classification_error = fraction(*c, "classification_error", 0.0);
    config.read_state = c->rot_state("read_state", config.read_state);
    check(config.read_state.m == 0, c->child("read_state"), "must lie on the M = 0 ladder");
    check(config.read_state.j >= 4, c->child("read_state"),
          "must be distinct from both qubit levels (J >= 4)");
    c->done();
  }
  const long long trials = top.integer("trials", 10000);
  check(trials >= 1, "trials", "must be at least 1");
  top.done();

  json frag;
  frag["atom"] = {{"bright_mean", atom.detection.bright_mean},
                  {"dark_mean", atom.detection.dark_mean},
                  {"threshold", atom.detection.threshold},
                  {"eta", atom.eta},
                  {"rabi_hz", atom_rabi_hz}};
  frag["protocol"] = {{"repetitions", config.repetitions},
                      {"pulse_infidelity", config.pulse_infidelity},
                      {"cooling_error", config.cooling_error},
                      {"prep_error", config.prep_error},
                      {"classification_error", config.classification_error},
                      {"read_state", rot_json(config.read_state)}};
  frag["trials"] = trials;
  p.fragment = [frag](const RunContext&) { return frag; };

  const MoleculeParams molecule = mol.params();
  p.run = [atom, config, trials, molecule](const RunContext& ctx) {
    const AssignmentEstimate est = readout_assignment_fidelity(
        atom, config, trials, ctx.seed, molecule, static_cast<unsigned>(ctx.threads));
    KindOutput out;
    out.results = {{"fidelity", est.fidelity},
                   {"ci_low", est.ci_low},
                   {"ci_high", est.ci_high},
                   {"errors_down", est.errors_down},
                   {"errors_up", est.errors_up},
                   {"trials_per_input", est.trials}};

    // One example shot from the upper qubit level, round by round.
    const int j_max = std::max(4, std::max(config.read_state.j, 2));
    const BasisPtr basis = readout_basis(molecule, j_max);
    const int up = basis->rotor(0).basis.require_index(RotState{2, 0});
    const JointState input = JointState::basis_state(basis, {up, 0, 0});
    const ReadoutResult demo = readout_protocol(
        input, atom, config, RandomStream::root(ctx.seed).derive(2 * static_cast<std::uint64_t>(trials)));
    out.results["example_outcome"] = demo.outcome == ReadoutOutcome::Up ? "up" : "down";
    ResultTable t;
    t.name = "rounds";
    t.columns = {"round", "photons", "bright"};
    for (std::size_t i = 0; i < demo.rounds.size(); ++i)
      t.rows.push_back({static_cast<double>(i), static_cast<double>(demo.rounds[i].photons),
                        demo.rounds[i].bright ? 1.0 : 0.0});
    out.tables.push_back(std::move(t));
    return out;
  };
  return p;
}

// ---------------------------------------------------------------------------
// decoherence

struct QubitSpec {
  std::string type = "rotational";
  RotState lower{2, -2};
  RotState upper{2, 2};

  DephasingQubit build(const ZeemanModel& model) const {
    return type == "electronic" ? electronic_spin_qubit() : rotational_qubit(lower, upper, model);
  }
  json resolved() const {
    if (type == "electronic") return json{{"type", type}};
    return json{{"type", type}, {"lower", rot_json(lower)}, {"upper", rot_json(upper)}};
  }
};

QubitSpec parse_qubit(Checker& c) {
  QubitSpec q;
  q.type = c.text("type", q.type);
  if (q.type == "electronic") {
    c.done();
    return q;
  }
  check(q.type == "rotational", c.child("type"), "expected \"rotational\" or \"electronic\"");
  q.lower = c.rot_state("lower", q.lower);
  q.upper = c.rot_state("upper", q.upper);
  check(!(q.lower == q.upper), c.child("upper"), "qubit levels must differ");
  c.done();
  return q;
}

json curve_json(const CoherenceCurve& c) {
  return json{{"t2_s", finite_or_null(c.t2)},
              {"fit_model", c.fit_model},
              {"fit_rms", c.fit_rms},
              {"fit_ok", c.fit_ok}};
}

ResultTable curve_table(const std::string& name, const CoherenceCurve& c) {
  ResultTable t;
  t.name = name;
  t.columns = {"time_s", "coherence"};
  for (std::size_t i = 0; i < c.times.size(); ++i) t.rows.push_back({c.times[i], c.coherence[i]});
  return t;
}

ParsedScenario parse_decoherence(Checker& top, const json& doc) {
  ParsedScenario p;
  p.common = parse_common(top, doc);
  const MoleculeSpec mol = parse_molecule(top);
  p.molecule_echo = mol.resolved();
  const ZeemanModel zeeman{mol.g_r};

  NoiseProcess process;
  process.tau_c = 2.0e4;
  if (auto c = top.object("noise")) {
    process.sigma_b = positive(*c, "sigma_b_t", process.sigma_b);
    process.tau_c = positive(*c, "tau_c_s", process.tau_c);
    c->done();
  }
  const std::string mode = top.text("mode", "compare");
  check(mode == "compare" || mode == "ramsey", "mode", "expected \"compare\" or \"ramsey\"");

  std::vector<QubitSpec> qubits;
  if (top.has("qubits")) {
    const json& arr = top.require_array("qubits");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Checker qc(arr[i], "qubits." + std::to_string(i));
      qubits.push_back(parse_qubit(qc));
    }
  } else if (mode == "compare") {
    qubits.push_back(QubitSpec{"electronic", {}, {}});
    qubits.push_back(QubitSpec{});  // stretched |2,-2> / |2,2> pair
  } else {
    qubits.push_back(QubitSpec{});
  }
  check(qubits.size() == (mode == "compare" ? 2u : 1u), "qubits",
        mode == "compare" ? "compare mode takes exactly two qubits"
                          : "ramsey mode takes exactly one qubit");

  const long long trials = top.integer("trials", 2000);
  const int points = static_cast<int>(top.integer("points", 40));
  check(points >= 4, "points", "need at least 4 points for the decay fit");

  double t_max_s = 0.0;
  double window_t2_factor = 2.0;
  if (mode == "ramsey") {
    check(top.has("t_max_s"), "t_max_s", "required key is missing");
    t_max_s = positive(top, "t_max_s", 0.0);
    check(trials >= 1, "trials", "must be at least 1");
  } else {
    window_t2_factor = positive(top, "window_t2_factor", window_t2_factor);
    check(trials >= 10, "trials", "compare mode needs at least 10 trials (jackknife blocks)");
    for (std::size_t i = 0; i < qubits.size(); ++i)
      check(qubits[i].build(zeeman).sensitivity != 0.0, "qubits." + std::to_string(i),
            "field-insensitive qubit never decays; use ramsey mode for it");
  }
  top.done();

  json frag;
  frag["noise"] = {{"sigma_b_t", process.sigma_b}, {"tau_c_s", process.tau_c}};
  frag["mode"] = mode;
  frag["qubits"] = json::array();
  for (const QubitSpec& q : qubits) frag["qubits"].push_back(q.resolved());
  frag["trials"] = trials;
  frag["points"] = points;
  if (mode == "ramsey") frag["t_max_s"] = t_max_s;
  else frag["window_t2_factor"] = window_t2_factor;
  p.fragment = [frag](const RunContext&) { return frag; };

  if (mode == "ramsey") {
    const QubitSpec spec = qubits[0];
    p.run = [spec, zeeman, process, trials, points, t_max_s](const RunContext& ctx) {
      const DephasingQubit qubit = spec.build(zeeman);
      std::vector<double> times(points);
      for (int i = 0; i < points; ++i) times[i] = t_max_s * (i + 1) / points;
      const CoherenceCurve curve = ramsey_decay(qubit, process, times, trials, ctx.seed,
                                                static_cast<unsigned>(ctx.threads));
      KindOutput out;
      out.results = curve_json(curve);
      out.results["label"] = qubit.label;
      out.results["sensitivity_rad_per_t"] = qubit.sensitivity;
      out.results["min_coherence"] =
          *std::min_element(curve.coherence.begin(), curve.coherence.end());
      out.tables.push_back(curve_table("coherence", curve));
      return out;
    };
    return p;
  }

  const QubitSpec spec_a = qubits[0];
  const QubitSpec spec_b = qubits[1];
  p.run = [spec_a, spec_b, zeeman, process, trials, points, window_t2_factor](const RunContext& ctx) {
    const DephasingQubit a = spec_a.build(zeeman);
    const DephasingQubit b = spec_b.build(zeeman);
    CompareOptions opts;
    opts.trials = trials;
    opts.points = points;
    opts.window_t2_factor = window_t2_factor;
    opts.threads = static_cast<unsigned>(ctx.threads);
    const CoherenceComparison cmp = compare_coherence(a, b, process, ctx.seed, opts);
    KindOutput out;
    out.results = {{"qubit_a", {{"label", a.label}, {"sensitivity_rad_per_t", a.sensitivity}}},
                   {"qubit_b", {{"label", b.label}, {"sensitivity_rad_per_t", b.sensitivity}}},
                   {"curve_a", curve_json(cmp.a)},
                   {"curve_b", curve_json(cmp.b)},
                   {"sensitivity_ratio", cmp.sensitivity_ratio},
                   {"t2_ratio", finite_or_null(cmp.t2_ratio)},
                   {"t2_ratio_ci", {finite_or_null(cmp.t2_ratio_ci_low), finite_or_null(cmp.t2_ratio_ci_high)}},
                   {"chi_ratio", finite_or_null(cmp.chi_ratio)},
                   {"predicted_chi_ratio", cmp.predicted_chi_ratio}};
    out.tables.push_back(curve_table("coherence_a", cmp.a));
    out.tables.push_back(curve_table("coherence_b", cmp.b));
    return out;
  };
  return p;
}

// ---------------------------------------------------------------------------
// sweep

ParsedScenario parse_scenario(const json& doc);

struct Internals {
  ParsedScenario parsed;
  RunContext ctx;
  json echo;
};

Internals prepare(const json& doc, const RunOptions& options);
ScenarioOutcome execute(Internals& in);

json point_document(const json& base, const std::string& path, const json& value,
                    std::uint64_t seed, const std::string& label) {
  json doc = base;
  json* node = &doc;
  std::string part;
  std::istringstream split(path);
  std::vector<std::string> parts;
  while (std::getline(split, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    check(!parts[i].empty(), "axis.path", "empty path component");
    check(node->contains(parts[i]), "axis.path",
          "base has no object '" + parts[i] + "' to descend into");
    node = &(*node)[parts[i]];
    check(node->is_object(), "axis.path", "'" + parts[i] + "' is not an object");
  }
  check(!parts.empty() && !parts.back().empty(), "axis.path", "must name a key");
  (*node)[parts.back()] = value;
  doc["seed"] = seed;
  doc["label"] = label;
  return doc;
}

std::string point_label(std::size_t k, std::size_t count) {
  int width = 2;
  for (std::size_t c = 100; c < count; c *= 10) ++width;
  char buf[32];
  std::snprintf(buf, sizeof buf, "point-%0*d", width, static_cast<int>(k));
  return buf;
}

void flatten_numeric(const json& j, const std::string& prefix,
                     std::map<std::string, double>& out) {
  if (j.is_number()) {
    out[prefix] = j.get<double>();
  } else if (j.is_boolean()) {
    out[prefix] = j.get<bool>() ? 1.0 : 0.0;
  } else if (j.is_object()) {
    for (const auto& item : j.items())
      flatten_numeric(item.value(), prefix.empty() ? item.key() : prefix + "." + item.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten_numeric(j[i], prefix + "." + std::to_string(i), out);
  }
}

ParsedScenario parse_sweep(Checker& top, const json& doc) {
  ParsedScenario p;
  p.common = parse_common(top, doc);

  Checker axis = top.require_object("axis");
  const std::string path = axis.text("path", "");
  check(!path.empty(), "axis.path", "required key is missing");
  const json values = axis.require_array("values");
  check(!values.empty(), "axis.values", "must not be empty");
  axis.done();

  const json& base = top.require_raw("base");
  check(base.is_object(), "base", "expected an object");
  check(base.value("kind", "") != "sweep", "base.kind", "sweeps cannot nest");
  top.done();

  // Base seed: CLI override > sweep seed > base seed > 1.
  std::uint64_t base_seed = p.common.seed;
  if (!doc.contains("seed") && base.contains("seed")) {
    Checker bc(base, "base");
    base_seed = bc.useed("seed", 1);
  }
  p.common.seed = base_seed;

  // Validate every point now so a bad axis value fails before anything runs.
  for (std::size_t k = 0; k < values.size(); ++k) {
    json pd = point_document(base, path, values[k], base_seed + k, point_label(k, values.size()));
    try {
      parse_scenario(pd);
    } catch (const ConfigError& e) {
      throw config_error("axis.values." + std::to_string(k), e.what());
    }
  }

  const json base_copy = base;
  p.fragment = [path, values, base_copy](const RunContext& ctx) {
    // Echo the base as it will run: resolved, minus the keys the sweep owns.
    json pd = base_copy;
    pd["seed"] = ctx.seed;
    RunOptions opts;
    opts.threads = ctx.threads;
    opts.format = ctx.format;
    opts.write_files = false;
    json base_echo = prepare(pd, opts).echo;
    base_echo.erase("label");
    base_echo.erase("out");
    return json{{"axis", {{"path", path}, {"values", values}}}, {"base", base_echo}};
  };

  const std::string axis_path = path;
  p.run = [base_copy, axis_path, values](const RunContext& ctx) {
    KindOutput out;
    const fs::path points_dir = ctx.out_dir / ctx.stem;
    json rows = json::array();
    ResultTable table;
    table.name = "sweep";
    std::vector<std::map<std::string, double>> flat(values.size());
    const bool numeric_axis =
        std::all_of(values.begin(), values.end(), [](const json& v) { return v.is_number(); });

    for (std::size_t k = 0; k < values.size(); ++k) {
      const json point_doc = point_document(base_copy, axis_path, values[k], ctx.seed + k,
                                            point_label(k, values.size()));
      RunOptions opts;
      opts.format = ctx.format;
      opts.threads = ctx.threads;
      opts.out_dir = points_dir;
      opts.write_files = ctx.write_files;
      Internals in = prepare(point_doc, opts);

      const fs::path done_file = points_dir / (in.ctx.stem + ".json");
      json results;
      bool reused = false;
      if (ctx.write_files && fs::exists(done_file)) {
        std::ifstream f(done_file);
        json existing = json::parse(f, nullptr, false);
        if (existing.is_object() && existing.value("schema", "") == result_schema &&
            existing.contains("scenario") && existing["scenario"] == in.echo &&
            existing.contains("results")) {
          results = existing["results"];
          reused = true;
          out.files.push_back(done_file);
        }
      }
      if (!reused) {
        ScenarioOutcome point_out = execute(in);
        results = point_out.document["results"];
        out.files.insert(out.files.end(), point_out.files.begin(), point_out.files.end());
      }

      rows.push_back({{"point", k},
                      {"value", values[k]},
                      {"label", in.ctx.stem},
                      {"seed", in.ctx.seed},
                      {"results", results}});
      flatten_numeric(results, "", flat[k]);
    }

    out.results = {{"axis_path", axis_path},
                   {"values", values},
                   {"points", values.size()},
                   {"rows", std::move(rows)}};

    std::set<std::string> keys;
    for (const auto& f : flat)
      for (const auto& kv : f) keys.insert(kv.first);
    table.columns.push_back("point");
    if (numeric_axis) table.columns.push_back("value");
    for (const std::string& key : keys) table.columns.push_back(key);
    for (std::size_t k = 0; k < values.size(); ++k) {
      std::vector<double> row;
      row.push_back(static_cast<double>(k));
      if (numeric_axis) row.push_back(values[k].get<double>());
      for (const std::string& key : keys) {
        auto it = flat[k].find(key);
        row.push_back(it == flat[k].end() ? std::numeric_limits<double>::quiet_NaN()
                                          : it->second);
      }
      table.rows.push_back(std::move(row));
    }
    out.tables.push_back(std::move(table));
    return out;
  };
  return p;
}

// ---------------------------------------------------------------------------
// Dispatch, document assembly, file output

ParsedScenario parse_scenario(const json& doc) {
  if (!doc.is_object()) throw config_error("", "scenario must be a JSON object");
  Checker top(doc, "");
  const json kind_key = doc.value("kind", json());
  const std::string kind = kind_key.is_string() ? kind_key.get<std::string>() : "";
  if (kind == "rabi") return parse_rabi(top, doc);
  if (kind == "gate-cz") return parse_gate_cz(top, doc, false);
  if (kind == "gate-cnot") return parse_gate_cz(top, doc, true);
  if (kind == "gate-sm") return parse_gate_sm(top, doc);
  if (kind == "readout") return parse_readout(top, doc);
  if (kind == "decoherence") return parse_decoherence(top, doc);
  if (kind == "sweep") return parse_sweep(top, doc);
  if (!doc.contains("kind")) throw config_error("kind", "required key is missing");
  throw config_error("kind",
                     "unknown kind '" + kind +
                         "' (expected rabi, gate-cz, gate-cnot, gate-sm, readout, "
                         "decoherence or sweep)");
}

std::string sanitize_stem(const std::string& label, const std::string& fallback) {
  std::string out;
  for (char ch : label) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
    out.push_back(ok ? ch : '-');
  }
  if (out.find_first_not_of("-._") == std::string::npos) return fallback;
  return out;
}

std::string timestamp_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file_atomic(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec)
      throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("failed while writing " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

Internals prepare(const json& doc, const RunOptions& options) {
  Internals in{parse_scenario(doc), {}, {}};
  const Common& c = in.parsed.common;
  in.ctx.seed = options.seed.value_or(c.seed);
  in.ctx.threads = options.threads.value_or(c.threads);
  if (in.ctx.threads < 0) throw config_error("threads", "must be non-negative");
  in.ctx.format = options.format.value_or(c.format.value_or("csv"));
  if (in.ctx.format != "csv" && in.ctx.format != "json")
    throw config_error("out.format", "expected \"csv\" or \"json\"");
  in.ctx.out_dir = options.out_dir.value_or(fs::path(c.out_dir.value_or(".")));
  in.ctx.write_files = options.write_files;
  in.ctx.stem = sanitize_stem(c.label, c.kind);

  in.echo["schema"] = scenario_schema;
  in.echo["kind"] = c.kind;
  in.echo["label"] = c.label;
  in.echo["seed"] = in.ctx.seed;
  in.echo["threads"] = in.ctx.threads;
  in.echo["out"] = {{"dir", in.ctx.out_dir.generic_string()}, {"format", in.ctx.format}};
  if (in.parsed.molecule_echo) in.echo["molecule"] = *in.parsed.molecule_echo;
  in.echo.update(in.parsed.fragment(in.ctx));
  return in;
}

ScenarioOutcome execute(Internals& in) {
  KindOutput out = in.parsed.run(in.ctx);

  ScenarioOutcome outcome;
  outcome.tables = out.tables;
  json& doc = outcome.document;
  doc["schema"] = result_schema;
  doc["kind"] = in.parsed.common.kind;
  doc["scenario"] = in.echo;
  doc["provenance"] = {{"tool", "rotorsim"},
                       {"version", version_string},
                       {"seed", in.ctx.seed},
                       {"timestamp", timestamp_utc()}};
  doc["results"] = out.results;
  if (in.ctx.format == "json") {
    json tables = json::object();
    for (const ResultTable& t : outcome.tables) tables[t.name] = t.to_json();
    doc["tables"] = std::move(tables);
  }

  if (in.ctx.write_files) {
    const fs::path doc_path = in.ctx.out_dir / (in.ctx.stem + ".json");
    outcome.files.push_back(doc_path);
    if (in.ctx.format == "csv") {
      for (const ResultTable& t : outcome.tables) {
        const fs::path p = in.ctx.out_dir / (in.ctx.stem + "_" + t.name + ".csv");
        write_file_atomic(p, t.to_csv());
        outcome.files.push_back(p);
      }
    }
    outcome.files.insert(outcome.files.end(), out.files.begin(), out.files.end());
    // The document is written last so its presence marks a completed run.
    write_file_atomic(doc_path, doc.dump(2) + "\n");
  }
  return outcome;
}

}  // namespace

json ResultTable::to_json() const {
  return json{{"columns", columns}, {"rows", rows}};
}

std::string ResultTable::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out.push_back(',');
    out += columns[i];
  }
  out.push_back('\n');
  char buf[40];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
    }
    out.push_back('\n');
  }
  return out;
}

void validate_scenario(const json& doc) { parse_scenario(doc); }

ScenarioOutcome run_scenario(const json& doc, const RunOptions& options) {
  Internals in = prepare(doc, options);
  return execute(in);
}

json load_scenario_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scenario file " + path.string());
  json doc = json::parse(f, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("scenario file " + path.string() + " is not valid JSON");
  return doc;
}

}  // namespace rotorsim
