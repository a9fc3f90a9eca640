#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>

#include "rotorsim/errors.hpp"
#include "rotorsim/scenario.hpp"

namespace rotorsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Preset {
  const char* name;
  const char* summary;
  const char* text;
};

// Built-in scenarios.  Every document here must pass validate_scenario; a
// test walks the catalog to enforce that.
const Preset kPresets[] = {
    {"ns2-rabi",
     "Rabi flopping |0,0> <-> |2,0> at 2.5e6 W/cm^2 (about 1 MHz)",
     R"json({
  "kind": "rabi",
  "label": "ns2-rabi",
  "rabi": {
    "drive": "linear",
    "from": [0, 0],
    "to": [2, 0],
    "intensity_w_cm2": 2.5e6,
    "j_max": 6,
    "m_restriction": "zero",
    "rwa_cutoff_hz": 2.0e9,
    "samples": 400
  }
})json"},
    {"ns2-aux-transfer",
     "Population transfer |0,0> <-> |2,2> under a circularly polarized pair",
     R"json({
  "kind": "rabi",
  "label": "ns2-aux-transfer",
  "rabi": {
    "drive": "rotating",
    "from": [0, 0],
    "to": [2, 2],
    "intensity_w_cm2": 2.5e6,
    "j_max": 6,
    "m_restriction": "even",
    "rwa_cutoff_hz": 2.0e9,
    "samples": 400
  }
})json"},
    {"ns2-gate-cz",
     "Sideband CZ gate on two co-trapped molecular ions (slow: minutes)",
     R"json({
  "kind": "gate-cz",
  "label": "ns2-gate-cz",
  "gate": {
    "nu_hz": 1.0e6,
    "eta": 0.1,
    "rabi_hz": 1.0e4,
    "j_max": 4,
    "n_max": 5
  }
})json"},
    {"ns2-gate-cnot",
     "CZ dressed with carrier pi/2 pulses into a CNOT (slow: minutes)",
     R"json({
  "kind": "gate-cnot",
  "label": "ns2-gate-cnot",
  "gate": {
    "nu_hz": 1.0e6,
    "eta": 0.1,
    "rabi_hz": 1.0e4,
    "j_max": 4,
    "n_max": 5
  }
})json"},
    {"ns2-gate-sm",
     "Molmer-Sorensen gate from the motional ground state",
     R"json({
  "kind": "gate-sm",
  "label": "ns2-gate-sm",
  "gate": {
    "nu_hz": 1.0e6,
    "eta": 0.1,
    "rabi_hz": 2.5e4,
    "delta_hz": 5.0e3,
    "nbar": 0.0
  }
})json"},
    {"ns2-gate-sm-thermal",
     "Molmer-Sorensen fidelity swept over thermal occupation (slow: minutes)",
     R"json({
  "kind": "sweep",
  "label": "ns2-gate-sm-thermal",
  "axis": {"path": "gate.nbar", "values": [0.0, 0.5, 2.0]},
  "base": {
    "kind": "gate-sm",
    "gate": {
      "nu_hz": 1.0e6,
      "eta": 0.1,
      "rabi_hz": 2.5e4,
      "delta_hz": 5.0e3,
      "nbar": 0.0
    }
  }
})json"},
    {"ns2-readout",
     "State-transfer readout, 9 repetitions with 1% pulse errors, 1e5 trials",
     R"json({
  "kind": "readout",
  "label": "ns2-readout",
  "seed": 1,
  "atom": {"bright_mean": 20.0, "dark_mean": 0.5, "threshold": 5},
  "protocol": {
    "repetitions": 9,
    "pulse_infidelity": 0.01,
    "read_state": [4, 0]
  },
  "trials": 100000
})json"},
    {"ns2-readout-curve",
     "Majority-vote error vs repetition count at a fixed 10% round error",
     R"json({
  "kind": "sweep",
  "label": "ns2-readout-curve",
  "axis": {"path": "protocol.repetitions", "values": [1, 3, 5, 7, 9]},
  "base": {
    "kind": "readout",
    "seed": 7,
    "atom": {"bright_mean": 20.0, "dark_mean": 0.0, "threshold": 1},
    "protocol": {
      "repetitions": 1,
      "classification_error": 0.1,
      "read_state": [4, 0]
    },
    "trials": 20000
  }
})json"},
    {"ns2-decoherence",
     "Ramsey T2 of the stretched |2,-2>/|2,2> pair vs an electronic spin",
     R"json({
  "kind": "decoherence",
  "label": "ns2-decoherence",
  "seed": 1,
  "noise": {"sigma_b_t": 1.0e-8, "tau_c_s": 2.0e4},
  "mode": "compare",
  "qubits": [
    {"type": "electronic"},
    {"type": "rotational", "lower": [2, -2], "upper": [2, 2]}
  ],
  "trials": 2000,
  "points": 40
})json"},
    {"ns2-m0-coherence",
     "Ramsey decay of the field-insensitive |0,0>/|2,0> qubit",
     R"json({
  "kind": "decoherence",
  "label": "ns2-m0-coherence",
  "seed": 1,
  "noise": {"sigma_b_t": 1.0e-8, "tau_c_s": 2.0e4},
  "mode": "ramsey",
  "qubits": [{"type": "rotational", "lower": [0, 0], "upper": [2, 0]}],
  "trials": 200,
  "points": 20,
  "t_max_s": 0.8
})json"},
};

std::optional<fs::path> preset_dir() {
  const char* dir = std::getenv("ROTORSIM_PRESET_DIR");
  if (!dir || !*dir) return std::nullopt;
  return fs::path(dir);
}

}  // namespace

std::vector<PresetInfo> preset_catalog() {
  std::vector<PresetInfo> out;
  std::set<std::string> seen;
  if (auto dir = preset_dir(); dir && fs::is_directory(*dir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(*dir))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::string name = f.stem().string();
      if (seen.insert(name).second)
        out.push_back({name, "user preset (" + f.string() + ")"});
    }
  }
  for (const Preset& p : kPresets)
    if (seen.insert(p.name).second) out.push_back({p.name, p.summary});
  return out;
}

nlohmann::json preset_scenario(const std::string& name) {
  if (auto dir = preset_dir()) {
    const fs::path file = *dir / (name + ".json");
    if (fs::exists(file)) return load_scenario_file(file);
  }
  for (const Preset& p : kPresets)
    if (name == p.name) return json::parse(p.text);
  std::string known;
  for (const PresetInfo& p : preset_catalog()) {
    if (!known.empty()) known += ", ";
    known += p.name;
  }
  throw ConfigError("unknown preset '" + name + "' (available: " + known + ")");
}

nlohmann::json resolve_scenario(const std::string& target) {
  std::error_code ec;
  if (fs::exists(fs::path(target), ec)) return load_scenario_file(target);
  return preset_scenario(target);
}

}  // namespace rotorsim
