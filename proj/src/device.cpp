#include "cczsim/device.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ccz {

using nlohmann::json;

std::string site_name(Site s) {
  switch (s) {
    case Site::Q1: return "Q1";
    case Site::C1: return "C1";
    case Site::Q2: return "Q2";
    case Site::C2: return "C2";
    case Site::Q3: return "Q3";
  }
  return "?";
}

Site parse_site(const std::string& name) {
  for (int i = 0; i < kNumSites; ++i) {
    auto s = static_cast<Site>(i);
    if (site_name(s) == name) return s;
  }
  throw ConfigError("unknown site label '" + name + "'");
}

bool is_coupler(Site s) { return s == Site::C1 || s == Site::C2; }

int qubit_number(Site s) {
  switch (s) {
    case Site::Q1: return 0;
    case Site::Q2: return 1;
    case Site::Q3: return 2;
    default: throw InvalidArgument(site_name(s) + " is not a qubit");
  }
}

Site qubit_site(int q) {
  if (q < 0 || q > 2) throw InvalidArgument("qubit number out of range");
  return kQubits[q];
}

CouplingGraph::CouplingGraph(std::vector<Coupling> edges) {
  for (const auto& e : edges) set(e.a, e.b, e.g_mhz);
}

double CouplingGraph::g(Site a, Site b) const {
  for (const auto& e : edges_)
    if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return e.g_mhz;
  return 0.0;
}

void CouplingGraph::set(Site a, Site b, double g_mhz) {
  if (a == b) throw InvalidArgument("self-coupling on " + site_name(a));
  for (auto& e : edges_) {
    if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) {
      e.g_mhz = g_mhz;
      return;
    }
  }
  edges_.push_back({a, b, g_mhz});
}

void NoiseSpec::validate() const {
  for (const auto* m : {&t1_us, &t2_us})
    for (const auto& [s, v] : *m)
      if (!(v > 0)) throw ConfigError("coherence time for " + site_name(s) + " must be positive");
  for (const auto* m : {&readout_f0, &readout_f1})
    for (const auto& [s, v] : *m)
      if (v < 0 || v > 1) throw ConfigError("readout fidelity for " + site_name(s) + " outside [0,1]");
}

NoiseSpec NoiseSpec::reference() {
  NoiseSpec n;
  n.t1_us = {{Site::Q1, 37.76}, {Site::Q2, 28.15}, {Site::Q3, 43.34}, {Site::C1, 27.9}, {Site::C2, 59.13}};
  n.t2_us = {{Site::Q1, 20.42}, {Site::Q2, 20.39}, {Site::Q3, 20.95}, {Site::C1, 20.45}, {Site::C2, 21.35}};
  n.readout_f0 = {{Site::Q1, 0.9814}, {Site::Q2, 0.9768}, {Site::Q3, 0.9861}};
  n.readout_f1 = {{Site::Q1, 0.9503}, {Site::Q2, 0.9010}, {Site::Q3, 0.9217}};
  return n;
}

NoiseSpec NoiseSpec::noiseless() {
  NoiseSpec n;
  for (int i = 0; i < kNumSites; ++i) {
    n.t1_us[static_cast<Site>(i)] = 1e12;
    n.t2_us[static_cast<Site>(i)] = 1e12;
  }
  for (auto q : kQubits) {
    n.readout_f0[q] = 1.0;
    n.readout_f1[q] = 1.0;
  }
  return n;
}

DeviceModel::DeviceModel(std::array<TransmonSpec, kNumSites> transmons, CouplingGraph couplings)
    : transmons_(std::move(transmons)), couplings_(std::move(couplings)) {
  hilbert_dim_ = 1;
  for (int i = 0; i < kNumSites; ++i) {
    auto& t = transmons_[i];
    if (site_index(t.label) != i)
      throw ConfigError("transmons must be ordered (Q1, C1, Q2, C2, Q3)");
    if (t.levels < 2) throw InvalidDimension("transmon " + site_name(t.label) + " needs >= 2 levels");
    hilbert_dim_ *= static_cast<std::size_t>(t.levels);
  }
}

DeviceModel DeviceModel::reference() {
  std::array<TransmonSpec, kNumSites> t{{
      {Site::Q1, 5.000, -198.0, 3},
      {Site::C1, 6.5, -340.0, 3},
      {Site::Q2, 4.896, -200.0, 3},
      {Site::C2, 6.5, -320.0, 3},
      {Site::Q3, 5.040, -206.0, 3},
  }};
  CouplingGraph g({{Site::Q1, Site::Q2, 5.0},
                   {Site::Q2, Site::Q3, 6.0},
                   {Site::Q1, Site::Q3, 0.3},
                   {Site::Q1, Site::C1, 90.0},
                   {Site::Q2, Site::C1, 90.0},
                   {Site::Q2, Site::C2, 90.0},
                   {Site::Q3, Site::C2, 90.0}});
  return DeviceModel(t, g);
}

std::array<int, kNumSites> DeviceModel::levels() const {
  std::array<int, kNumSites> l{};
  for (int i = 0; i < kNumSites; ++i) l[i] = transmons_[i].levels;
  return l;
}

DeviceModel DeviceModel::with_couplers(double omega_c1_ghz, double omega_c2_ghz) const {
  auto t = transmons_;
  t[site_index(Site::C1)].frequency_ghz = omega_c1_ghz;
  t[site_index(Site::C2)].frequency_ghz = omega_c2_ghz;
  return DeviceModel(t, couplings_);
}

DeviceModel DeviceModel::with_levels(int levels) const {
  auto t = transmons_;
  for (auto& x : t) x.levels = levels;
  return DeviceModel(t, couplings_);
}

DeviceModel DeviceModel::with_coupling(Site a, Site b, double g_mhz) const {
  auto g = couplings_;
  g.set(a, b, g_mhz);
  return DeviceModel(transmons_, g);
}

DeviceModel DeviceModel::with_transmon(const TransmonSpec& spec) const {
  auto t = transmons_;
  t[site_index(spec.label)] = spec;
  return DeviceModel(t, couplings_);
}

namespace {

TransmonSpec parse_transmon(const json& j, Site label) {
  TransmonSpec t;
  t.label = label;
  t.frequency_ghz = j.at("frequency_ghz").get<double>();
  t.anharmonicity_mhz = j.at("anharmonicity_mhz").get<double>();
  t.levels = j.value("levels", 3);
  return t;
}

std::map<Site, double> parse_site_map(const json& j) {
  std::map<Site, double> m;
  for (auto it = j.begin(); it != j.end(); ++it) m[parse_site(it.key())] = it.value().get<double>();
  return m;
}

json site_map_json(const std::map<Site, double>& m) {
  json j = json::object();
  for (const auto& [s, v] : m) j[site_name(s)] = v;
  return j;
}

}  // namespace

DeviceConfig parse_device_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed device config: ") + e.what());
  }
  try {
    const auto& qs = j.at("qubits");
    const auto& cs = j.at("couplers");
    if (qs.size() != 3 || cs.size() != 2) throw ConfigError("expected 3 qubits and 2 couplers");
    std::array<TransmonSpec, kNumSites> t{{
        parse_transmon(qs[0], Site::Q1),
        parse_transmon(cs[0], Site::C1),
        parse_transmon(qs[1], Site::Q2),
        parse_transmon(cs[1], Site::C2),
        parse_transmon(qs[2], Site::Q3),
    }};
    CouplingGraph g;
    for (const auto& e : j.at("couplings"))
      g.set(parse_site(e.at("a").get<std::string>()), parse_site(e.at("b").get<std::string>()),
            e.at("g_mhz").get<double>());
    NoiseSpec noise = NoiseSpec::reference();
    if (j.contains("noise")) {
      const auto& n = j["noise"];
      if (n.contains("t1_us")) noise.t1_us = parse_site_map(n["t1_us"]);
      if (n.contains("t2_us")) noise.t2_us = parse_site_map(n["t2_us"]);
      if (n.contains("f0")) noise.readout_f0 = parse_site_map(n["f0"]);
      if (n.contains("f1")) noise.readout_f1 = parse_site_map(n["f1"]);
    }
    noise.validate();
    return DeviceConfig{DeviceModel(t, g), noise};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid device config: ") + e.what());
  }
}

DeviceConfig load_device_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open device config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_device_config(ss.str());
}

std::string device_config_to_json(const DeviceConfig& cfg) {
  auto transmon = [](const TransmonSpec& t) {
    return json{{"frequency_ghz", t.frequency_ghz}, {"anharmonicity_mhz", t.anharmonicity_mhz}, {"levels", t.levels}};
  };
  const auto& d = cfg.device;
  json j;
  j["qubits"] = json::array({transmon(d.transmon(Site::Q1)), transmon(d.transmon(Site::Q2)),
                             transmon(d.transmon(Site::Q3))});
  j["couplers"] = json::array({transmon(d.transmon(Site::C1)), transmon(d.transmon(Site::C2))});
  j["couplings"] = json::array();
  for (const auto& e : d.couplings().edges())
    j["couplings"].push_back({{"a", site_name(e.a)}, {"b", site_name(e.b)}, {"g_mhz", e.g_mhz}});
  j["noise"] = {{"t1_us", site_map_json(cfg.noise.t1_us)},
                {"t2_us", site_map_json(cfg.noise.t2_us)},
                {"f0", site_map_json(cfg.noise.readout_f0)},
                {"f1", site_map_json(cfg.noise.readout_f1)}};
  return j.dump(2);
}

}  // namespace ccz
