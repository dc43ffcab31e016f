#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cczsim/circuits.hpp"
#include "cczsim/couplings.hpp"
#include "cczsim/tomography.hpp"

using nlohmann::ordered_json;
using namespace ccz;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kSummaryFormat = "cczsim.summary";
constexpr int kSummaryVersion = 1;
constexpr const char* kConfigEnv = "CCZSIM_CONFIG";

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  double dt = 0.01;
  int jobs = 1;
  bool standard_dephasing = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

std::string fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Provenance record written next to the outputs of a command.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  double dt = 0.01;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;

  std::string path_for(const std::string& out) const { return out + ".manifest.json"; }

  void write(const std::string& primary_output) {
    finished = utc_now();
    ordered_json j;
    j["format"] = "cczsim.manifest";
    j["version"] = 1;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["dt_ns"] = dt;
    j["started"] = started;
    j["finished"] = finished;
    j["outputs"] = outputs;
    write_file(path_for(primary_output), j.dump(2) + "\n");
  }
};

struct Context {
  Common common;
  DeviceConfig cfg{DeviceModel::reference(), NoiseSpec::reference()};
  RunManifest manifest;

  void load(const std::string& command) {
    manifest.command = command;
    manifest.seed = common.seed;
    manifest.dt = common.dt;
    manifest.started = utc_now();
    if (common.config.empty()) {
      manifest.config_hash = "builtin:" + fnv1a(device_config_to_json(cfg));
    } else {
      const std::string text = read_file(common.config);
      cfg = parse_device_config(text);
      manifest.config_hash = fnv1a(text);
    }
  }

  SimOptions sim_options() const {
    SimOptions o = gate_sim_options();
    if (!(common.dt > 0)) throw InvalidArgument("dt must be positive");
    o.dt = common.dt;
    if (common.standard_dephasing) o.dephasing = Dephasing::standard;
    return o;
  }

  GateSimulator simulator() const { return idle_gate_simulator(cfg.device, cfg.noise, sim_options()); }

  /// Writes an output, tagging it with the manifest path, and records it.
  void emit(const std::string& path, const std::string& body, bool json) {
    manifest.outputs.push_back(path);
    if (json) {
      write_file(path, body);
    } else {
      write_file(path, "# manifest: " + manifest.path_for(path) + "\n" + body);
    }
  }
};

std::vector<double> parse_range(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw CLI::ValidationError("range", "expected lo:hi:n, got '" + spec + "'");
  try {
    const double lo = std::stod(parts[0]);
    const double hi = std::stod(parts[1]);
    const long n = std::stol(parts[2]);
    if (n < 1) throw CLI::ValidationError("range", "n must be positive");
    return CouplerGrid::linspace(lo, hi, static_cast<std::size_t>(n));
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("range", "expected lo:hi:n, got '" + spec + "'");
  }
}

/// "c1=a:b:n,c2=a:b:n"
std::pair<std::vector<double>, std::vector<double>> parse_grid(const std::string& spec) {
  std::vector<double> c1, c2;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("grid", "expected c1=a:b:n,c2=a:b:n");
    const std::string key = item.substr(0, eq);
    const auto values = parse_range(item.substr(eq + 1));
    if (key == "c1")
      c1 = values;
    else if (key == "c2")
      c2 = values;
    else
      throw CLI::ValidationError("grid", "unknown axis '" + key + "'");
  }
  if (c1.empty() || c2.empty()) throw CLI::ValidationError("grid", "both c1 and c2 axes are required");
  return {c1, c2};
}

CczGate load_gate(const std::string& path) { return gate_from_json(read_file(path)); }

ordered_json phases_to_json(const PhaseSet& p) {
  return {{"phi12", p.phi12}, {"phi23", p.phi23}, {"phi13", p.phi13}, {"phi123", p.phi123}, {"phi_ccz", p.phi_ccz}};
}

SimMode parse_sim_mode(const std::string& s) {
  if (s == "ideal") return SimMode::ideal;
  if (s == "lindblad") return SimMode::lindblad;
  throw CLI::ValidationError("mode", "expected ideal or lindblad");
}

std::string dump(const ordered_json& j) {
  // 15 significant digits for every float
  std::function<ordered_json(const ordered_json&)> round = [&](const ordered_json& v) -> ordered_json {
    if (v.is_number_float()) return std::stod(format_real(v.get<double>()));
    if (v.is_array() || v.is_object()) {
      ordered_json out = v;
      for (auto it = out.begin(); it != out.end(); ++it) *it = round(*it);
      return out;
    }
    return v;
  };
  return round(j).dump(2) + "\n";
}

// -------------------------------------------------------------------------

int cmd_sweep_couplings(Context& ctx, const std::string& c1, const std::string& c2, const std::string& method,
                        const std::string& frame, const std::string& out) {
  ctx.load("sweep-couplings");
  CouplerGrid grid{parse_range(c1), parse_range(c2)};
  ExactOptions eo;
  eo.frame = frame == "rwa" ? Frame::rwa : Frame::full;
  const auto m = method == "exact" ? SweepMethod::exact : SweepMethod::perturbative;
  const auto reports = sweep_couplings(ctx.cfg.device, grid, m, eo, ctx.common.jobs);
  ctx.emit(out, sweep_to_csv(reports), false);
  ctx.manifest.write(out);
  return 0;
}

int cmd_evolve(Context& ctx, const std::string& schedule_path, const std::string& initial, const std::string& frame,
               int max_exc, const std::string& trace_path) {
  ctx.load("evolve");
  const PulseSchedule schedule = schedule_from_json(read_file(schedule_path));
  SimOptions o;
  o.dt = ctx.common.dt;
  o.frame = frame == "rwa" ? Frame::rwa : Frame::full;
  if (max_exc > 0) o.max_excitations = max_exc;
  o.record_trace = true;
  const Evolver ev(ctx.cfg.device, o);
  if (initial.size() != 5 || initial.find_first_not_of("012") != std::string::npos)
    throw InvalidArgument("initial state must be five digits (Q1 C1 Q2 C2 Q3), e.g. 10101");
  Occupation occ{};
  for (int i = 0; i < 5; ++i) occ[i] = initial[i] - '0';
  const auto r = ev.evolve_state(schedule, ev.basis_state(occ), schedule.total_time);
  std::ostringstream os;
  os << "t_ns";
  for (std::size_t i = 0; i < ev.space().dim(); ++i) os << ",p" << ev.state_label(i);
  os << '\n';
  for (std::size_t k = 0; k < r.trace.times.size(); ++k) {
    os << format_real(r.trace.times[k]);
    for (Eigen::Index i = 0; i < r.trace.populations[k].size(); ++i) os << ',' << format_real(r.trace.populations[k](i));
    os << '\n';
  }
  ctx.emit(trace_path, os.str(), false);
  ctx.manifest.write(trace_path);
  return 0;
}

int cmd_calibrate(Context& ctx, const std::string& grid_spec, double tau, bool nearest_miss, const std::string& out,
                  const std::string& sweep_csv) {
  ctx.load("calibrate");
  const GateSimulator sim = ctx.simulator();
  AssembleOptions opts = default_assemble_options();
  if (!grid_spec.empty()) std::tie(opts.amps_c1, opts.amps_c2) = parse_grid(grid_spec);
  opts.sweep.window = tau;
  opts.sweep.jobs = ctx.common.jobs;
  opts.sweep.allow_nearest_miss = nearest_miss;
  const auto rep = assemble_ccz(sim, opts);
  ctx.emit(out, gate_to_json(rep.gate), true);
  if (!sweep_csv.empty()) ctx.emit(sweep_csv, sweep_to_csv(rep.sweep.points), false);
  ctx.manifest.write(out);
  std::cout << dump({{"feasible", rep.sweep.feasible},
                     {"process_fidelity", rep.process_fidelity},
                     {"operating_point",
                      {{"amp_c1", rep.gate.operating_point.amp_c1},
                       {"amp_c2", rep.gate.operating_point.amp_c2},
                       {"leakage", rep.gate.operating_point.leakage}}},
                     {"composite_phases", phases_to_json(rep.composite_phases)}});
  return 0;
}

Channel gate_channel(const GateSimulator& sim, const CczGate& gate, SimMode mode, bool toffoli) {
  if (!toffoli) return pulse_channel(sim, gate.composite(), mode);
  // H on q2 around the pulse channel
  const Mat8 h = embed_1q(gates::h(), 1);
  Channel inner = pulse_channel(sim, gate.composite(), mode);
  return [h, inner](const Mat8& rho) {
    ReducedState r = inner(h * rho * h.adjoint());
    r.rho = h * r.rho * h.adjoint();
    return r;
  };
}

int cmd_qpt(Context& ctx, const std::string& gate_path, int probes, const std::string& mode, std::int64_t shots,
            bool correct, const std::string& out) {
  ctx.load("qpt");
  if (probes != 64 && probes != 216) throw CLI::ValidationError("probes", "must be 64 or 216");
  const GateSimulator sim = ctx.simulator();
  const CczGate gate = load_gate(gate_path);
  Channel ch = gate_channel(sim, gate, parse_sim_mode(mode), false);
  if (shots > 0) {
    SamplingOptions so;
    so.shots = shots;
    so.seed = ctx.common.seed;
    so.correct_readout = correct;
    ch = sampled_channel(ch, ctx.cfg.noise, so);
  }
  const ChiMatrix chi = qpt(ch, ProbeSet::make(probes == 64 ? ProbeKind::probe64 : ProbeKind::probe216));
  ctx.emit(out, chi_to_csv(chi), false);
  ctx.manifest.write(out);
  std::cout << dump({{"process_fidelity", process_fidelity(chi, ideal_chi(ccz_ideal()))}});
  return 0;
}

int cmd_truth_table(Context& ctx, const std::string& gate_path, const std::string& mode, bool toffoli_mode,
                    const std::string& out) {
  ctx.load("truth-table");
  const GateSimulator sim = ctx.simulator();
  const CczGate gate = load_gate(gate_path);
  const auto tt = truth_table(gate_channel(sim, gate, parse_sim_mode(mode), toffoli_mode),
                              toffoli_mode ? toffoli_transfer() : ccz_transfer());
  ctx.emit(out, truth_table_to_csv(tt), false);
  ctx.manifest.write(out);
  std::cout << dump({{"visibility", tt.visibility}});
  return 0;
}

int cmd_grover(Context& ctx, const std::string& target, int iterations, const std::string& mode,
               const std::string& gate_path, const std::string& out) {
  ctx.load("grover");
  const CircuitMode m = parse_circuit_mode(mode);
  RVec p;
  if (m == CircuitMode::ideal) {
    p = grover(target, iterations, m);
  } else {
    if (gate_path.empty()) throw CLI::ValidationError("gate", "pulse and lindblad modes need --gate");
    const GateSimulator sim = ctx.simulator();
    PulseLibrary lib;
    lib.ccz = load_gate(gate_path).composite();
    p = grover(target, iterations, m, &sim, &lib);
  }
  ordered_json j;
  j["format"] = "cczsim.grover";
  j["version"] = 1;
  j["manifest"] = ctx.manifest.path_for(out);
  j["target"] = target;
  j["iterations"] = iterations;
  j["mode"] = mode;
  ordered_json probs = ordered_json::object();
  for (int k = 0; k < 8; ++k) probs[std::to_string((k >> 2) & 1) + std::to_string((k >> 1) & 1) + std::to_string(k & 1)] = p(k);
  j["probabilities"] = probs;
  ctx.emit(out, dump(j), true);
  ctx.manifest.write(out);
  return 0;
}

int cmd_leakage_layers(Context& ctx, const std::string& gate_path, int layers, const std::string& mode, bool strict,
                       const std::string& out) {
  ctx.load("leakage-layers");
  const GateSimulator sim = ctx.simulator();
  const PulseLibrary lib =
      build_pulse_library(sim, load_gate(gate_path), 80.0, strict ? CphaseOptions{} : relaxed_cz_options());
  const CircuitMode m = parse_circuit_mode(mode);
  const auto direct = multilayer_leakage(sim, lib, CczImpl::direct, layers, m);
  const auto decomposed = multilayer_leakage(sim, lib, CczImpl::decomposed, layers, m);
  std::ostringstream os;
  os << "layer,direct,decomposed\n";
  for (int n = 0; n <= layers; ++n) os << n << ',' << format_real(direct[n]) << ',' << format_real(decomposed[n]) << '\n';
  Circuit d, c;
  d.add(Gate::ccz_direct());
  c.add(Gate::ccz_decomposed());
  os << "# duration_ns," << format_real(circuit_duration(d, lib)) << ',' << format_real(circuit_duration(c, lib)) << '\n';
  ctx.emit(out, os.str(), false);
  ctx.manifest.write(out);
  return 0;
}

int cmd_rb_analyze(Context& ctx, const std::string& data, int d, const std::string& out) {
  ctx.load("rb-analyze");
  // columns: depth, survival_ref, survival_gate
  std::vector<double> m, ref, gate;
  std::istringstream in(read_file(data));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::stringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c, ','))
      throw ConfigError("RB data rows need depth,survival_ref,survival_gate");
    m.push_back(std::stod(a));
    ref.push_back(std::stod(b));
    gate.push_back(std::stod(c));
  }
  const RbFit fr = fit_rb_decay(m, ref);
  const RbFit fg = fit_rb_decay(m, gate);
  ordered_json j;
  j["format"] = "cczsim.rb";
  j["version"] = 1;
  j["manifest"] = out.empty() ? "" : ctx.manifest.path_for(out);
  j["reference"] = {{"A", fr.a}, {"p", fr.p}, {"B", fr.b}};
  j["interleaved"] = {{"A", fg.a}, {"p", fg.p}, {"B", fg.b}};
  j["d"] = d;
  j["f_rb"] = rb_fidelity(fr.p, fg.p, d);
  if (out.empty()) {
    std::cout << dump(j);
  } else {
    ctx.emit(out, dump(j), true);
    ctx.manifest.write(out);
  }
  return 0;
}

int cmd_reproduce(Context& ctx, const std::string& mode, const std::string& grid_spec, int layers, bool strict,
                  const std::string& out) {
  ctx.load("reproduce");
  const SimMode sm = parse_sim_mode(mode);
  const CircuitMode cm = sm == SimMode::ideal ? CircuitMode::pulse : CircuitMode::lindblad;
  ExactOptions eo;
  eo.frame = ctx.sim_options().frame;
  const IdlePoint idle = find_idle_point(ctx.cfg.device, eo);
  const GateSimulator sim = ctx.simulator();

  AssembleOptions opts = default_assemble_options();
  if (!grid_spec.empty()) std::tie(opts.amps_c1, opts.amps_c2) = parse_grid(grid_spec);
  opts.sweep.jobs = ctx.common.jobs;
  opts.sweep.allow_nearest_miss = !strict;
  opts.cphase.best_effort = !strict;
  const auto rep = assemble_ccz(sim, opts);
  const CczGate& gate = rep.gate;

  const Channel ch = pulse_channel(sim, gate.composite(), sm);
  const ProbeSet probes = ProbeSet::make(ProbeKind::probe64);
  const ChiMatrix chi = qpt(ch, probes);
  const double f_chi = process_fidelity(chi, ideal_chi(ccz_ideal()));
  const auto tt = truth_table(ch);
  const double avg_state = average_state_fidelity(ch, probes, ccz_ideal());

  PulseLibrary lib = build_pulse_library(sim, gate, 80.0, strict ? CphaseOptions{} : relaxed_cz_options());
  const RVec g2 = grover("111", 2, cm, &sim, &lib);
  const auto direct = multilayer_leakage(sim, lib, CczImpl::direct, layers, CircuitMode::lindblad);
  const auto decomposed = multilayer_leakage(sim, lib, CczImpl::decomposed, layers, CircuitMode::lindblad);
  Circuit cd, cc;
  cd.add(Gate::ccz_direct());
  cc.add(Gate::ccz_decomposed());

  ordered_json j;
  j["format"] = kSummaryFormat;
  j["version"] = kSummaryVersion;
  j["manifest"] = ctx.manifest.path_for(out);
  j["mode"] = mode;
  j["idle_point_ghz"] = {idle.omega_c1_ghz, idle.omega_c2_ghz};
  j["operating_point"] = {{"feasible", rep.sweep.feasible},
                          {"amp_c1", gate.operating_point.amp_c1},
                          {"amp_c2", gate.operating_point.amp_c2},
                          {"leakage", gate.operating_point.leakage},
                          {"phases", phases_to_json(gate.operating_point.phases)}};
  j["composite_phases"] = phases_to_json(rep.composite_phases);
  j["virtual_z"] = gate.virtual_z;
  j["process_fidelity"] = {{"value", f_chi}, {"reference", sm == SimMode::ideal ? 0.9875 : 0.9354}};
  j["truth_table_visibility"] = {{"value", tt.visibility}, {"reference_experiment", 0.9652}};
  j["average_state_fidelity"] = avg_state;
  j["grover_p111"] = {{"value", g2(7)}, {"ideal", grover("111", 2, CircuitMode::ideal)(7)}};
  j["multilayer_leakage"] = {{"direct", direct}, {"decomposed", decomposed}};
  j["duration_ns"] = {{"direct", circuit_duration(cd, lib)}, {"decomposed", circuit_duration(cc, lib)},
                      {"reference_direct", 256.0}, {"reference_decomposed", 640.0}};
  ctx.emit(out, dump(j), true);
  ctx.manifest.write(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cczsim: pulse-level simulation and calibration of a direct CCZ gate on three transmons"};
  app.require_subcommand(1);
  Context ctx;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", ctx.common.config, "Device configuration JSON (default: $" + std::string(kConfigEnv) + ")")
        ->envname(kConfigEnv);
    sub->add_option("--seed", ctx.common.seed, "Random seed")->capture_default_str();
    sub->add_option("--dt", ctx.common.dt, "Integration step in ns")->capture_default_str();
    sub->add_option("--jobs", ctx.common.jobs, "Parallel workers")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_flag("--standard-dephasing", ctx.common.standard_dephasing,
                  "Use sqrt(2/T_phi) n instead of (1 - n)/sqrt(2 T2)");
  };

  std::string c1 = "5.6:9.0:35", c2 = "5.6:9.0:35", method = "exact", frame = "full", out;
  auto* sweep = app.add_subcommand("sweep-couplings", "ZZ / ZZZ coupling grid over coupler frequencies");
  add_common(sweep);
  sweep->add_option("--c1", c1, "C1 frequencies lo:hi:n (GHz)")->capture_default_str();
  sweep->add_option("--c2", c2, "C2 frequencies lo:hi:n (GHz)")->capture_default_str();
  sweep->add_option("--method", method, "exact or pert")->check(CLI::IsMember({"exact", "pert"}))->capture_default_str();
  sweep->add_option("--frame", frame, "full or rwa")->check(CLI::IsMember({"full", "rwa"}))->capture_default_str();
  sweep->add_option("--out", out, "Output CSV")->required();

  std::string schedule, initial = "10101", trace;
  int max_exc = 0;
  auto* evolve = app.add_subcommand("evolve", "Propagate a basis state under a pulse schedule");
  add_common(evolve);
  evolve->add_option("--schedule", schedule, "Pulse schedule JSON")->required()->check(CLI::ExistingFile);
  evolve->add_option("--initial", initial, "Initial Fock state, digits for Q1 C1 Q2 C2 Q3")->capture_default_str();
  evolve->add_option("--frame", frame, "full or rwa")->check(CLI::IsMember({"full", "rwa"}))->capture_default_str();
  evolve->add_option("--max-excitations", max_exc, "Excitation cap (0 keeps every state)");
  evolve->add_option("--trace", trace, "Population trace CSV")->required();

  std::string grid, sweep_csv;
  double tau = 150.0;
  auto* calibrate = app.add_subcommand("calibrate", "Sweep, compensate and optimize the direct CCZ gate");
  add_common(calibrate);
  calibrate->add_option("--grid", grid, "Amplitude grid c1=a:b:n,c2=a:b:n (GHz detuning)");
  calibrate->add_option("--tau", tau, "First segment length in ns")->capture_default_str();
  calibrate->add_option("--out", out, "Gate JSON")->required();
  calibrate->add_option("--sweep-csv", sweep_csv, "Operating-point sweep CSV");
  bool nearest_miss = false;
  calibrate->add_flag("--allow-nearest-miss", nearest_miss, "Use the best infeasible point instead of failing");

  std::string gate_path, mode = "ideal";
  int probes = 64;
  std::int64_t shots = 0;
  bool correct = false;
  auto* qpt_cmd = app.add_subcommand("qpt", "Process tomography of a calibrated gate");
  add_common(qpt_cmd);
  qpt_cmd->add_option("--gate", gate_path, "Gate JSON")->required()->check(CLI::ExistingFile);
  qpt_cmd->add_option("--probes", probes, "64 or 216")->capture_default_str();
  qpt_cmd->add_option("--mode", mode, "ideal or lindblad")->check(CLI::IsMember({"ideal", "lindblad"}))->capture_default_str();
  qpt_cmd->add_option("--shots", shots, "Sample this many shots per setting (0: exact expectations)");
  qpt_cmd->add_flag("--correct-readout", correct, "Invert the readout confusion matrix");
  qpt_cmd->add_option("--out", out, "Chi matrix CSV")->required();

  bool toffoli_mode = false;
  auto* tt_cmd = app.add_subcommand("truth-table", "Truth table of a calibrated gate");
  add_common(tt_cmd);
  tt_cmd->add_option("--gate", gate_path, "Gate JSON")->required()->check(CLI::ExistingFile);
  tt_cmd->add_option("--mode", mode, "ideal or lindblad")->check(CLI::IsMember({"ideal", "lindblad"}))->capture_default_str();
  tt_cmd->add_flag("--toffoli", toffoli_mode, "Wrap the gate in H on q2");
  tt_cmd->add_option("--out", out, "Truth table CSV")->required();

  std::string target = "111";
  int iterations = 2;
  auto* grover_cmd = app.add_subcommand("grover", "Three-qubit Grover search");
  add_common(grover_cmd);
  grover_cmd->add_option("--target", target, "Marked 3-bit string")->capture_default_str();
  grover_cmd->add_option("--iterations", iterations, "Grover iterations")->check(CLI::NonNegativeNumber)->capture_default_str();
  grover_cmd->add_option("--mode", mode, "ideal, pulse or lindblad")
      ->check(CLI::IsMember({"ideal", "pulse", "lindblad"}))
      ->capture_default_str();
  grover_cmd->add_option("--gate", gate_path, "Gate JSON (pulse and lindblad modes)");
  grover_cmd->add_option("--out", out, "Probabilities JSON")->required();

  int layers = 10;
  std::string layer_mode = "lindblad";
  auto* layers_cmd = app.add_subcommand("leakage-layers", "Leakage after repeated direct and decomposed CCZ layers");
  add_common(layers_cmd);
  layers_cmd->add_option("--gate", gate_path, "Gate JSON")->required()->check(CLI::ExistingFile);
  layers_cmd->add_option("--layers", layers, "Number of layers")->check(CLI::NonNegativeNumber)->capture_default_str();
  layers_cmd->add_option("--mode", layer_mode, "pulse or lindblad")
      ->check(CLI::IsMember({"pulse", "lindblad"}))
      ->capture_default_str();
  layers_cmd->add_option("--out", out, "Leakage CSV")->required();
  bool strict_cz = false;
  layers_cmd->add_flag("--strict", strict_cz, "Require 80 ns CZ pulses instead of the widened search");

  std::string data;
  int d = 4;
  auto* rb_cmd = app.add_subcommand("rb-analyze", "Fit reference and interleaved RB decays");
  add_common(rb_cmd);
  rb_cmd->add_option("--data", data, "CSV with depth,survival_ref,survival_gate")->required()->check(CLI::ExistingFile);
  rb_cmd->add_option("--d", d, "Hilbert-space dimension")->capture_default_str();
  rb_cmd->add_option("--out", out, "Result JSON (stdout when omitted)");

  std::string repro_mode = "ideal";
  auto* repro = app.add_subcommand("reproduce", "Full pipeline with a summary JSON");
  add_common(repro);
  repro->add_option("--mode", repro_mode, "ideal or lindblad")->check(CLI::IsMember({"ideal", "lindblad"}))->capture_default_str();
  repro->add_option("--grid", grid, "Amplitude grid c1=a:b:n,c2=a:b:n");
  repro->add_option("--layers", layers, "Multilayer leakage depth")->capture_default_str();
  bool strict = false;
  repro->add_flag("--strict", strict, "Fail when no feasible operating point exists");
  repro->add_option("--out", out, "Summary JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sweep) return cmd_sweep_couplings(ctx, c1, c2, method, frame, out);
    if (*evolve) return cmd_evolve(ctx, schedule, initial, frame, max_exc, trace);
    if (*calibrate) return cmd_calibrate(ctx, grid, tau, nearest_miss, out, sweep_csv);
    if (*qpt_cmd) return cmd_qpt(ctx, gate_path, probes, mode, shots, correct, out);
    if (*tt_cmd) return cmd_truth_table(ctx, gate_path, mode, toffoli_mode, out);
    if (*grover_cmd) return cmd_grover(ctx, target, iterations, mode, gate_path, out);
    if (*layers_cmd) return cmd_leakage_layers(ctx, gate_path, layers, layer_mode, strict_cz, out);
    if (*rb_cmd) return cmd_rb_analyze(ctx, data, d, out);
    if (*repro) return cmd_reproduce(ctx, repro_mode, grid, layers, strict, out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ccz::Error& e) {
    ordered_json diag{{"error", "domain"}, {"message", e.what()}};
    std::cerr << diag.dump() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
