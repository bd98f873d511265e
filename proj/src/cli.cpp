#include "histspec/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "histspec/errors.hpp"
#include "histspec/serialize.hpp"

namespace histspec {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

int env_threads() {
  if (const char* v = std::getenv("HISTSPEC_THREADS")) {
    const int t = std::atoi(v);
    if (t >= 1) return t;
  }
  return 1;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot open output file " + path.string());
  out << content;
}

json run_header(const std::string& command, bool deterministic) {
  json j;
  j["tool"] = "histspec";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["rng"] = Rng::kName;
  if (!deterministic) {
    const auto now = std::chrono::system_clock::now();
    j["timestamp_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                              now.time_since_epoch())
                              .count();
  }
  return j;
}

struct CommonFlags {
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  bool deterministic = false;
  int threads = env_threads();
  std::uint64_t dim_cap = kDefaultDimCap;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--out", f.out_dir, "output directory");
  app->add_flag("--deterministic", f.deterministic, "omit timestamps from outputs");
  app->add_option("--threads", f.threads, "worker pool size (env HISTSPEC_THREADS)");
  app->add_option("--dim-cap", f.dim_cap, "total-dimension budget");
}

CompileOptions compile_options(const std::string& clock, bool no_input_penalty,
                               const std::vector<int>& witness, const std::string& rescale,
                               std::uint64_t dim_cap) {
  CompileOptions opt;
  if (clock == "register")
    opt.clock = ClockKind::Register;
  else if (clock == "unary")
    opt.clock = ClockKind::Unary;
  else
    throw ValidationError("unknown clock kind: " + clock);
  opt.include_input_penalty = !no_input_penalty;
  opt.witness_sites = witness;
  if (rescale == "none")
    opt.rescale = Rescale::None;
  else if (rescale == "by_T")
    opt.rescale = Rescale::ByT;
  else
    throw ValidationError("unknown rescale mode: " + rescale);
  opt.dim_cap = dim_cap;
  return opt;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    out.push_back(std::stoi(csv.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (out.empty()) throw ValidationError("empty list");
  return out;
}

int cmd_compile(const CommonFlags& common, int n, int d, int T, bool identity,
                const std::string& clock, bool no_input_penalty, const std::vector<int>& witness,
                const std::string& rescale, double quasi_eps) {
  const QuditRegister reg{n, d, common.dim_cap};
  Circuit circuit;
  if (identity) {
    circuit = Circuit::identity(reg, T);
  } else {
    Rng rng(common.seed);
    circuit = sample_local_random_circuit(reg, T, rng);
    circuit.seed = common.seed;
  }
  const CompileOptions opt =
      compile_options(clock, no_input_penalty, witness, rescale, common.dim_cap);
  const CompiledHamiltonian ch = compile_feynman_kitaev(circuit, opt);
  const NormalizationReport plain = gamma_norm(ch.hamiltonian);
  const NormalizationReport quasi = quasi_local_norm(ch.hamiltonian, quasi_eps);

  json j = run_header("compile", common.deterministic);
  j["config"] = {{"n", n},         {"d", d},
                 {"T", T},         {"identity", identity},
                 {"clock", clock}, {"input_penalty", !no_input_penalty},
                 {"rescale", rescale}, {"seed", common.seed},
                 {"quasi_eps", quasi_eps}};
  j["gamma"] = plain.gamma;
  j["quasi_gamma"] = quasi.gamma;
  j["warnings"] = ch.warnings;
  j["terms"] = int(ch.hamiltonian.terms.size());
  j["dim"] = ch.dim();

  const fs::path dir(common.out_dir);
  write_file(dir / "circuit.json", dump_json(circuit_to_json(circuit)));
  write_file(dir / "hamiltonian.json", dump_json(hamiltonian_to_json(ch.hamiltonian)));
  write_file(dir / "norms.csv", normalization_csv(plain, &quasi));
  write_file(dir / "compile.json", dump_json(j));
  std::cout << dump_json(j) << "\n";
  return 0;
}

int cmd_spectrum(const CommonFlags& common, const std::string& input, const std::string& method,
                 double tol, int max_restarts, const std::string& eigdump) {
  std::ifstream in(input);
  if (!in) throw ValidationError("cannot open " + input);
  json hj;
  in >> hj;
  const LocalHamiltonian h = hamiltonian_from_json(hj);
  const SparseOperator op = assemble(h, common.dim_cap);

  SpectralOptions sopts;
  sopts.tol = tol;
  sopts.max_restarts = max_restarts;
  sopts.seed = common.seed;
  SolverMethod m;
  if (method == "dense")
    m = SolverMethod::Dense;
  else if (method == "krylov")
    m = SolverMethod::Krylov;
  else if (method == "auto")
    m = (op.dim <= sopts.dense_cap) ? SolverMethod::Dense : SolverMethod::Krylov;
  else
    throw ValidationError("unknown method: " + method);
  const SpectrumResult r = ground_and_gap(op, m, sopts);

  json j = run_header("spectrum", common.deterministic);
  j["config"] = {{"input", input}, {"method", method}, {"tol", tol}};
  j["result"] = spectrum_to_json(r);
  write_file(fs::path(common.out_dir) / "spectrum.json", dump_json(j));
  if (!eigdump.empty()) {
    std::ostringstream os;
    os << "index,value,residual\n";
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
      os << i << "," << r.eigenvalues[i] << ",";
      if (i < r.residuals.size()) os << r.residuals[i];
      os << "\n";
    }
    write_file(fs::path(common.out_dir) / eigdump, os.str());
  }
  std::cout << dump_json(j) << "\n";
  return 0;
}

int cmd_check_amplitudes(const CommonFlags& common, int which_case, const std::string& profile,
                         int n, int d, int T, long long r, long long r1, double theta,
                         double rate, double ratio_constant, int window_lo, int window_hi) {
  Vector amps;
  if (profile == "uniform")
    amps = uniform_amplitudes(T + 1);
  else if (profile == "geometric")
    amps = geometric_amplitudes(T + 1, rate);
  else if (profile == "zero-window")
    amps = zero_window_amplitudes(T + 1, window_lo, window_hi);
  else
    throw ValidationError("unknown profile: " + profile);

  const QuditRegister reg{n, d, common.dim_cap};
  const Circuit circuit = Circuit::identity(reg, T);
  const HistoryState hs = standard_history_state(circuit, amps, basis_state(reg, 0),
                                                 TimePoset::chain_poset(T));
  AmplitudeCheckParams p;
  p.n = n;
  p.d = d;
  p.r = r;
  p.r1 = r1;
  p.theta = theta;
  p.ratio_constant = ratio_constant;

  json j = run_header("check-amplitudes", common.deterministic);
  j["config"] = {{"case", which_case}, {"profile", profile}, {"n", n}, {"d", d},
                 {"T", T},             {"r", r},             {"r1", r1}, {"theta", theta}};
  if (which_case == 1)
    j["report"] = case1_to_json(check_amplitudes_case1(hs, p));
  else if (which_case == 2)
    j["report"] = case2_to_json(check_amplitudes_case2(hs, p));
  else
    throw ValidationError("case must be 1 or 2");
  write_file(fs::path(common.out_dir) / "amplitude_check.json", dump_json(j));
  std::cout << dump_json(j) << "\n";
  return 0;
}

int cmd_reduce(const CommonFlags& common, int instances) {
  json rows = json::array();
  std::ostringstream csv;
  csv << "instance,dim,gap_input,gap_reduced,k_input,k_output,ok\n";
  for (int i = 0; i < instances; ++i) {
    Rng rng(Rng::derive(common.seed, {std::uint64_t(i)}));
    const GeneralizedInstance inst = random_generalized_instance(rng);
    const ReductionResult red = reduce_to_standard(inst.gen, inst.hamiltonian);
    const SparseOperator op = assemble(inst.hamiltonian, common.dim_cap);
    SpectralOptions sopts;
    const SpectrumResult full = ground_and_gap(op, SolverMethod::Dense, sopts);
    const Matrix compressed = restrict_dense(op, red.subspace_indices);
    Eigen::SelfAdjointEigenSolver<Matrix> es(compressed, Eigen::EigenvaluesOnly);
    const double gap_reduced = es.eigenvalues()[1] - es.eigenvalues()[0];
    const bool ok = full.gap <= gap_reduced + 1e-10 && red.k_output <= 2 * red.k_input;
    rows.push_back(json{{"instance", i},
                        {"dim", op.dim},
                        {"gap_input", full.gap},
                        {"gap_reduced", gap_reduced},
                        {"k_input", red.k_input},
                        {"k_output", red.k_output},
                        {"ok", ok}});
    csv << i << "," << op.dim << "," << full.gap << "," << gap_reduced << "," << red.k_input
        << "," << red.k_output << "," << int(ok) << "\n";
  }
  json j = run_header("reduce", common.deterministic);
  j["config"] = {{"instances", instances}, {"seed", common.seed}};
  j["rows"] = rows;
  write_file(fs::path(common.out_dir) / "reduce.json", dump_json(j));
  write_file(fs::path(common.out_dir) / "reduce.csv", csv.str());
  std::cout << dump_json(j) << "\n";
  return 0;
}

int cmd_experiment_gap(const CommonFlags& common, int n, int d, const std::string& t_list, int r,
                       int seeds, const std::string& clock, const std::string& rescale) {
  GapExperimentConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.T_values = parse_int_list(t_list);
  cfg.r = r;
  cfg.seeds = seeds;
  cfg.master_seed = common.seed;
  cfg.compile = compile_options(clock, false, {}, rescale, common.dim_cap);
  cfg.threads = common.threads;
  const GapExperimentReport rep = gap_experiment(cfg);
  json j = run_header("experiment gap", common.deterministic);
  j.update(gap_report_to_json(rep));
  write_file(fs::path(common.out_dir) / "gap_report.json", dump_json(j));
  write_file(fs::path(common.out_dir) / "gap_report.csv", gap_report_csv(rep));
  std::cout << dump_json(j["aggregates"]) << "\n";
  return 0;
}

int cmd_experiment_split(const CommonFlags& common, int n, int d, int T, long long r,
                         long long x0, const std::string& profile, double rate, int seeds) {
  SplitExperimentConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.T = T;
  cfg.r = r;
  cfg.x0 = x0;
  cfg.profile = (profile == "geometric") ? AmplitudeProfile::Geometric : AmplitudeProfile::Uniform;
  cfg.geometric_rate = rate;
  cfg.seeds = seeds;
  cfg.master_seed = common.seed;
  cfg.compile.dim_cap = common.dim_cap;
  cfg.threads = common.threads;
  const SplitExperimentReport rep = split_experiment(cfg);
  json j = run_header("experiment split", common.deterministic);
  j.update(split_report_to_json(rep));
  write_file(fs::path(common.out_dir) / "split_report.json", dump_json(j));
  write_file(fs::path(common.out_dir) / "split_report.csv", split_report_csv(rep));
  std::cout << "rows: " << rep.rows.size() << "\n";
  return 0;
}

int cmd_experiment_fh(const CommonFlags& common, int n, int d, int depth, int k,
                      const std::string& checkpoints, int seeds) {
  FhExperimentConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.depth = depth;
  cfg.k = k;
  cfg.checkpoints = parse_int_list(checkpoints);
  cfg.seeds = seeds;
  cfg.master_seed = common.seed;
  cfg.threads = common.threads;
  const FhExperimentReport rep = fh_experiment(cfg);
  json j = run_header("experiment fh", common.deterministic);
  j.update(fh_report_to_json(rep));
  write_file(fs::path(common.out_dir) / "fh_report.json", dump_json(j));
  write_file(fs::path(common.out_dir) / "fh_report.csv", fh_report_csv(rep));
  std::cout << dump_json(j["median"]) << "\n";
  return 0;
}

int cmd_experiment_design(const CommonFlags& common, const std::string& kind, int n, int d,
                          int depth, int s, int samples) {
  DesignEnsembleSpec spec;
  spec.kind = (kind == "haar") ? DesignEnsembleSpec::Kind::Haar
                               : DesignEnsembleSpec::Kind::LocalRandomCircuit;
  spec.n = n;
  spec.d = d;
  spec.depth = depth;
  spec.samples = samples;
  spec.seed = common.seed;
  const FramePotentialResult r = frame_potential(spec, s);
  json j = run_header("experiment design", common.deterministic);
  j["config"] = {{"kind", kind}, {"n", n},           {"d", d},
                 {"depth", depth}, {"s", s},         {"samples", samples},
                 {"seed", common.seed}};
  j["estimate"] = r.estimate;
  j["stderr"] = r.stderr_;
  j["haar_reference"] = r.haar_reference;
  write_file(fs::path(common.out_dir) / "design_report.json", dump_json(j));
  std::cout << dump_json(j) << "\n";
  return 0;
}

int cmd_bounds(const CommonFlags& common, const std::string& which, int n, int d, int k,
               long long m, long long T, double q, double q1, long long r, long long r1,
               double delta, double gamma, double alpha, double cross_sum, double eps,
               long long s, const std::string& variant) {
  json j = run_header("bounds", common.deterministic);
  json cfg{{"which", which}, {"n", n}, {"d", d}, {"k", k},         {"m", m},
           {"T", T},         {"q", q}, {"q1", q1}, {"r", r},       {"r1", r1},
           {"delta", delta}, {"gamma", gamma},     {"alpha", alpha}, {"eps", eps}};
  j["config"] = cfg;
  if (which == "lemma7" || which == "lemma9" || which == "both") {
    BoundParams p;
    p.n = n;
    p.d = d;
    p.k = k;
    p.m = m;
    p.T = T;
    p.q_poly = q;
    p.q1_poly = q1;
    p.r = r;
    p.r1 = r1;
    p.delta = delta;
    p.gamma = gamma;
    p.alpha_mass = alpha;
    p.cross_sum = cross_sum;
    if (variant == "1400") p.s_variant = DesignOrderVariant::SLemma9;
    const LemmaFailureBounds b = lemma_failure_bounds(p);
    j["lemma7_energy_rhs"] = b.lemma7_energy_rhs;
    j["lemma9_energy_rhs"] = b.lemma9_energy_rhs;
    j["lemma7_probability_log10"] = b.lemma7_log10;
    j["lemma9_probability_log10"] = b.lemma9_log10;
    j["lemma7_probability"] = bigfloat_str(b.lemma7_probability);
    j["lemma9_probability"] = bigfloat_str(b.lemma9_probability);
    j["s"] = b.s;
    j["s1"] = b.s1;
  } else if (which == "design-order") {
    DesignOrderVariant v = DesignOrderVariant::S1Lemma8;
    if (variant == "1400") v = DesignOrderVariant::SLemma9;
    if (variant == "1900") v = DesignOrderVariant::SAppendix;
    j["s"] = design_order(double(r), n, d, v);
  } else if (which == "design-length") {
    j["length"] = bhh_design_length(n, d, s, eps).str();
  } else if (which == "nets") {
    const NetSizes ns = net_sizes(m, k, d, eps, n, r);
    j["hamiltonian_net_log10"] = ns.hamiltonian_log10;
    j["circuit_net_log10"] = ns.circuit_log10;
    j["hamiltonian_net"] = bigfloat_str(ns.hamiltonian_net);
    j["circuit_net"] = bigfloat_str(ns.circuit_net);
  } else if (which == "low-tail") {
    j["value"] = bigfloat_str(
        low_tail_bound(BigFloat(2), BigFloat(std::pow(double(d), n) / 48.0), BigFloat(q1),
                       BigFloat(alpha), BigFloat(eps), std::max(1LL, s), BigFloat(delta)));
  } else {
    throw ValidationError("unknown bounds selector: " + which);
  }
  write_file(fs::path(common.out_dir) / "bounds.json", dump_json(j));
  std::cout << dump_json(j) << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"history-state Hamiltonian workbench"};
  app.set_config("--config", "", "INI config file; flags override file values");
  app.require_subcommand(1);
  CommonFlags common;

  // compile
  auto* compile = app.add_subcommand("compile", "compile a circuit to a clock Hamiltonian");
  int c_n = 2, c_d = 2, c_T = 4;
  bool c_identity = false, c_no_penalty = false;
  std::string c_clock = "register", c_rescale = "none";
  std::vector<int> c_witness;
  double c_quasi_eps = 1.0;
  add_common(compile, common);
  compile->add_option("--n", c_n);
  compile->add_option("--d", c_d);
  compile->add_option("--T", c_T);
  compile->add_flag("--identity", c_identity, "use the identity circuit");
  compile->add_option("--clock", c_clock, "register|unary");
  compile->add_flag("--no-input-penalty", c_no_penalty);
  compile->add_option("--witness", c_witness, "witness sites exempt from the input penalty");
  compile->add_option("--rescale", c_rescale, "none|by_T");
  compile->add_option("--quasi-eps", c_quasi_eps);

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "ground energy and gap of a stored Hamiltonian");
  std::string s_input, s_method = "auto", s_eigdump;
  double s_tol = 1e-8;
  int s_restarts = 400;
  add_common(spectrum, common);
  spectrum->add_option("--in", s_input)->required();
  spectrum->add_option("--method", s_method, "auto|dense|krylov");
  spectrum->add_option("--tol", s_tol);
  spectrum->add_option("--max-restarts", s_restarts);
  spectrum->add_option("--eigdump", s_eigdump, "CSV filename for the eigenvalue dump");

  // check-amplitudes
  auto* check = app.add_subcommand("check-amplitudes", "amplitude distribution predicates");
  int ca_case = 1, ca_n = 4, ca_d = 2, ca_T = 100, ca_lo = 0, ca_hi = 0;
  long long ca_r = 10, ca_r1 = 10;
  double ca_theta = 2.0, ca_rate = 1.0, ca_c = 1.0;
  std::string ca_profile = "uniform";
  add_common(check, common);
  check->add_option("--case", ca_case, "1|2");
  check->add_option("--profile", ca_profile, "uniform|geometric|zero-window");
  check->add_option("--n", ca_n);
  check->add_option("--d", ca_d);
  check->add_option("--T", ca_T);
  check->add_option("--r", ca_r);
  check->add_option("--r1", ca_r1);
  check->add_option("--theta", ca_theta);
  check->add_option("--rate", ca_rate);
  check->add_option("--ratio-constant", ca_c);
  check->add_option("--window-lo", ca_lo);
  check->add_option("--window-hi", ca_hi);

  // reduce
  auto* reduce = app.add_subcommand("reduce", "random generalized-to-standard reductions");
  int red_instances = 10;
  add_common(reduce, common);
  reduce->add_option("--instances", red_instances);

  // experiment
  auto* exp = app.add_subcommand("experiment", "seeded numerical experiments");
  exp->require_subcommand(1);
  auto* gap = exp->add_subcommand("gap", "gap scaling across circuit sizes");
  int g_n = 4, g_d = 2, g_r = 8, g_seeds = 20;
  std::string g_T = "8,16,32,64", g_clock = "register", g_rescale = "by_T";
  add_common(gap, common);
  gap->add_option("--n", g_n);
  gap->add_option("--d", g_d);
  gap->add_option("--T", g_T, "comma-separated circuit sizes");
  gap->add_option("--r", g_r);
  gap->add_option("--seeds", g_seeds);
  gap->add_option("--clock", g_clock);
  gap->add_option("--rescale", g_rescale);

  auto* split = exp->add_subcommand("split", "ground-energy split identity");
  int sp_n = 3, sp_d = 2, sp_T = 16, sp_seeds = 20;
  long long sp_r = 4, sp_x0 = 2;
  std::string sp_profile = "uniform";
  double sp_rate = 1.0;
  add_common(split, common);
  split->add_option("--n", sp_n);
  split->add_option("--d", sp_d);
  split->add_option("--T", sp_T);
  split->add_option("--r", sp_r);
  split->add_option("--x0", sp_x0);
  split->add_option("--profile", sp_profile);
  split->add_option("--rate", sp_rate);
  split->add_option("--seeds", sp_seeds);

  auto* fh = exp->add_subcommand("fh", "local indistinguishability decay");
  int f_n = 6, f_d = 2, f_depth = 200, f_k = 1, f_seeds = 20;
  std::string f_checkpoints = "0,25,50,100,150,200";
  add_common(fh, common);
  fh->add_option("--n", f_n);
  fh->add_option("--d", f_d);
  fh->add_option("--depth", f_depth);
  fh->add_option("--k", f_k);
  fh->add_option("--checkpoints", f_checkpoints);
  fh->add_option("--seeds", f_seeds);

  auto* design = exp->add_subcommand("design", "frame potential estimates");
  int de_n = 4, de_d = 2, de_depth = 500, de_s = 2, de_samples = 2000;
  std::string de_kind = "lrc";
  add_common(design, common);
  design->add_option("--kind", de_kind, "haar|lrc");
  design->add_option("--n", de_n);
  design->add_option("--d", de_d);
  design->add_option("--depth", de_depth);
  design->add_option("--s", de_s);
  design->add_option("--samples", de_samples);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "closed-form bound evaluators");
  std::string b_which = "both", b_variant = "1900";
  int b_n = 4, b_d = 2, b_k = 1;
  long long b_m = 5, b_T = 100, b_r = 10, b_r1 = 10, b_s = 1;
  double b_q = 1, b_q1 = 101, b_delta = 0.25, b_gamma = 1, b_alpha = 0, b_cross = 0, b_eps = 0.5;
  add_common(bounds, common);
  bounds->add_option("--which", b_which,
                     "lemma7|lemma9|both|design-order|design-length|nets|low-tail");
  bounds->add_option("--n", b_n);
  bounds->add_option("--d", b_d);
  bounds->add_option("--k", b_k);
  bounds->add_option("--m", b_m);
  bounds->add_option("--T", b_T);
  bounds->add_option("--q", b_q);
  bounds->add_option("--q1", b_q1);
  bounds->add_option("--r", b_r);
  bounds->add_option("--r1", b_r1);
  bounds->add_option("--delta", b_delta);
  bounds->add_option("--gamma", b_gamma);
  bounds->add_option("--alpha", b_alpha);
  bounds->add_option("--cross-sum", b_cross);
  bounds->add_option("--eps", b_eps);
  bounds->add_option("--s", b_s);
  bounds->add_option("--variant", b_variant, "11050|1400|1900");

  std::vector<std::string> argv = args;
  std::vector<char*> raw;
  raw.push_back(const_cast<char*>("histspec"));
  for (auto& a : argv) raw.push_back(a.data());

  try {
    app.parse(int(raw.size()), raw.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (compile->parsed())
      return cmd_compile(common, c_n, c_d, c_T, c_identity, c_clock, c_no_penalty, c_witness,
                         c_rescale, c_quasi_eps);
    if (spectrum->parsed())
      return cmd_spectrum(common, s_input, s_method, s_tol, s_restarts, s_eigdump);
    if (check->parsed())
      return cmd_check_amplitudes(common, ca_case, ca_profile, ca_n, ca_d, ca_T, ca_r, ca_r1,
                                  ca_theta, ca_rate, ca_c, ca_lo, ca_hi);
    if (reduce->parsed()) return cmd_reduce(common, red_instances);
    if (exp->parsed()) {
      if (gap->parsed())
        return cmd_experiment_gap(common, g_n, g_d, g_T, g_r, g_seeds, g_clock, g_rescale);
      if (split->parsed())
        return cmd_experiment_split(common, sp_n, sp_d, sp_T, sp_r, sp_x0, sp_profile, sp_rate,
                                    sp_seeds);
      if (fh->parsed())
        return cmd_experiment_fh(common, f_n, f_d, f_depth, f_k, f_checkpoints, f_seeds);
      if (design->parsed())
        return cmd_experiment_design(common, de_kind, de_n, de_d, de_depth, de_s, de_samples);
    }
    if (bounds->parsed())
      return cmd_bounds(common, b_which, b_n, b_d, b_k, b_m, b_T, b_q, b_q1, b_r, b_r1, b_delta,
                        b_gamma, b_alpha, b_cross, b_eps, b_s, b_variant);
    std::cerr << app.help() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "solver non-convergence: " << e.what() << "\n";
    return 4;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace histspec
