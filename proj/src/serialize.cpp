#include "histspec/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <sstream>

#include "histspec/errors.hpp"

namespace histspec {

using nlohmann::json;

std::string hex_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.13a", v);
  return buf;
}

double parse_hex_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw ValidationError("cannot parse hex double: " + s);
  return v;
}

namespace {

json matrix_to_json_re(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(hex_double(m(i, j).real()));
    rows.push_back(row);
  }
  return rows;
}

json matrix_to_json_im(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(hex_double(m(i, j).imag()));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& re, const json& im) {
  const Eigen::Index rows = Eigen::Index(re.size());
  if (rows == 0) return Matrix(0, 0);
  const Eigen::Index cols = Eigen::Index(re[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = Complex(parse_hex_double(re[i][j].get<std::string>()),
                        parse_hex_double(im[i][j].get<std::string>()));
  return m;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(json::array({hex_double(v[i].real()), hex_double(v[i].imag())}));
  }
  return out;
}

Vector vector_from_json(const json& j) {
  Vector v(Eigen::Index(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = Complex(parse_hex_double(j[i][0].get<std::string>()),
                   parse_hex_double(j[i][1].get<std::string>()));
  return v;
}

std::string csvnum(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

json circuit_to_json(const Circuit& c) {
  json j;
  j["n"] = c.reg.n;
  j["d"] = c.reg.d;
  j["T"] = c.T();
  if (c.seed)
    j["seed"] = *c.seed;
  else
    j["seed"] = nullptr;
  json gates = json::array();
  for (const Gate& g : c.gates) {
    json gj;
    gj["t"] = g.time_index;
    gj["site"] = g.site;
    gj["u_re"] = matrix_to_json_re(g.u);
    gj["u_im"] = matrix_to_json_im(g.u);
    gates.push_back(gj);
  }
  j["gates"] = gates;
  return j;
}

Circuit circuit_from_json(const json& j) {
  Circuit c;
  c.reg.n = j.at("n").get<int>();
  c.reg.d = j.at("d").get<int>();
  if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
  for (const json& gj : j.at("gates")) {
    Gate g;
    g.time_index = gj.at("t").get<int>();
    g.site = gj.at("site").get<int>();
    g.u = matrix_from_json(gj.at("u_re"), gj.at("u_im"));
    c.gates.push_back(std::move(g));
  }
  c.validate();
  return c;
}

json hamiltonian_to_json(const LocalHamiltonian& h) {
  json j;
  j["dims"] = h.dims;
  json terms = json::array();
  for (const LocalTerm& t : h.terms) {
    json tj;
    tj["support"] = t.support;
    tj["h_re"] = matrix_to_json_re(t.matrix);
    tj["h_im"] = matrix_to_json_im(t.matrix);
    terms.push_back(tj);
  }
  j["terms"] = terms;
  return j;
}

LocalHamiltonian hamiltonian_from_json(const json& j) {
  LocalHamiltonian h;
  h.dims = j.at("dims").get<std::vector<int>>();
  for (const json& tj : j.at("terms")) {
    LocalTerm t;
    t.support = tj.at("support").get<std::vector<int>>();
    t.matrix = matrix_from_json(tj.at("h_re"), tj.at("h_im"));
    h.terms.push_back(std::move(t));
  }
  h.validate();
  return h;
}

json history_to_json(const HistoryState& hs) {
  json j;
  j["n"] = hs.n;
  j["d"] = hs.d;
  j["poset"] = {{"size", hs.poset.size},
                {"relations", hs.poset.relations},
                {"chain", hs.poset.chain}};
  j["clock_labels"] = hs.clock_labels;
  j["amplitudes"] = vector_to_json(hs.amplitudes);
  json states = json::array();
  for (const Vector& v : hs.comp_states) states.push_back(vector_to_json(v));
  j["comp_states"] = states;
  json junk = json::object();
  for (auto& [p, v] : hs.junk_unitaries)
    junk[std::to_string(p)] = {{"re", matrix_to_json_re(v)}, {"im", matrix_to_json_im(v)}};
  j["junk_unitaries"] = junk;
  return j;
}

HistoryState history_from_json(const json& j) {
  HistoryState hs;
  hs.n = j.at("n").get<int>();
  hs.d = j.at("d").get<int>();
  hs.poset.size = j.at("poset").at("size").get<int>();
  hs.poset.relations = j.at("poset").at("relations").get<std::vector<std::pair<int, int>>>();
  hs.poset.chain = j.at("poset").at("chain").get<std::vector<int>>();
  hs.poset.finalize();
  hs.clock_labels = j.at("clock_labels").get<std::vector<std::string>>();
  hs.amplitudes = vector_from_json(j.at("amplitudes"));
  for (const json& sv : j.at("comp_states")) hs.comp_states.push_back(vector_from_json(sv));
  for (auto it = j.at("junk_unitaries").begin(); it != j.at("junk_unitaries").end(); ++it)
    hs.junk_unitaries[std::stoi(it.key())] =
        matrix_from_json(it.value().at("re"), it.value().at("im"));
  hs.validate();
  return hs;
}

json spectrum_to_json(const SpectrumResult& r) {
  json j;
  j["e0"] = r.e0;
  j["gap"] = r.gap;
  j["level_gap"] = r.level_gap;
  j["degenerate"] = r.degenerate;
  j["level_gap_truncated"] = r.level_gap_truncated;
  j["ground_multiplicity"] = r.ground_multiplicity;
  j["method"] = (r.method == SolverMethod::Dense) ? "dense" : "krylov";
  j["residuals"] = r.residuals;
  json ev = json::array();
  const std::size_t cap = std::min<std::size_t>(r.eigenvalues.size(), 64);
  for (std::size_t i = 0; i < cap; ++i) ev.push_back(r.eigenvalues[i]);
  j["eigenvalues_low"] = ev;
  return j;
}

json normalization_to_json(const NormalizationReport& plain, const NormalizationReport* quasi) {
  json j;
  j["gamma"] = plain.gamma;
  j["per_qudit"] = plain.per_qudit;
  if (quasi) {
    j["quasi_gamma"] = quasi->gamma;
    j["quasi_per_qudit"] = quasi->per_qudit;
    j["epsilon"] = quasi->epsilon.value_or(0.0);
  }
  return j;
}

std::string normalization_csv(const NormalizationReport& plain, const NormalizationReport* quasi) {
  std::ostringstream os;
  os << "qudit_index,sum,weighted_sum\n";
  for (std::size_t q = 0; q < plain.per_qudit.size(); ++q) {
    os << q << "," << csvnum(plain.per_qudit[q]) << ",";
    if (quasi) os << csvnum(quasi->per_qudit[q]);
    os << "\n";
  }
  return os.str();
}

json case1_to_json(const Case1Report& r) {
  return json{{"numerator", r.numerator},
              {"denominator", r.denominator},
              {"ratio", r.ratio},
              {"tail_mass", r.tail_mass},
              {"ratio_threshold", r.ratio_threshold},
              {"tail_threshold", r.tail_threshold},
              {"ratio_ok", r.ratio_ok},
              {"tail_ok", r.tail_ok},
              {"pass", r.pass},
              {"literal_scale_log10", r.literal_scale_log10},
              {"r_clears_literal", r.r_clears_literal},
              {"r_clears_scaled", r.r_clears_scaled}};
}

json case2_to_json(const Case2Report& r) {
  json slices = json::array();
  for (const auto& s : r.slices)
    slices.push_back(json{{"x0", s.x0},
                          {"slice_mass", s.slice_mass},
                          {"lambda", s.lambda},
                          {"one_minus_lambda", s.one_minus_lambda},
                          {"ineq1", s.ineq1},
                          {"ineq2", s.ineq2},
                          {"ineq3", s.ineq3}});
  json j{{"u", r.u},
         {"kappa", r.kappa},
         {"x_min", r.x_min},
         {"x_max", r.x_max},
         {"slice_threshold", r.slice_threshold},
         {"mass_threshold", r.mass_threshold},
         {"slices", slices},
         {"pass", r.pass},
         {"literal_scale_log10", r.literal_scale_log10},
         {"r_clears_literal", r.r_clears_literal},
         {"r_clears_scaled", r.r_clears_scaled}};
  if (r.x0_found)
    j["x0_found"] = *r.x0_found;
  else
    j["x0_found"] = nullptr;
  return j;
}

namespace {

json gap_config_to_json(const GapExperimentConfig& c) {
  return json{{"n", c.n},
              {"d", c.d},
              {"T_values", c.T_values},
              {"r", c.r},
              {"seeds", c.seeds},
              {"master_seed", c.master_seed},
              {"clock", c.compile.clock == ClockKind::Register ? "register" : "unary"},
              {"input_penalty", c.compile.include_input_penalty},
              {"rescale", c.compile.rescale == Rescale::ByT ? "by_T" : "none"},
              {"bound_delta", c.bound_delta},
              {"threads", c.threads},
              {"rng", Rng::kName}};
}

}  // namespace

json gap_report_to_json(const GapExperimentReport& r) {
  json rows = json::array();
  for (const GapRow& row : r.rows) {
    rows.push_back(json{{"T", row.T},
                        {"seed_index", row.seed_index},
                        {"subseed", row.subseed},
                        {"E0", row.e0},
                        {"gap", row.gap},
                        {"level_gap", row.level_gap},
                        {"degenerate", row.degenerate},
                        {"phi_energy", row.phi_energy},
                        {"phi_energy_gap", row.phi_energy_gap},
                        {"overlap_abs", row.overlap_abs},
                        {"gamma", row.gamma},
                        {"bound_rhs", row.bound_rhs},
                        {"bound_pass", row.bound_pass},
                        {"converged", row.converged},
                        {"error", row.error}});
  }
  json medians = json::object();
  for (auto& [T, g] : r.median_gap) medians[std::to_string(T)] = g;
  return json{{"config", gap_config_to_json(r.config)},
              {"rows", rows},
              {"aggregates",
               {{"medians", medians},
                {"fit_exponent", r.fit.exponent},
                {"fit_intercept", r.fit.intercept},
                {"fit_r2", r.fit.r2}}}};
}

std::string gap_report_csv(const GapExperimentReport& r) {
  std::ostringstream os;
  os << "T,seed_index,subseed,E0,gap,level_gap,degenerate,phi_energy,phi_energy_gap,"
        "overlap_abs,gamma,bound_rhs,bound_pass,converged\n";
  for (const GapRow& row : r.rows) {
    os << row.T << "," << row.seed_index << "," << row.subseed << "," << csvnum(row.e0) << ","
       << csvnum(row.gap) << "," << csvnum(row.level_gap) << "," << int(row.degenerate) << ","
       << csvnum(row.phi_energy) << "," << csvnum(row.phi_energy_gap) << ","
       << csvnum(row.overlap_abs) << "," << csvnum(row.gamma) << "," << csvnum(row.bound_rhs)
       << "," << int(row.bound_pass) << "," << int(row.converged) << "\n";
  }
  return os.str();
}

json split_report_to_json(const SplitExperimentReport& r) {
  json rows = json::array();
  for (const SplitRow& row : r.rows) {
    rows.push_back(json{{"seed_index", row.seed_index},
                        {"subseed", row.subseed},
                        {"E0", row.e0},
                        {"psi_energy", row.psi_energy},
                        {"lambda", row.lambda},
                        {"D0", row.d0},
                        {"D1", row.d1},
                        {"cross_re", row.cross_re},
                        {"identity_residual_sqrt", row.identity_residual_sqrt},
                        {"identity_residual_paper", row.identity_residual_paper},
                        {"mixed_lhs", row.mixed_lhs},
                        {"bound_rhs", row.bound_rhs},
                        {"bound_pass", row.bound_pass},
                        {"remark2_count", row.remark2_count},
                        {"error", row.error}});
  }
  return json{{"config",
               {{"n", r.config.n},
                {"d", r.config.d},
                {"T", r.config.T},
                {"r", r.config.r},
                {"x0", r.config.x0},
                {"profile", r.config.profile == AmplitudeProfile::Uniform ? "uniform" : "geometric"},
                {"geometric_rate", r.config.geometric_rate},
                {"seeds", r.config.seeds},
                {"master_seed", r.config.master_seed},
                {"bound_delta", r.config.bound_delta},
                {"remark2_c", r.config.remark2_c},
                {"rng", Rng::kName}}},
              {"rows", rows}};
}

std::string split_report_csv(const SplitExperimentReport& r) {
  std::ostringstream os;
  os << "seed_index,subseed,E0,psi_energy,lambda,D0,D1,cross_re,identity_residual_sqrt,"
        "identity_residual_paper,mixed_lhs,bound_rhs,bound_pass,remark2_count\n";
  for (const SplitRow& row : r.rows) {
    os << row.seed_index << "," << row.subseed << "," << csvnum(row.e0) << ","
       << csvnum(row.psi_energy) << "," << csvnum(row.lambda) << "," << csvnum(row.d0) << ","
       << csvnum(row.d1) << "," << csvnum(row.cross_re) << ","
       << csvnum(row.identity_residual_sqrt) << "," << csvnum(row.identity_residual_paper) << ","
       << csvnum(row.mixed_lhs) << "," << csvnum(row.bound_rhs) << "," << int(row.bound_pass)
       << "," << row.remark2_count << "\n";
  }
  return os.str();
}

json fh_report_to_json(const FhExperimentReport& r) {
  json per_seed = json::array();
  for (const auto& series : r.per_seed) {
    json s = json::array();
    for (const auto& pt : series) s.push_back(json{{"depth", pt.depth}, {"value", pt.value}});
    per_seed.push_back(s);
  }
  json med = json::array();
  for (const auto& pt : r.median) med.push_back(json{{"depth", pt.depth}, {"value", pt.value}});
  return json{{"config",
               {{"n", r.config.n},
                {"d", r.config.d},
                {"depth", r.config.depth},
                {"k", r.config.k},
                {"checkpoints", r.config.checkpoints},
                {"seeds", r.config.seeds},
                {"master_seed", r.config.master_seed},
                {"rng", Rng::kName}}},
              {"per_seed", per_seed},
              {"median", med}};
}

std::string fh_report_csv(const FhExperimentReport& r) {
  std::ostringstream os;
  os << "seed_index,depth,value\n";
  for (std::size_t si = 0; si < r.per_seed.size(); ++si)
    for (const auto& pt : r.per_seed[si])
      os << si << "," << pt.depth << "," << csvnum(pt.value) << "\n";
  return os.str();
}

std::string dump_json(const json& j) { return j.dump(2); }

}  // namespace histspec
