#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "histspec/analysis.hpp"
#include "histspec/bounds.hpp"
#include "histspec/history.hpp"
#include "histspec/spectral.hpp"

namespace histspec {

struct PowerLawFit {
  double exponent = 0.0;  // slope of log(gap) vs log(T)
  double intercept = 0.0;
  double r2 = 0.0;
};

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct GapExperimentConfig {
  int n = 4, d = 2;
  std::vector<int> T_values = {8, 16, 32, 64};
  int r = 8;
  int seeds = 20;
  std::uint64_t master_seed = 42;
  CompileOptions compile;
  SpectralOptions spectral;
  double bound_delta = 0.0;  // 0: use the proof's plug-in (1-alpha)/((q1+m)T)
  int threads = 1;
};

struct GapRow {
  int T = 0;
  int seed_index = 0;
  std::uint64_t subseed = 0;
  double e0 = 0, gap = 0, level_gap = 0;
  bool degenerate = false;
  double phi_energy = 0, phi_energy_gap = 0;
  double overlap_abs = 0;
  double gamma = 0;
  double bound_rhs = 0;
  bool bound_pass = false;
  bool converged = true;
  std::string error;
};

struct GapExperimentReport {
  GapExperimentConfig config;
  std::vector<GapRow> rows;
  std::map<int, double> median_gap;
  PowerLawFit fit;
};

/// Per (T, seed): sample circuit, compile, solve, build the truncated flipped
/// witness, and compare its energy surplus against the two-lemma right-hand
/// side evaluated at the same parameters.
GapExperimentReport gap_experiment(const GapExperimentConfig& config);

enum class AmplitudeProfile { Uniform, Geometric };

struct SplitExperimentConfig {
  int n = 3, d = 2;
  int T = 16;
  long long r = 4, x0 = 2;
  AmplitudeProfile profile = AmplitudeProfile::Uniform;
  double geometric_rate = 1.0;
  int seeds = 20;
  std::uint64_t master_seed = 42;
  CompileOptions compile;
  SpectralOptions spectral;
  double bound_delta = 0.05;
  double remark2_c = 1.0;  // low-energy window E0 + c/T for the truncated family
  int threads = 1;
};

struct SplitRow {
  int seed_index = 0;
  std::uint64_t subseed = 0;
  double e0 = 0;              // solver ground energy
  double psi_energy = 0;      // <Psi|H|Psi> of the profiled history state
  double lambda = 0, d0 = 0, d1 = 0;
  double cross_re = 0;
  double identity_residual_sqrt = 0;   // coefficient 2 sqrt(lambda(1-lambda))
  double identity_residual_paper = 0;  // the printed coefficient 2 lambda(1-lambda)
  double mixed_lhs = 0;   // lambda (D0-E0) + (1-lambda)(D1-E0)
  double bound_rhs = 0;
  bool bound_pass = false;
  int remark2_count = 0;  // orthogonal truncated flipped-initial states below E0 + c/T
  std::string error;
};

struct SplitExperimentReport {
  SplitExperimentConfig config;
  std::vector<SplitRow> rows;
};

SplitExperimentReport split_experiment(const SplitExperimentConfig& config);

struct FhExperimentConfig {
  int n = 6, d = 2;
  int depth = 200;
  int k = 1;
  std::vector<int> checkpoints = {0, 25, 50, 100, 150, 200};
  int seeds = 20;
  std::uint64_t master_seed = 42;
  int threads = 1;
};

struct FhExperimentReport {
  FhExperimentConfig config;
  std::vector<std::vector<FhProfilePoint>> per_seed;
  std::vector<FhProfilePoint> median;  // per checkpoint
};

FhExperimentReport fh_experiment(const FhExperimentConfig& config);

/// Run fn(i) for i in [0, count) on a pool; results land in slot order.
void parallel_cells(int count, int threads, const std::function<void(int)>& fn);

double median(std::vector<double> values);

}  // namespace histspec
