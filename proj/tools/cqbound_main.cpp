#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "cqbound/bounds.hpp"
#include "cqbound/eof.hpp"
#include "cqbound/explorer.hpp"
#include "cqbound/io.hpp"
#include "cqbound/states.hpp"
#include "cqbound/version.hpp"

namespace {

using namespace cqbound;

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

CQState load_cq_file(const std::string& path) {
  AnyState s = load_state(path);
  if (auto* cq = std::get_if<CQState>(&s)) return std::move(*cq);
  throw ParseError(path + ": expected a cq state");
}

DensityOperator load_density_file(const std::string& path) {
  AnyState s = load_state(path);
  if (auto* d = std::get_if<DensityOperator>(&s)) return std::move(*d);
  throw ParseError(path + ": expected a density state");
}

/// Primary report to stdout; optional copy to --out plus a manifest that
/// records everything needed to reproduce the run.
void emit(const std::string& text, const std::string& out_path, RunManifest manifest) {
  std::cout << text;
  if (!text.empty() && text.back() != '\n') std::cout << '\n';
  if (out_path.empty()) return;
  write_text_file(out_path, text);
  manifest.outputs.insert(manifest.outputs.begin(), out_path);
  write_text_file(out_path + ".manifest.json", to_json(manifest).dump(2) + "\n");
  std::cerr << "wrote " << out_path << " and " << out_path << ".manifest.json\n";
}

int run_certify(const std::string& rho_path, const std::string& sigma_path,
                const std::string& out) {
  const auto start = Clock::now();
  const CQState rho = load_cq_file(rho_path);
  const CQState sigma = load_cq_file(sigma_path);
  const BoundReport report = certify_prop1(rho, sigma);
  RunManifest manifest{"certify", Json{{"rho", rho_path}, {"sigma", sigma_path}}, 0,
                       elapsed_seconds(start), {}};
  emit(to_json(report).dump(2), out, std::move(manifest));
  return report.satisfied ? 0 : 2;
}

int run_sweep(const std::vector<std::size_t>& dims, const std::vector<double>& eps_grid,
              int trials, std::size_t alphabet, std::uint64_t seed, const std::string& out) {
  const auto start = Clock::now();
  std::vector<SweepRow> rows;
  bool all_satisfied = true;
  for (std::size_t d : dims) {
    for (std::size_t ci = 0; ci < eps_grid.size(); ++ci) {
      const double eps = eps_grid[ci];
      SweepRow worst;
      bool have = false;
      for (int t = 0; t < trials; ++t) {
        const std::uint64_t ts = mix_seed(mix_seed(mix_seed(seed, d), ci), t);
        const CQState rho = sample_cq(alphabet, d, mix_seed(ts, 0));
        CQState sigma;
        try {
          sigma = pair_at_distance_cq(rho, eps, mix_seed(ts, 1));
        } catch (const Unreachable&) {
          continue;
        }
        const BoundReport r = certify_prop1(rho, sigma);
        if (!have || r.margin < worst.margin) {
          worst = SweepRow{d, eps, r.lhs, r.rhs, r.margin, r.satisfied};
          have = true;
        }
      }
      if (!have) {
        std::cerr << "sweep: no pair reached epsilon " << eps << " at d=" << d << ", cell skipped\n";
        continue;
      }
      all_satisfied = all_satisfied && worst.satisfied;
      rows.push_back(worst);
    }
  }
  Json config{{"dims", dims},   {"eps", eps_grid},       {"trials", trials},
              {"alphabet", alphabet}, {"seed", seed}};
  emit(sweep_csv(rows), out,
       RunManifest{"sweep", std::move(config), seed, elapsed_seconds(start), {}});
  return all_satisfied ? 0 : 2;
}

int run_saturate(std::size_t dim_b, double eps, const std::string& out) {
  const auto start = Clock::now();
  const auto pair = saturating_pair(dim_b, eps);
  const BoundReport report = certify_prop1(pair.first, pair.second);
  std::vector<std::string> extras;
  if (!out.empty()) {
    write_text_file(out + ".rho.json", to_json(pair.first).dump(2) + "\n");
    write_text_file(out + ".sigma.json", to_json(pair.second).dump(2) + "\n");
    extras = {out + ".rho.json", out + ".sigma.json"};
    std::cerr << "wrote " << out << ".rho.json and " << out << ".sigma.json\n";
  }
  RunManifest manifest{"saturate", Json{{"dim_b", dim_b}, {"eps", eps}}, 0,
                       elapsed_seconds(start), std::move(extras)};
  emit(to_json(report).dump(2), out.empty() ? "" : out + ".report.json", std::move(manifest));
  return report.satisfied ? 0 : 2;
}

CQState profile_state(const std::string& profile, std::size_t alphabet, std::size_t dim_b,
                      std::uint64_t seed) {
  CQState s = sample_cq(alphabet, dim_b, mix_seed(seed, 0));
  std::vector<double> weights(alphabet);
  double sum = 0.0;
  for (std::size_t x = 0; x < alphabet; ++x) {
    weights[x] = profile == "zeta" ? 1.0 / static_cast<double>((x + 1) * (x + 1))
                                   : std::pow(2.0, -static_cast<double>(x + 1));
    sum += weights[x];
  }
  for (double& w : weights) w /= sum;
  s.weights = ProbabilityDistribution{alphabet, std::move(weights)};
  return s;
}

int run_truncate(const std::string& rho_path, const std::string& sigma_path,
                 const std::string& profile, std::size_t alphabet, std::size_t dim_b, double eps,
                 const std::vector<std::size_t>& levels, std::uint64_t seed,
                 const std::string& out) {
  const auto start = Clock::now();
  const CQState rho =
      rho_path.empty() ? profile_state(profile, alphabet, dim_b, seed) : load_cq_file(rho_path);
  const CQState sigma = sigma_path.empty() ? pair_at_distance_cq(rho, eps, mix_seed(seed, 1))
                                           : load_cq_file(sigma_path);
  const double eps_full = trace_distance_cq(rho, sigma);
  const auto steps = certify_countable(rho, sigma, levels);
  bool ok = true;
  for (const auto& step : steps)
    ok = ok && step.report.satisfied && step.report.epsilon <= eps_full + 1e-9;
  Json body = to_json(steps);
  body["epsilon_full"] = eps_full;
  Json config{{"rho", rho_path},   {"sigma", sigma_path}, {"profile", profile},
              {"alphabet", alphabet}, {"dim_b", dim_b},   {"eps", eps},
              {"levels", levels},  {"seed", seed}};
  emit(body.dump(2), out,
       RunManifest{"truncate", std::move(config), seed, elapsed_seconds(start), {}});
  return ok ? 0 : 2;
}

int run_eof(const std::string& rho_path, const std::string& sigma_path, std::size_t dim_a,
            std::size_t dim_b, int starts, std::uint64_t seed, const std::string& out) {
  const auto start = Clock::now();
  EofConfig cfg;
  cfg.starts = starts;
  cfg.seed = seed;
  const DensityOperator rho = load_density_file(rho_path);
  Json config{{"rho", rho_path},  {"sigma", sigma_path}, {"dim_a", dim_a},
              {"dim_b", dim_b},   {"starts", starts},    {"seed", seed}};
  if (sigma_path.empty()) {
    const EofResult result = eof_estimate(rho, dim_a, dim_b, cfg);
    emit(to_json(result).dump(2), out,
         RunManifest{"eof", std::move(config), seed, elapsed_seconds(start), {}});
    return 0;
  }
  const DensityOperator sigma = load_density_file(sigma_path);
  const EofCorollaryReport report = certify_eof_corollary(rho, sigma, dim_a, dim_b, cfg);
  emit(to_json(report).dump(2), out,
       RunManifest{"eof", std::move(config), seed, elapsed_seconds(start), {}});
  return report.report.satisfied ? 0 : 2;
}

int run_explore(const std::string& conjecture, std::size_t alphabet, std::size_t dim_a,
                std::size_t dim_b, const std::vector<double>& eps_grid, int trials,
                std::uint64_t seed, int refine_steps, const std::string& format,
                const std::string& out) {
  const auto start = Clock::now();
  SearchConfig cfg;
  cfg.conjecture = conjecture == "fq" ? Conjecture::fq : Conjecture::qc;
  cfg.dim1 = cfg.conjecture == Conjecture::qc ? alphabet : dim_a;
  cfg.dim2 = dim_b;
  cfg.epsilon_grid = eps_grid;
  cfg.trials_per_cell = trials;
  cfg.seed = seed;
  cfg.local_refine_steps = refine_steps;
  const SearchRecord record = search(cfg);

  bool violation = false;
  std::vector<std::string> extras;
  for (std::size_t ci = 0; ci < record.cells.size(); ++ci) {
    const CellRecord& cell = record.cells[ci];
    if (!cell.violation_candidate) continue;
    violation = true;
    const GapResult recheck = verify_cell(cfg, cell);
    std::cerr << "violation candidate in cell " << ci << ": margin " << cell.best_margin
              << ", re-verified " << recheck.margin << "\n";
    if (!out.empty()) {
      const std::string base = out + ".cell" + std::to_string(ci);
      if (cfg.conjecture == Conjecture::qc) {
        const auto& pair = std::get<CqPair>(cell.witness);
        write_text_file(base + ".rho.json", to_json(pair.rho).dump(2) + "\n");
        write_text_file(base + ".sigma.json", to_json(pair.sigma).dump(2) + "\n");
      } else {
        const auto& pair = std::get<DmPair>(cell.witness);
        write_text_file(base + ".rho.json", to_json(pair.rho).dump(2) + "\n");
        write_text_file(base + ".sigma.json", to_json(pair.sigma).dump(2) + "\n");
      }
      extras.push_back(base + ".rho.json");
      extras.push_back(base + ".sigma.json");
      std::cerr << "wrote witness " << base << ".{rho,sigma}.json\n";
    }
  }
  const std::string text = format == "json" ? to_json(record).dump(2) : search_csv(record);
  emit(text, out,
       RunManifest{"explore", to_json(cfg), seed, elapsed_seconds(start), std::move(extras)});
  return violation ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuity bounds for conditional entropy of cq states"};
  app.set_version_flag("--version", std::string(cqbound::kVersion));
  app.require_subcommand(1);

  std::string rho_path, sigma_path, out, format = "csv", profile = "geometric",
              conjecture = "qc";
  std::vector<double> eps_grid;
  double eps = 0.1;
  std::vector<std::size_t> dims{2};
  std::vector<std::size_t> levels{4, 8, 16, 32};
  std::size_t dim_a = 2, dim_b = 2;
  std::size_t sweep_alphabet = 3, truncate_alphabet = 64, explore_alphabet = 2;
  int trials = 100, starts = 32, refine_steps = 64;
  std::uint64_t seed = 1;

  auto* certify = app.add_subcommand("certify", "Certify the cq continuity bound for a state pair");
  certify->add_option("--rho", rho_path, "cq state JSON file")->required();
  certify->add_option("--sigma", sigma_path, "cq state JSON file")->required();
  certify->add_option("--out", out, "write report here (plus manifest)");

  auto* sweep = app.add_subcommand("sweep", "Random-pair bound sweep over a (d, eps) grid");
  sweep->add_option("--dim-b", dims, "B dimensions to sweep");
  sweep->add_option("--eps", eps_grid, "epsilon grid");
  sweep->add_option("--trials", trials, "trials per cell");
  sweep->add_option("--alphabet", sweep_alphabet, "classical alphabet size");
  sweep->add_option("--seed", seed, "RNG seed");
  sweep->add_option("--out", out, "write CSV here (plus manifest)");

  auto* saturate = app.add_subcommand("saturate", "Generate and certify the saturating pair");
  saturate->add_option("--dim-b", dim_b, "B dimension")->required();
  saturate->add_option("--eps", eps, "trace distance")->required();
  saturate->add_option("--out", out, "prefix for .rho/.sigma/.report JSON files");

  auto* truncate = app.add_subcommand("truncate", "Finite proxy of the countable-alphabet bound");
  truncate->add_option("--rho", rho_path, "cq state JSON file (overrides --profile)");
  truncate->add_option("--sigma", sigma_path, "cq state JSON file");
  truncate->add_option("--profile", profile, "weight profile: geometric or zeta")
      ->check(CLI::IsMember({"geometric", "zeta"}));
  truncate->add_option("--alphabet", truncate_alphabet, "proxy alphabet size");
  truncate->add_option("--dim-b", dim_b, "B dimension");
  truncate->add_option("--eps", eps, "target trace distance for the generated pair");
  truncate->add_option("--levels", levels, "truncation levels");
  truncate->add_option("--seed", seed, "RNG seed");
  truncate->add_option("--out", out, "write report here (plus manifest)");

  auto* eof = app.add_subcommand("eof", "EoF estimate, or corollary check when --sigma is given");
  eof->add_option("--rho", rho_path, "density state JSON file")->required();
  eof->add_option("--sigma", sigma_path, "density state JSON file (corollary mode)");
  eof->add_option("--dim-a", dim_a, "A dimension")->required();
  eof->add_option("--dim-b", dim_b, "B dimension")->required();
  eof->add_option("--starts", starts, "optimizer starts");
  eof->add_option("--seed", seed, "RNG seed");
  eof->add_option("--out", out, "write report here (plus manifest)");

  auto* explore = app.add_subcommand("explore", "Stochastic search on the open conjectures");
  explore->add_option("--conjecture", conjecture, "qc or fq")
      ->check(CLI::IsMember({"qc", "fq"}));
  explore->add_option("--alphabet", explore_alphabet, "d_X (qc conjecture)");
  explore->add_option("--dim-a", dim_a, "d_A (fq conjecture)");
  explore->add_option("--dim-b", dim_b, "d_B");
  explore->add_option("--eps", eps_grid, "epsilon grid");
  explore->add_option("--trials", trials, "trials per cell");
  explore->add_option("--seed", seed, "RNG seed");
  explore->add_option("--refine-steps", refine_steps, "local refinement steps");
  explore->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  explore->add_option("--out", out, "write record here (plus manifest and witnesses)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*certify) return run_certify(rho_path, sigma_path, out);
    if (*sweep) return run_sweep(dims, eps_grid, trials, sweep_alphabet, seed, out);
    if (*saturate) return run_saturate(dim_b, eps, out);
    if (*truncate)
      return run_truncate(rho_path, sigma_path, profile, truncate_alphabet, dim_b, eps, levels,
                          seed, out);
    if (*eof) return run_eof(rho_path, sigma_path, dim_a, dim_b, starts, seed, out);
    if (*explore)
      return run_explore(conjecture, explore_alphabet, dim_a, dim_b, eps_grid, trials, seed,
                         refine_steps, format, out);
  } catch (const cqbound::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
