#include "oqsim/run.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>

#include "oqsim/cascade.hpp"
#include "oqsim/csv.hpp"
#include "oqsim/model_io.hpp"
#include "oqsim/models.hpp"
#include "oqsim/observables.hpp"
#include "oqsim/propagate.hpp"
#include "oqsim/trajectories.hpp"

namespace oqsim {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<double> time_grid(double t_max, int points) {
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) t[std::size_t(i)] = t_max * double(i) / double(points - 1);
  t.front() = 0.0;
  t.back() = t_max;
  return t;
}

// Largest total decay rate: top eigenvalue of the rate operator. Sets the
// natural horizon ~5/rate for health probes.
double total_decay_scale(const CompiledModel& m) {
  Matrix k = build_rate_operator(m.spec.tensor, m.decomp, m.spec.tensor.zero_temperature());
  if (k.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  return es.eigenvalues().maxCoeff();
}

std::string join_path(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir + ": cannot create output directory (" + ec.message() + ")");
}

void write_state_csv(const std::string& path, const std::vector<double>& times,
                     const std::vector<Matrix>& states) {
  const int d = states.empty() ? 0 : int(states.front().rows());
  std::vector<std::string> header{"time"};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      header.push_back("re_rho_" + std::to_string(i) + "_" + std::to_string(j));
      header.push_back("im_rho_" + std::to_string(i) + "_" + std::to_string(j));
    }
  std::vector<std::vector<double>> rows;
  rows.reserve(times.size());
  for (std::size_t t = 0; t < times.size(); ++t) {
    std::vector<double> row{times[t]};
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        row.push_back(states[t](i, j).real());
        row.push_back(states[t](i, j).imag());
      }
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

void write_observables_csv(const std::string& path, const std::vector<double>& times,
                           const std::vector<Matrix>& states) {
  const int d = states.empty() ? 0 : int(states.front().rows());
  const int n_coh = std::min(d - 1, 5);  // adjacent coherences rho_{i,i+1}
  std::vector<std::string> header{"time"};
  for (int i = 0; i < d; ++i) header.push_back("pop_" + std::to_string(i));
  for (int i = 0; i < n_coh; ++i) {
    header.push_back("re_coh_" + std::to_string(i) + "_" + std::to_string(i + 1));
    header.push_back("im_coh_" + std::to_string(i) + "_" + std::to_string(i + 1));
  }
  const bool with_concurrence = (d == 4);
  if (with_concurrence) header.push_back("concurrence");

  std::vector<std::vector<double>> rows;
  rows.reserve(times.size());
  for (std::size_t t = 0; t < times.size(); ++t) {
    std::vector<double> row{times[t]};
    for (int i = 0; i < d; ++i) row.push_back(states[t](i, i).real());
    for (int i = 0; i < n_coh; ++i) {
      row.push_back(states[t](i, i + 1).real());
      row.push_back(states[t](i, i + 1).imag());
    }
    if (with_concurrence) {
      double c = std::numeric_limits<double>::quiet_NaN();
      try {
        c = concurrence(states[t]);
      } catch (const std::invalid_argument&) {
        // unhealthy state: leave the cell NaN rather than fake a value
      }
      row.push_back(c);
    }
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

void write_jumps_csv(const std::string& path, const std::vector<double>& times,
                     const std::vector<std::vector<double>>& dist) {
  const std::size_t k_count = dist.empty() ? 0 : dist.front().size();
  std::vector<std::string> header{"time"};
  for (std::size_t k = 0; k < k_count; ++k) header.push_back("P_" + std::to_string(k));
  std::vector<std::vector<double>> rows;
  rows.reserve(times.size());
  for (std::size_t t = 0; t < times.size(); ++t) {
    std::vector<double> row{times[t]};
    row.insert(row.end(), dist[t].begin(), dist[t].end());
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

// ---------------------------------------------------------------------------
// solver fronts

std::vector<Matrix> solve_sector(const CompiledModel& m, const std::vector<double>& times,
                                 SectorSolution* solution_out = nullptr) {
  SectorBlocks split = sector_split(m.spec.initial_state, m.spectrum);
  EffectiveGenerator gen = effective_generator(m.sector_h0(), m.spec.tensor, m.decomp);
  SectorSolution sol = cascade_solve(split, gen, m.spec.tensor, m.decomp, times);
  std::vector<Matrix> states;
  states.reserve(times.size());
  for (std::size_t t = 0; t < times.size(); ++t) states.push_back(sol.reassemble(t));
  if (solution_out) *solution_out = std::move(sol);
  return states;
}

Vector pure_initial_or_throw(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const int last = int(rho.rows()) - 1;
  if (es.eigenvalues()(last) < 1.0 - 1e-10)
    throw std::invalid_argument(
        "monte carlo unraveling needs a pure initial state (largest eigenvalue here: " +
        sci(es.eigenvalues()(last)) + ")");
  Vector psi = es.eigenvectors().col(last);
  int lead = 0;
  for (int i = 1; i < psi.size(); ++i)
    if (std::abs(psi(i)) > std::abs(psi(lead))) lead = i;
  if (std::abs(psi(lead)) > 0.0) psi *= std::conj(psi(lead)) / std::abs(psi(lead));
  psi.normalize();
  return psi;
}

struct McResult {
  std::vector<TrajectoryRecord> records;
  EnsembleEstimate estimate;
  int initial_sector = -1;
};

McResult solve_mc(const CompiledModel& m, const std::vector<double>& times,
                  const RunConfig& cfg) {
  Vector psi0 = pure_initial_or_throw(m.spec.initial_state);
  EffectiveGenerator gen = effective_generator(m.sector_h0(), m.spec.tensor, m.decomp);
  JumpChannelSet ch = diagonalize_channels(m.spec.tensor, m.decomp);
  McResult r;
  r.records = run_ensemble(psi0, gen, ch, times, cfg.seed, std::uint64_t(cfg.trajectories));
  r.estimate = ensemble_average(r.records, times);
  r.initial_sector = sector_split(m.spec.initial_state, m.spectrum).initial_sector;
  return r;
}

int health_gate(const std::vector<Matrix>& states, const std::string& label) {
  double worst_tr = 0.0, worst_h = 0.0, worst_eig = 0.0;
  for (const Matrix& s : states) {
    DensityReport rep = check_density(s);
    worst_tr = std::max(worst_tr, rep.trace_deviation);
    worst_h = std::max(worst_h, rep.hermiticity);
    worst_eig = std::min(worst_eig, rep.min_eigenvalue);
  }
  const bool ok = worst_tr <= 1e-8 && worst_h <= 1e-9 && worst_eig >= -1e-8;
  std::cout << (ok ? "[ok]   " : "[FAIL] ") << label << " state health: |tr-1| " << sci(worst_tr)
            << ", hermiticity " << sci(worst_h) << ", min eigenvalue " << sci(worst_eig) << "\n";
  return ok ? kExitOk : kExitValidation;
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_validate(const CompiledModel& m, const RunConfig& cfg) {
  bool all_ok = true;
  auto report = [&](bool ok, const std::string& text) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << text << "\n";
    all_ok = all_ok && ok;
  };

  const AlgebraReport alg = verify_algebra(m.decomp);
  report(alg.worst() <= 1e-10,
         "eigenoperator algebra: worst identity defect " + sci(alg.worst()));

  const TensorHealth th = check_spectral_tensor(m.spec.tensor);
  report(th.gamma_hermiticity <= 1e-10 && th.lamb_hermiticity <= 1e-10,
         "spectral blocks Hermitian: gamma defect " + sci(th.gamma_hermiticity) + ", S defect " +
             sci(th.lamb_hermiticity));
  report(th.min_gamma_eigenvalue >= -1e-10,
         "rate matrices positive semidefinite: min eigenvalue " + sci(th.min_gamma_eigenvalue));
  if (m.spec.tensor.zero_temperature()) {
    report(th.negative_frequency_gamma == 0.0,
           "zero-temperature rule: dissipative weight at omega < 0 is " +
               sci(th.negative_frequency_gamma));
  } else {
    std::cout << "[info] detailed balance violation at beta=" << sci(m.spec.tensor.beta) << ": "
              << sci(check_detailed_balance(m.spec.tensor, m.spec.tensor.beta)) << "\n";
  }

  {
    Vector vid = vec(identity(m.spec.dim()));
    const double worst = Vector(m.liouvillian.total.adjoint() * vid).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, max_abs(m.liouvillian.total));
    report(worst <= 1e-10 * scale,
           "trace preservation: max |tr L(.)| coefficient " + sci(worst));
  }

  if (m.spec.tensor.zero_temperature()) {
    const double off = max_forbidden_block_magnitude(m.liouvillian, m.decomp);
    report(off <= 1e-13,
           "energy-pair block triangularity: worst forbidden block " + sci(off));
  }

  {
    const double gmax = total_decay_scale(m);
    double horizon = cfg.t_max;
    if (gmax > 0.0) horizon = std::min(horizon, 5.0 / gmax);
    EvolutionResult r = propagate_expm(m.liouvillian, m.spec.initial_state,
                                       time_grid(horizon, 11));
    for (const std::string& n : r.notes) std::cout << "[info] " << n << "\n";
    report(r.worst_trace_deviation() <= 1e-8 && r.worst_hermiticity() <= 1e-9 &&
               r.worst_min_eigenvalue() >= -1e-8,
           "propagated state health to t=" + sci(horizon) + ": |tr-1| " +
               sci(r.worst_trace_deviation()) + ", hermiticity " + sci(r.worst_hermiticity()) +
               ", min eigenvalue " + sci(r.worst_min_eigenvalue()));
  }

  for (const std::string& n : m.liouvillian.notes) std::cout << "[info] " << n << "\n";

  std::cout << (all_ok ? "validate: all checks passed\n" : "validate: FAILED\n");
  return all_ok ? kExitOk : kExitValidation;
}

int cmd_simulate(const CompiledModel& m, const RunConfig& cfg) {
  const std::vector<double> times = time_grid(cfg.t_max, cfg.points);
  std::vector<Matrix> states;
  std::string used;
  if (cfg.solver == "oracle" || cfg.solver == "all") {
    EvolutionResult r = propagate_expm(m.liouvillian, m.spec.initial_state, times);
    for (const std::string& n : r.notes) std::cout << "[info] " << n << "\n";
    states = std::move(r.states);
    used = "oracle";
  } else if (cfg.solver == "nud") {
    states = solve_sector(m, times);
    used = "nud";
  } else if (cfg.solver == "mc") {
    McResult r = solve_mc(m, times, cfg);
    states = std::move(r.estimate.mean);
    used = "mc";
  } else {
    std::cerr << "error: unknown solver `" << cfg.solver
              << "` (expected oracle, nud, mc, or all)\n";
    return kExitValidation;
  }
  ensure_out_dir(cfg.out_dir);
  write_state_csv(join_path(cfg.out_dir, "state.csv"), times, states);
  write_observables_csv(join_path(cfg.out_dir, "observables.csv"), times, states);
  std::cout << "simulate[" << used << "]: wrote state.csv and observables.csv ("
            << times.size() << " rows)\n";
  return health_gate(states, used);
}

int cmd_compare(const CompiledModel& m, const RunConfig& cfg) {
  const std::vector<double> times = time_grid(cfg.t_max, cfg.points);
  EvolutionResult oracle = propagate_expm(m.liouvillian, m.spec.initial_state, times);
  for (const std::string& n : oracle.notes) std::cout << "[info] " << n << "\n";
  const std::vector<Matrix> nud = solve_sector(m, times);

  std::optional<McResult> mc;
  if (cfg.solver == "mc" || cfg.solver == "all") {
    try {
      mc = solve_mc(m, times, cfg);
    } catch (const std::invalid_argument& e) {
      std::cout << "[info] monte carlo skipped: " << e.what() << "\n";
    }
  }

  std::vector<std::string> header{"time", "nud_vs_oracle"};
  if (mc) {
    header.push_back("mc_vs_oracle");
    header.push_back("mc_sigma");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(times.size());
  double worst_nud = 0.0, worst_nud_t = 0.0;
  double worst_mc = 0.0, worst_mc_t = 0.0;
  double worst_mc_excess = 0.0, worst_mc_excess_t = 0.0;
  for (std::size_t t = 0; t < times.size(); ++t) {
    const double dn = max_abs(nud[t] - oracle.states[t]);
    if (dn > worst_nud) {
      worst_nud = dn;
      worst_nud_t = times[t];
    }
    std::vector<double> row{times[t], dn};
    if (mc) {
      const double dm = max_abs(mc->estimate.mean[t] - oracle.states[t]);
      const double sigma = mc->estimate.std_error[t].size() > 0
                               ? mc->estimate.std_error[t].maxCoeff()
                               : 0.0;
      const double allowance = std::max(3.0 * sigma, 0.01);
      if (dm > worst_mc) {
        worst_mc = dm;
        worst_mc_t = times[t];
      }
      if (dm - allowance > worst_mc_excess) {
        worst_mc_excess = dm - allowance;
        worst_mc_excess_t = times[t];
      }
      row.push_back(dm);
      row.push_back(sigma);
    }
    rows.push_back(std::move(row));
  }

  ensure_out_dir(cfg.out_dir);
  write_csv(join_path(cfg.out_dir, "compare.csv"), header, rows);
  std::cout << "compare: worst sector-vs-oracle distance " << sci(worst_nud) << " at t="
            << sci(worst_nud_t) << " (tolerance " << sci(cfg.tol) << ")\n";
  if (mc)
    std::cout << "compare: monte carlo (" << cfg.trajectories
              << " trajectories) worst distance " << sci(worst_mc) << " at t=" << sci(worst_mc_t)
              << "\n";

  int code = kExitOk;
  if (worst_nud > cfg.tol) {
    std::cerr << "error: sector solution disagrees with the oracle: " << sci(worst_nud) << " > "
              << sci(cfg.tol) << " at t=" << sci(worst_nud_t) << "\n";
    code = kExitDisagreement;
  }
  if (mc && worst_mc_excess > 0.0) {
    std::cerr << "error: monte carlo average beyond max(3 sigma, 0.01) of the oracle at t="
              << sci(worst_mc_excess_t) << " (excess " << sci(worst_mc_excess) << ")\n";
    code = kExitDisagreement;
  }
  return code;
}

int cmd_traj(const CompiledModel& m, const RunConfig& cfg) {
  const std::vector<double> times = time_grid(cfg.t_max, cfg.points);
  McResult r = solve_mc(m, times, cfg);
  int k_max = r.initial_sector;
  if (k_max < 0)
    for (const TrajectoryRecord& rec : r.records)
      k_max = std::max(k_max, int(rec.events.size()));
  k_max = std::max(k_max, 0);
  const auto counts = empirical_jump_counts(r.records, times, k_max);

  ensure_out_dir(cfg.out_dir);
  write_state_csv(join_path(cfg.out_dir, "state.csv"), times, r.estimate.mean);
  write_observables_csv(join_path(cfg.out_dir, "observables.csv"), times, r.estimate.mean);
  write_jumps_csv(join_path(cfg.out_dir, "jumps.csv"), times, counts);

  long total_jumps = 0;
  for (const TrajectoryRecord& rec : r.records) total_jumps += long(rec.events.size());
  std::cout << "traj: " << cfg.trajectories << " trajectories (seed " << cfg.seed
            << "), mean jump count " << sci(double(total_jumps) / double(cfg.trajectories))
            << "; wrote state.csv, observables.csv, jumps.csv\n";
  return health_gate(r.estimate.mean, "mc");
}

int cmd_photocount(const CompiledModel& m, const RunConfig& cfg) {
  const std::vector<double> times = time_grid(cfg.t_max, cfg.points);
  SectorSolution sol;
  solve_sector(m, times, &sol);
  const auto dist = jump_count_distribution(sol);
  ensure_out_dir(cfg.out_dir);
  write_jumps_csv(join_path(cfg.out_dir, "jumps.csv"), times, dist);
  std::cout << "photocount: wrote jumps.csv with columns P_0..P_"
            << (dist.empty() ? 0 : dist.front().size() - 1) << "; final distribution:";
  if (!dist.empty())
    for (double p : dist.back()) std::cout << " " << sci(p);
  std::cout << "\n";
  return kExitOk;
}

int cmd_dfs(const CompiledModel& m, const RunConfig&) {
  const std::vector<Vector> basis = dfs_basis(m.decomp, m.spec.tensor, m.sector_h0());
  std::cout << "decoherence-free subspace dimension: " << basis.size() << "\n";
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double energy = (basis[k].adjoint() * m.sector_h0() * basis[k])(0).real();
    std::cout << "  state " << k << " (energy " << sci(energy) << "):";
    for (int i = 0; i < basis[k].size(); ++i) {
      const Complex amp = basis[k](i);
      if (std::abs(amp) < 1e-12) continue;
      std::cout << " [" << i << "] " << sci(amp.real());
      if (std::abs(amp.imag()) >= 1e-12) std::cout << (amp.imag() < 0 ? "-" : "+") << sci(std::abs(amp.imag())) << "i";
    }
    std::cout << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(const RunConfig& cfg) {
  try {
    if (!(cfg.t_max > 0.0)) {
      std::cerr << "error: --t-max must be positive\n";
      return kExitValidation;
    }
    if (cfg.points < 2) {
      std::cerr << "error: --points must be at least 2\n";
      return kExitValidation;
    }
    if (cfg.trajectories < 1) {
      std::cerr << "error: --trajectories must be at least 1\n";
      return kExitValidation;
    }
    if (cfg.model_path.empty()) {
      std::cerr << "error: --model is required\n";
      return kExitValidation;
    }

    const ModelSpec spec = load_model(cfg.model_path);
    const CompiledModel model = compile_model(spec, cfg.drop_lamb_shift);
    std::cout << "model `" << spec.name << "`: dimension " << spec.dim() << ", "
              << spec.couplings.size() << " coupling channel(s), "
              << model.decomp.frequency_count() << " transition frequencies"
              << (cfg.drop_lamb_shift ? ", shift dropped from the sector drift" : "") << "\n";

    if (cfg.command == "validate") return cmd_validate(model, cfg);
    if (cfg.command == "simulate") return cmd_simulate(model, cfg);
    if (cfg.command == "compare") return cmd_compare(model, cfg);
    if (cfg.command == "traj") return cmd_traj(model, cfg);
    if (cfg.command == "photocount") return cmd_photocount(model, cfg);
    if (cfg.command == "dfs") return cmd_dfs(model, cfg);
    std::cerr << "error: unknown command `" << cfg.command << "`\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ModelParseError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const StepUnderflow& e) {
    std::cerr << "error: integration stalled at t=" << sci(e.last_good_time) << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace oqsim
