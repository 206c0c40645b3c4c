// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).

#include "milac/sim/verify.hpp"

#include <cmath>
#include <cstdio>

#include "milac/sim/sweeps.hpp"

namespace milac::sim {

FaultInjection parse_fault(const std::string& text) {
  if (text == "none") return FaultInjection::none;
  if (text == "admittance") return FaultInjection::admittance;
  if (text == "kkt") return FaultInjection::kkt;
  throw ConfigError("fault", "expected none, admittance or kkt, got '" + text +
                                 "'");
}

namespace {

constexpr std::uint64_t kVerifySeed = 0x76657269667921ull;

// Uniformly random complex matrix with entries in the disc of radius `scale`.
ComplexMatrixXd random_complex(Rng<double>& rng, Index rows, Index cols,
                               double scale) {
  ComplexMatrixXd m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r)
      m(r, c) = scale * Complex<double>(2 * rng.uniform() - 1,
                                        2 * rng.uniform() - 1);
  return m;
}

struct Checker {
  VerifyReport report;

  void bound(const std::string& name, double observed, double limit,
             std::string note = {}) {
    report.checks.push_back(
        {name, observed <= limit, observed, limit, std::move(note)});
  }
  void require(const std::string& name, bool pass, double observed,
               double limit, std::string note = {}) {
    report.checks.push_back({name, pass, observed, limit, std::move(note)});
  }
};

void check_correlation(Checker& chk) {
  const auto id4 = exponential_correlation<double>(4, 0.0);
  double dev = (id4 - ComplexMatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff();
  const auto r2 = exponential_correlation<double>(2, 0.8);
  ComplexMatrixXd expect2(2, 2);
  expect2 << 1.0, 0.8, 0.8, 1.0;
  dev = std::max(dev, (r2 - expect2).cwiseAbs().maxCoeff());
  const auto r3 = exponential_correlation<double>(3, 0.5);
  ComplexMatrixXd expect3(3, 3);
  expect3 << 1.0, 0.5, 0.25, 0.5, 1.0, 0.5, 0.25, 0.5, 1.0;
  dev = std::max(dev, (r3 - expect3).cwiseAbs().maxCoeff());
  chk.bound("correlation-examples", dev, 0.0);
}

void check_eigendecomposition(Checker& chk) {
  const auto r = exponential_correlation<double>(16, 0.8);
  const auto sys = eigendecompose_correlation(r);
  const ComplexMatrixXd recon =
      sys.vectors *
      sys.values.cast<Complex<double>>().asDiagonal() * sys.vectors.adjoint();
  const double recon_dev = (recon - r).cwiseAbs().maxCoeff();
  const double unitary_dev =
      (sys.vectors.adjoint() * sys.vectors - ComplexMatrixXd::Identity(16, 16))
          .cwiseAbs()
          .maxCoeff();
  chk.bound("eigendecomposition-reconstruction", recon_dev, 1e-10);
  chk.bound("eigenvector-unitarity", unitary_dev, 1e-10);
}

void check_kronecker_ordering(Checker& chk) {
  const SystemConfigd cfg(4, 3, 1, 1.0, 1.0);
  const auto model = build_channel_model(cfg, 0.6, 0.3);
  double dev = 0.0;
  for (Index k = 0; k < model.r_v.size(); ++k) {
    const Index t = k / cfg.n_rx;
    const Index j = k % cfg.n_rx;
    dev = std::max(dev, std::abs(model.r_v[k] - model.lambda_tx[t] *
                                                    model.lambda_rx[j]));
  }
  const double sum_dev =
      std::abs(model.r_v.sum() - static_cast<double>(cfg.n_tx * cfg.n_rx));
  chk.bound("virtual-correlation-kronecker", dev, 1e-12);
  chk.bound("virtual-correlation-trace", sum_dev, 1e-9);
}

void check_admittance(Checker& chk, FaultInjection fault) {
  Rng<double> rng(derive_seed(kVerifySeed, 4));
  const double y0 = 1.0 / 50.0;
  double max_dev = 0.0;
  for (int it = 0; it < 200; ++it) {
    const Index n_tx = 1 + static_cast<Index>(rng.uniform() * 16);
    const Index l_tx = 1 + static_cast<Index>(rng.uniform() * n_tx);
    const SystemConfigd cfg(n_tx, 4, std::min(l_tx, n_tx), 1.0, 1.0);
    const ComplexMatrixXd f =
        random_complex(rng, cfg.n_tx, cfg.l_tx, 1.0 + 999.0 * rng.uniform());
    MilacNetwork<double> net = admittance_for_precoder(f, y0);
    if (fault == FaultInjection::admittance)
      net.admittance(net.ports_first, 0) += 1e-3;
    const LinearMap<double> back = precoder_from_admittance(net, cfg);
    max_dev = std::max(max_dev, (back.matrix - f).cwiseAbs().maxCoeff());

    const ComplexMatrixXd g = random_complex(rng, cfg.l_rx, cfg.n_rx, 1.0);
    const MilacNetwork<double> net_g = admittance_for_combiner(g, y0);
    const LinearMap<double> back_g = combiner_from_admittance(net_g, cfg);
    max_dev = std::max(max_dev, (back_g.matrix - g).cwiseAbs().maxCoeff());
  }
  chk.bound("admittance-round-trip", max_dev, 1e-10);

  // Block identity for Q = [[I,0],[F,I]]: Q^-1 = 2I - Q, and the synthesized
  // admittance satisfies Y/Y0 = I - Q.
  const SystemConfigd cfg(8, 8, 2, 1.0, 1.0);
  const ComplexMatrixXd f = random_complex(rng, 8, 2, 1000.0);
  const Index dim = 10;
  ComplexMatrixXd q = ComplexMatrixXd::Identity(dim, dim);
  q.bottomLeftCorner(8, 2) = f;
  const ComplexMatrixXd two_i_minus_q =
      2.0 * ComplexMatrixXd::Identity(dim, dim) - q;
  const double inv_dev =
      (q * two_i_minus_q - ComplexMatrixXd::Identity(dim, dim))
          .cwiseAbs()
          .maxCoeff();
  const MilacNetwork<double> net = admittance_for_precoder(f, y0);
  const double block_dev =
      (net.admittance / y0 - (ComplexMatrixXd::Identity(dim, dim) - q))
          .cwiseAbs()
          .maxCoeff();
  chk.bound("block-inversion-identity", std::max(inv_dev, block_dev), 1e-12);
}

void check_ls(Checker& chk, const ExperimentConfig& config) {
  const SystemConfigd cfg(8, 8, 1, config.p_tx, 1.0);
  const auto model = build_channel_model(cfg, config.eps_tx, config.eps_rx);
  const auto schedule = design_ls_training(cfg);
  const ComplexMatrixXd x_id = schedule.training_matrix();
  const ComplexMatrixXd x_dft = dft_training_matrix(cfg);
  const ComplexMatrixXd target =
      (cfg.p_tx / static_cast<double>(cfg.n_tx)) *
      ComplexMatrixXd::Identity(cfg.n_tx, cfg.n_tx);
  const double opt_dev =
      std::max((x_id * x_id.adjoint() - target).cwiseAbs().maxCoeff(),
               (x_dft * x_dft.adjoint() - target).cwiseAbs().maxCoeff());
  chk.bound("ls-training-optimality", opt_dev, 1e-10);

  Rng<double> rng(derive_seed(kVerifySeed, 8));
  double path_dev = 0.0;
  for (int it = 0; it < 50; ++it) {
    const auto chan = sample_channel(model, derive_seed(kVerifySeed, 100 + it));
    const ComplexMatrixXd noise =
        rng.complex_gaussian_matrix(cfg.n_rx, cfg.tau, cfg.noise_power);
    const ComplexMatrixXd analog = run_milac_ls(chan, schedule, noise);
    const ComplexMatrixXd y = chan.h * x_id + noise;
    const ComplexMatrixXd digital = digital_ls_baseline(y, x_id);
    path_dev = std::max(path_dev, (analog - digital).cwiseAbs().maxCoeff());
  }
  chk.bound("ls-pathwise-equivalence", path_dev, 1e-12);

  // Closed form: mean NMSE = n_tx / SNR, independent of the correlation.
  const Index trials = std::min<Index>(config.trials, 20000);
  double worst_rel = 0.0;
  for (double snr_db : {0.0, 10.0}) {
    const double sigma2 = cfg.p_tx / std::pow(10.0, snr_db / 10.0);
    NmseAccumulator<double> acc;
    for (Index i = 0; i < trials; ++i) {
      const auto chan = sample_channel(model, channel_seed(kVerifySeed, i));
      Rng<double> noise_rng(noise_seed(kVerifySeed, i));
      const ComplexMatrixXd noise =
          std::sqrt(sigma2) *
          noise_rng.complex_gaussian_matrix(cfg.n_rx, cfg.tau, 1.0);
      acc.add(chan.h, run_milac_ls(chan, schedule, noise));
    }
    const double expected = static_cast<double>(cfg.n_tx) * sigma2 / cfg.p_tx;
    worst_rel = std::max(worst_rel,
                         std::abs(acc.value() - expected) / expected);
  }
  chk.bound("ls-closed-form-nmse", worst_rel, 0.03,
            std::to_string(trials) + " trials");
}

void check_power_allocation(Checker& chk, FaultInjection fault) {
  Rng<double> rng(derive_seed(kVerifySeed, 16));
  double worst_stat = 0.0, worst_comp = 0.0, worst_budget = 0.0;
  bool all_pass = true;
  for (int it = 0; it < 10; ++it) {
    const Index tau = 1 + static_cast<Index>(rng.uniform() * 8);
    const Index n_rx = 1 + static_cast<Index>(rng.uniform() * 8);
    RealVectorXd r_v(tau * n_rx);
    for (Index k = 0; k < r_v.size(); ++k)
      r_v[k] = std::exp(2.0 * (2.0 * rng.uniform() - 1.0));
    const double snr_db = -10.0 + 40.0 * rng.uniform();
    const double sigma2 = std::pow(10.0, -snr_db / 10.0);
    auto alloc = allocate_training_power(r_v, sigma2, 1.0, tau, n_rx);
    if (fault == FaultInjection::kkt) alloc.multiplier *= 1.001;
    const auto kkt = verify_kkt(alloc, r_v, sigma2, 1.0, n_rx);
    worst_stat = std::max(worst_stat, kkt.max_stationarity_residual);
    worst_comp = std::max(worst_comp, kkt.max_complementarity_excess);
    worst_budget = std::max(worst_budget, kkt.budget_excess);
    all_pass = all_pass && kkt.pass;
  }
  chk.require("power-allocation-kkt", all_pass,
              std::max({worst_stat, worst_comp}), 1e-6,
              "stationarity/complementarity residual");

  // Flat statistics reduce to the uniform split.
  const RealVectorXd flat = RealVectorXd::Ones(4 * 4);
  const auto alloc = allocate_training_power(flat, 0.5, 1.0, 4, 4);
  const double uniform_dev =
      (alloc.p.array() - 0.25).abs().maxCoeff();
  chk.bound("power-allocation-uniform-at-eps0", uniform_dev, 1e-9);
}

void check_mmse(Checker& chk, const ExperimentConfig& config) {
  const double sigma2 = 0.1;
  const SystemConfigd cfg(8, 8, 1, config.p_tx, sigma2);
  const auto model = build_channel_model(cfg, config.eps_tx, config.eps_rx);
  const auto alloc = allocate_training_power(model.r_v, sigma2, cfg.p_tx,
                                             cfg.tau, cfg.n_rx);
  const auto schedule = design_mmse_training(model, alloc, cfg);
  const ComplexMatrixXd x = schedule.training_matrix();

  Rng<double> rng(derive_seed(kVerifySeed, 32));
  double path_dev = 0.0, unitary_dev = 0.0;
  for (int it = 0; it < 50; ++it) {
    const auto chan = sample_channel(model, derive_seed(kVerifySeed, 500 + it));
    const ComplexMatrixXd noise =
        std::sqrt(sigma2) * rng.complex_gaussian_matrix(cfg.n_rx, cfg.tau, 1.0);
    const auto est = run_milac_mmse(chan, model, schedule, noise);
    const ComplexMatrixXd y = chan.h * x + noise;
    const ComplexMatrixXd digital = digital_mmse_baseline(y, model, alloc, cfg);
    path_dev = std::max(path_dev, (est.h_v - digital).cwiseAbs().maxCoeff());
    unitary_dev = std::max(
        unitary_dev, std::abs((chan.h - est.h).norm() - (chan.h_v - est.h_v).norm()));
  }
  chk.bound("mmse-pathwise-equivalence", path_dev, 1e-12);
  chk.bound("nmse-unitary-invariance", unitary_dev, 1e-10);

  const double objective_dev =
      std::abs(alloc.objective - theoretical_mmse(model.r_v, alloc, sigma2));
  PowerAllocation<double> uniform;
  uniform.p = RealVectorXd::Constant(cfg.tau, cfg.p_tx /
                                                  static_cast<double>(cfg.tau));
  const double uniform_gap =
      alloc.objective - theoretical_mmse(model.r_v, uniform, sigma2);
  chk.bound("mmse-objective-consistency", objective_dev, 1e-12);
  chk.bound("mmse-optimal-vs-uniform", uniform_gap, 1e-9);
}

void check_papr(Checker& chk, const ExperimentConfig& config) {
  const SystemConfigd cfg(16, 16, 2, config.p_tx, config.p_tx);  // SNR 0 dB
  const auto ls = design_ls_training(cfg);
  const auto source_papr = papr_report(ls.source_matrix(), "milac");
  chk.require("papr-milac-source", source_papr.max() == 1.0,
              source_papr.max(), 1.0, "exact unit PAPR");
  const auto dft_papr = papr_report(dft_training_matrix(cfg), "digital-ls");
  chk.bound("papr-dft-rows", std::abs(dft_papr.max() - 1.0), 1e-12);

  const auto model = build_channel_model(cfg, 0.8, 0.8);
  const auto alloc = allocate_training_power(model.r_v, cfg.noise_power,
                                             cfg.p_tx, cfg.tau, cfg.n_rx);
  const auto schedule = design_mmse_training(model, alloc, cfg);
  const auto mmse_papr = papr_report(schedule.training_matrix(), "digital-mmse");
  chk.require("papr-digital-mmse-above-one", mmse_papr.max() > 1.0,
              mmse_papr.max(), 1.0, "strict inequality expected");
}

void check_op_audit(Checker& chk, const ExperimentConfig& config) {
  const double sigma2 = 0.1;
  const SystemConfigd cfg(8, 8, 1, config.p_tx, sigma2);
  const auto model = build_channel_model(cfg, config.eps_tx, config.eps_rx);
  const auto chan = sample_channel(model, derive_seed(kVerifySeed, 64));
  Rng<double> rng(derive_seed(kVerifySeed, 65));
  const ComplexMatrixXd noise =
      std::sqrt(sigma2) * rng.complex_gaussian_matrix(cfg.n_rx, cfg.tau, 1.0);

  OpCounter milac_counter;
  const auto ls_schedule = design_ls_training(cfg);
  (void)run_milac_ls(chan, ls_schedule, noise, &milac_counter);
  const auto alloc = allocate_training_power(model.r_v, sigma2, cfg.p_tx,
                                             cfg.tau, cfg.n_rx);
  const auto mmse_schedule = design_mmse_training(model, alloc, cfg,
                                                  &milac_counter);
  (void)run_milac_mmse(chan, model, mmse_schedule, noise, &milac_counter);
  chk.require("op-audit-milac-online-zero",
              milac_counter.online.total_events() == 0 &&
                  milac_counter.online.convention == 0,
              static_cast<double>(milac_counter.online.convention), 0.0,
              "offline ops recorded separately: " +
                  std::to_string(milac_counter.offline.convention));

  OpCounter digital_counter;
  const ComplexMatrixXd x_dft = dft_training_matrix(cfg);
  const ComplexMatrixXd y = chan.h * x_dft + noise;
  (void)digital_ls_baseline(y, x_dft, &digital_counter);
  const auto ls_expected = complexity_report(cfg, Scheme::digital_ls);
  OpCounter mmse_counter;
  const ComplexMatrixXd y_m = chan.h * mmse_schedule.training_matrix() + noise;
  (void)digital_mmse_baseline(y_m, model, alloc, cfg, &mmse_counter);
  const auto mmse_expected = complexity_report(cfg, Scheme::digital_mmse);
  chk.require("op-audit-digital-formulas",
              digital_counter.online.convention == ls_expected &&
                  mmse_counter.online.convention == mmse_expected,
              static_cast<double>(digital_counter.online.convention),
              static_cast<double>(ls_expected),
              "instrumented online counts match the closed forms");
}

}  // namespace

VerifyReport run_verify(const ExperimentConfig& config, FaultInjection fault) {
  config.validate();
  Checker chk;
  check_correlation(chk);
  check_eigendecomposition(chk);
  check_kronecker_ordering(chk);
  check_admittance(chk, fault);
  check_ls(chk, config);
  check_power_allocation(chk, fault);
  check_mmse(chk, config);
  check_papr(chk, config);
  check_op_audit(chk, config);
  return chk.report;
}

void print_verify_report(const VerifyReport& report, std::ostream& out) {
  for (const auto& c : report.checks) {
    char line[256];
    std::snprintf(line, sizeof(line), "[%s] %-36s observed %.3e  limit %.3e%s%s",
                  c.pass ? " OK " : "FAIL", c.name.c_str(), c.observed,
                  c.limit, c.note.empty() ? "" : "  -- ", c.note.c_str());
    out << line << "\n";
  }
  out << (report.all_pass() ? "verify: all checks passed\n"
                            : "verify: FAILURES detected\n");
}

}  // namespace milac::sim
