#include "hypertopic/solver.hpp"

#include "hypertopic/error.hpp"
#include "hypertopic/projections.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace hypertopic {

namespace {

struct StepScales {
  double w = 1.0;
  double p = 1.0;
  double a = 1.0;
};

std::vector<StepScales> step_scales(const ModelParams& params, StepMode mode) {
  std::vector<StepScales> out(params.slices.size());
  if (mode == StepMode::Fixed) return out;
  for (std::size_t t = 0; t < params.slices.size(); ++t) {
    const BlockWeights kappa = operator_norm_weights(params.slices[t]);
    out[t] = {1.0 / std::max(kappa.w, 1e-12), 1.0 / std::max(kappa.p, 1e-12),
              1.0 / std::max(kappa.a, 1e-12)};
  }
  return out;
}

ModelParams projected_step(const ModelParams& params, const GradientBlocks& grads, double eta0,
                           const std::vector<StepScales>& scales) {
  const auto& b = params.bounds;
  const double p = static_cast<double>(params.vocab_size());
  ModelParams next{{}, b, params.K};
  next.slices.reserve(params.slices.size());
  for (std::size_t t = 0; t < params.slices.size(); ++t) {
    const auto& cur = params.slices[t];
    const auto& g = grads.slices[t];
    TimeSliceParams sp;
    sp.W = project_rows_simplex(cur.W - eta0 * scales[t].w * g.grad_W);
    sp.P = project_box(cur.P - eta0 * scales[t].p * g.grad_P, b.lp, b.up);
    sp.A = project_columns_capped(cur.A - eta0 * scales[t].a * g.grad_A, b.la, b.ua, p);
    next.slices.push_back(std::move(sp));
  }
  return next;
}

}  // namespace

void SolverConfig::validate() const {
  if (K < 1) throw Error(ErrorKind::ConfigInvalid, "K must be >= 1");
  if (!(tau_p >= 0.0) || !(tau_a >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "penalties must be >= 0");
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw Error(ErrorKind::ConfigInvalid, "eta0 must be > 0");
  if (max_iters < 1) throw Error(ErrorKind::ConfigInvalid, "max_iters must be >= 1");
  if (tolerance && !(*tolerance > 0.0)) throw Error(ErrorKind::ConfigInvalid, "tolerance must be > 0");
  if (max_halvings < 0 || kappa_refresh < 1 || threads < 1)
    throw Error(ErrorKind::ConfigInvalid, "max_halvings >= 0, kappa_refresh >= 1, threads >= 1");
  bounds.validate();
}

double SolverConfig::penalty_scale(const Corpus& corpus) const {
  if (!scale_penalty) return 1.0;
  return static_cast<double>(corpus.num_documents()) /
         (static_cast<double>(corpus.num_slices()) * static_cast<double>(corpus.vocab_size()));
}

double SolverConfig::resolved_tolerance(const Corpus& corpus) const {
  if (tolerance) return *tolerance;
  Index max_n = 0;
  for (auto n : corpus.slice_sizes()) max_n = std::max(max_n, n);
  return 1e-6 * std::sqrt(static_cast<double>(max_n) * static_cast<double>(corpus.vocab_size()));
}

FitResult fit(const Corpus& corpus, const SolverConfig& config, const ModelParams* initial,
              const IterationObserver& observer) {
  config.validate();
  using Clock = std::chrono::steady_clock;

  ModelParams params;
  switch (config.init_mode) {
    case InitMode::Spectral: params = init_spectral(corpus, config.K, config.bounds, config.seed); break;
    case InitMode::Random: params = init_random(corpus, config.K, config.bounds, config.seed); break;
    case InitMode::Provided:
      if (!initial) throw Error(ErrorKind::ConfigInvalid, "provided init requires initial parameters");
      params = *initial;
      break;
  }
  if (params.K != config.K) throw Error(ErrorKind::ConfigInvalid, "initial parameters have a different K");
  params.validate_against(corpus);

  const double scale = config.penalty_scale(corpus);
  const double tau_p = config.tau_p * scale;
  const double tau_a = config.tau_a * scale;
  const double tol = config.resolved_tolerance(corpus);

  params = params.permuted(align_sequential(params, tau_p, tau_a).perms);
  const auto ident = identity_perms(params);

  FitResult result;
  GradientOptions gopts{config.penalty_gradient, false, config.threads};
  GradientBlocks grads;
  double f_cur = evaluate_with_gradients(params, corpus, ident, tau_p, tau_a, grads, gopts).total;
  result.trace.initial_objective = f_cur;

  double eta0 = config.eta0;
  std::vector<StepScales> scales;

  for (int iter = 0; iter < config.max_iters; ++iter) {
    const auto started = Clock::now();
    if (iter % config.kappa_refresh == 0) scales = step_scales(params, config.step_mode);

    ModelParams candidate;
    AlignmentResult realign;
    GradientBlocks next_grads;
    double f_new = 0.0;
    int halvings = 0;
    for (;;) {
      candidate = projected_step(params, grads, eta0, scales);
      realign = align_sequential(candidate, tau_p, tau_a);
      candidate = candidate.permuted(realign.perms);
      f_new = evaluate_with_gradients(candidate, corpus, ident, tau_p, tau_a, next_grads, gopts).total;
      const bool decreased = f_new <= f_cur + 1e-12 * std::abs(f_cur);
      if (!config.backtracking || decreased || halvings >= config.max_halvings) break;
      eta0 *= 0.5;
      ++halvings;
    }

    IterationRecord rec;
    rec.iter = iter;
    rec.objective = f_new;
    rec.eta = eta0;
    rec.halvings = halvings;
    for (Index t = 0; t < params.num_slices(); ++t) {
      rec.step_norm_W = std::max(rec.step_norm_W, (candidate.slices[t].W - params.slices[t].W).norm());
      rec.step_norm_P = std::max(rec.step_norm_P, (candidate.slices[t].P - params.slices[t].P).norm());
      rec.step_norm_A = std::max(rec.step_norm_A, (candidate.slices[t].A - params.slices[t].A).norm());
    }
    rec.delta = std::max({rec.step_norm_W, rec.step_norm_P, rec.step_norm_A});
    rec.perms = std::move(realign.perms);

    params = std::move(candidate);
    grads = std::move(next_grads);
    f_cur = f_new;
    if (config.check_feasibility) params.validate();
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
    if (observer) observer(rec, params);
    const bool done = rec.delta < tol;
    result.trace.iterations.push_back(std::move(rec));
    if (done) {
      result.trace.status = SolverStatus::Converged;
      break;
    }
  }
  result.params = std::move(params);
  return result;
}

ErrorReport error_metric(const ModelParams& est, const ModelParams& truth) {
  OracleAlignment oa = oracle_align(est, truth, operator_norm_weights(truth));
  return {oa.error, std::move(oa.per_slice), std::move(oa.alignment.perms)};
}

}  // namespace hypertopic
