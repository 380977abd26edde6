#include "cfcal/calib.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "cfcal/error.hpp"
#include "cfcal/rng.hpp"

namespace cfcal::calib {

Gof gof(std::span<const double> sim, std::span<const double> obs) {
  if (sim.size() != obs.size()) {
    fail(ErrorKind::Domain, "gof: length mismatch " + std::to_string(sim.size()) + " vs " +
                                std::to_string(obs.size()));
  }
  if (obs.empty()) fail(ErrorKind::InsufficientData, "gof: empty series");
  const double n = static_cast<double>(obs.size());
  double abs_sum = 0.0, sq_sum = 0.0, obs_sq = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double d = sim[i] - obs[i];
    abs_sum += std::abs(d);
    sq_sum += d * d;
    obs_sq += obs[i] * obs[i];
  }
  if (obs_sq == 0.0) fail(ErrorKind::UndefinedStatistic, "gof: NRMSE undefined for all-zero observations");
  Gof g;
  g.mae = abs_sum / n;
  g.rmse = std::sqrt(sq_sum / n);
  g.nrmse = g.rmse / std::sqrt(obs_sq / n);
  return g;
}

GofReport gof_report(const std::vector<sim::SimResult>& sims,
                     const std::vector<cleaning::FollowingSegment>& segments) {
  if (sims.size() != segments.size()) fail(ErrorKind::Domain, "gof_report: result/segment count mismatch");
  std::vector<double> sim_s, obs_s, sim_v, obs_v;
  for (std::size_t k = 0; k < sims.size(); ++k) {
    sim_s.insert(sim_s.end(), sims[k].spacing.begin(), sims[k].spacing.end());
    obs_s.insert(obs_s.end(), segments[k].spacing.begin(), segments[k].spacing.end());
    sim_v.insert(sim_v.end(), sims[k].follower_speed.begin(), sims[k].follower_speed.end());
    obs_v.insert(obs_v.end(), segments[k].follower.speed.begin(), segments[k].follower.speed.end());
  }
  const auto s = gof(sim_s, obs_s);
  const auto v = gof(sim_v, obs_v);
  return {s.nrmse, s.mae, s.rmse, v.nrmse, v.mae, v.rmse};
}

std::string_view mutation_operator_name(MutationOperator m) {
  return m == MutationOperator::UniformReset ? "uniform_reset" : "creep";
}

MutationOperator parse_mutation_operator(std::string_view name) {
  if (name == "uniform_reset") return MutationOperator::UniformReset;
  if (name == "creep") return MutationOperator::Creep;
  fail(ErrorKind::Config, "unknown mutation operator '" + std::string(name) + "'");
}

std::string_view crossover_operator_name(CrossoverOperator c) {
  return c == CrossoverOperator::Uniform ? "uniform" : "line";
}

CrossoverOperator parse_crossover_operator(std::string_view name) {
  if (name == "uniform") return CrossoverOperator::Uniform;
  if (name == "line") return CrossoverOperator::Line;
  fail(ErrorKind::Config, "unknown crossover operator '" + std::string(name) + "'");
}

void GaConfig::validate(models::ModelKind kind) const {
  auto ratio_ok = [](double r) { return r > 0.0 && r < 1.0; };
  if (!ratio_ok(mutation_prob) || !ratio_ok(crossover_prob) || !ratio_ok(elitism_ratio)) {
    fail(ErrorKind::Config, "GA ratios must lie strictly between 0 and 1");
  }
  if (population < 4) fail(ErrorKind::Config, "GA population must be at least 4");
  if (max_generations < 1) fail(ErrorKind::Config, "GA needs at least one generation");
  if (seeds.empty()) fail(ErrorKind::Config, "GA needs at least one seed");
  const auto genes = genes_for(kind);
  if (genes.size() != models::default_genes(kind).size()) {
    fail(ErrorKind::Config, "bounds do not match the gene layout of '" + std::string(models::kind_name(kind)) + "'");
  }
  for (const auto& g : genes) {
    if (!(g.lo < g.hi)) fail(ErrorKind::Config, "infeasible bounds for gene '" + g.name + "'");
  }
}

std::vector<models::GeneSpec> GaConfig::genes_for(models::ModelKind kind) const {
  return bounds.empty() ? models::default_genes(kind) : bounds;
}

double fitness(models::ModelKind kind, std::span<const double> genes,
               const std::vector<cleaning::FollowingSegment>& segments, const FitnessContext& ctx) {
  try {
    const auto params = models::decode_genes(kind, genes, ctx.base);
    std::vector<double> sim_s, obs_s;
    for (const auto& seg : segments) {
      const auto r = sim::simulate_follower(params, seg, ctx.limits, ctx.dt);
      sim_s.insert(sim_s.end(), r.spacing.begin(), r.spacing.end());
      obs_s.insert(obs_s.end(), seg.spacing.begin(), seg.spacing.end());
    }
    const double f = gof(sim_s, obs_s).nrmse;
    return std::isfinite(f) ? f : kFailedFitness;
  } catch (const Error& e) {
    // Malformed input data is not a property of the genes.
    if (e.kind() != ErrorKind::Domain) throw;
    return kFailedFitness;
  }
}

namespace {

using Genome = std::vector<double>;

double draw_gene(rng::Engine& eng, const models::GeneSpec& g) {
  if (g.integer) {
    const auto lo = static_cast<std::int64_t>(std::ceil(g.lo));
    const auto hi = static_cast<std::int64_t>(std::floor(g.hi));
    return static_cast<double>(lo + static_cast<std::int64_t>(rng::index(eng, static_cast<std::uint64_t>(hi - lo + 1))));
  }
  return rng::uniform(eng, g.lo, g.hi);
}

void evaluate_population(models::ModelKind kind, const std::vector<Genome>& pop, std::vector<double>& fit,
                         std::size_t first, const std::vector<cleaning::FollowingSegment>& segments,
                         const FitnessContext& ctx) {
  FitnessContext inner = ctx;
  inner.threads = 1;
  const std::size_t count = pop.size() - first;
  const unsigned threads = std::max(1u, std::min<unsigned>(ctx.threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t i = first; i < pop.size(); ++i) fit[i] = fitness(kind, pop[i], segments, inner);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = first + w; i < pop.size(); i += threads) fit[i] = fitness(kind, pop[i], segments, inner);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

GaResult ga_calibrate(models::ModelKind kind, const std::vector<cleaning::FollowingSegment>& segments,
                      const GaConfig& config, std::uint64_t seed, const FitnessContext& ctx,
                      const GenerationObserver& observer) {
  config.validate(kind);
  if (segments.empty()) fail(ErrorKind::InsufficientData, "calibration needs at least one segment");
  for (const auto& seg : segments) cleaning::validate_segment(seg, 2);
  const auto genes = config.genes_for(kind);
  const std::size_t pop_size = config.population;
  const std::size_t n_genes = genes.size();
  const std::size_t n_elite = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(config.elitism_ratio * static_cast<double>(pop_size))), 1, pop_size - 1);

  std::vector<Genome> pop(pop_size, Genome(n_genes));
  for (std::size_t i = 0; i < pop_size; ++i) {
    auto eng = rng::stream(seed, 0, i);
    for (std::size_t g = 0; g < n_genes; ++g) pop[i][g] = draw_gene(eng, genes[g]);
  }
  // Surface data problems (e.g. a dt that does not divide the sampling)
  // here instead of scoring every individual as failed.
  for (const auto& seg : segments) {
    sim::simulate_follower(models::decode_genes(kind, pop[0], ctx.base), seg, ctx.limits, ctx.dt);
  }
  std::vector<double> fit(pop_size);
  evaluate_population(kind, pop, fit, 0, segments, ctx);
  if (observer) observer(0, pop, fit);

  GaResult res;
  auto ranked = [&] {
    std::vector<std::size_t> order(pop_size);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return fit[a] < fit[b] || (fit[a] == fit[b] && a < b);
    });
    return order;
  };
  auto order = ranked();
  res.best_genes = pop[order[0]];
  res.best_fitness = fit[order[0]];
  res.trace.push_back(res.best_fitness);

  std::size_t stall = 0;
  for (std::size_t gen = 1; gen <= config.max_generations; ++gen) {
    std::vector<Genome> next(pop_size);
    std::vector<double> next_fit(pop_size);
    for (std::size_t e = 0; e < n_elite; ++e) {
      next[e] = pop[order[e]];
      next_fit[e] = fit[order[e]];
    }
    for (std::size_t i = n_elite; i < pop_size; ++i) {
      auto eng = rng::stream(seed, gen, i);
      auto tournament = [&]() -> const Genome& {
        const auto a = static_cast<std::size_t>(rng::index(eng, pop_size));
        const auto b = static_cast<std::size_t>(rng::index(eng, pop_size));
        return (fit[b] < fit[a] || (fit[b] == fit[a] && b < a)) ? pop[b] : pop[a];
      };
      const Genome& p1 = tournament();
      const Genome& p2 = tournament();
      Genome child = p1;
      if (rng::bernoulli(eng, config.crossover_prob)) {
        const double lam = config.crossover_operator == CrossoverOperator::Line ? rng::uniform(eng, -0.5, 1.5) : 0.0;
        for (std::size_t g = 0; g < n_genes; ++g) {
          if (config.crossover_operator == CrossoverOperator::Line && !genes[g].integer) {
            child[g] = std::clamp(p1[g] + lam * (p2[g] - p1[g]), genes[g].lo, genes[g].hi);
          } else if (rng::bernoulli(eng, 0.5)) {
            child[g] = p2[g];
          }
        }
      }
      const bool creep = config.mutation_operator == MutationOperator::Creep;
      for (std::size_t g = 0; g < n_genes; ++g) {
        if (!rng::bernoulli(eng, config.mutation_prob)) continue;
        if (creep && !genes[g].integer) {
          const double range = genes[g].hi - genes[g].lo;
          const double half = range * std::pow(10.0, rng::uniform(eng, -4.0, -1.0));
          child[g] = std::clamp(child[g] + rng::uniform(eng, -half, half), genes[g].lo, genes[g].hi);
        } else {
          child[g] = draw_gene(eng, genes[g]);
        }
      }
      next[i] = std::move(child);
    }
    pop = std::move(next);
    fit = std::move(next_fit);
    evaluate_population(kind, pop, fit, n_elite, segments, ctx);
    if (observer) observer(gen, pop, fit);

    order = ranked();
    res.generations_run = gen;
    if (fit[order[0]] < res.best_fitness) {
      res.best_fitness = fit[order[0]];
      res.best_genes = pop[order[0]];
      stall = 0;
    } else {
      ++stall;
    }
    res.trace.push_back(res.best_fitness);
    if (config.stall_generations > 0 && stall >= config.stall_generations) break;
  }
  return res;
}

GofReport evaluate(const models::ModelParams& params, const std::vector<cleaning::FollowingSegment>& segments,
                   const FitnessContext& ctx) {
  return gof_report(sim::simulate_all(params, segments, ctx.limits, ctx.dt, ctx.threads), segments);
}

CalibrationReport calibrate_and_validate(models::ModelKind kind,
                                         const std::vector<cleaning::FollowingSegment>& segments,
                                         const GaConfig& config, double split_fraction,
                                         std::uint64_t split_seed, const FitnessContext& ctx) {
  config.validate(kind);
  auto split = cleaning::split_segments(segments, split_fraction, split_seed);

  CalibrationReport rep;
  rep.result.kind = kind;
  bool have_best = false;
  for (const auto seed : config.seeds) {
    auto ga = ga_calibrate(kind, split.calibration, config, seed, ctx);
    auto params = models::decode_genes(kind, ga.best_genes, ctx.base);
    rep.result.per_seed.push_back({seed, ga.best_fitness, params, ga.generations_run});
    if (!have_best || ga.best_fitness < rep.result.fitness) {
      have_best = true;
      rep.result.fitness = ga.best_fitness;
      rep.result.best_params = params;
      rep.result.generations_run = ga.generations_run;
      rep.result.trace = std::move(ga.trace);
    }
  }
  rep.calibration = evaluate(rep.result.best_params, split.calibration, ctx);
  rep.validation = evaluate(rep.result.best_params, split.validation, ctx);
  for (const auto& s : split.calibration) rep.calibration_ids.push_back(s.id);
  for (const auto& s : split.validation) rep.validation_ids.push_back(s.id);
  return rep;
}

}  // namespace cfcal::calib
