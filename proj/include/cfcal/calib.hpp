#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <span>
#include <vector>

#include "cfcal/cleaning.hpp"
#include "cfcal/models.hpp"
#include "cfcal/sim.hpp"

namespace cfcal::calib {

struct Gof {
  double mae = 0.0;
  double rmse = 0.0;
  double nrmse = 0.0;
};

/// MAE, RMSE and RMSE normalized by the root mean square of the
/// observations. All-zero observations raise undefined-statistic.
Gof gof(std::span<const double> sim, std::span<const double> obs);

struct GofReport {
  double nrmse_spacing = 0.0;
  double mae_spacing = 0.0;
  double rmse_spacing = 0.0;
  double nrmse_speed = 0.0;
  double mae_speed = 0.0;
  double rmse_speed = 0.0;
};

/// Pooled report: all segments' samples are concatenated before the
/// metrics are taken.
GofReport gof_report(const std::vector<sim::SimResult>& sims,
                     const std::vector<cleaning::FollowingSegment>& segments);

/// uniform_reset redraws a mutated gene anywhere within its bounds.
/// creep moves a mutated real gene by a uniform step whose half-width is
/// log-uniform between 1e-4 and 1e-1 of the gene range, clamped to the
/// bounds. Integer genes always use uniform reset.
enum class MutationOperator { UniformReset, Creep };

std::string_view mutation_operator_name(MutationOperator m);
MutationOperator parse_mutation_operator(std::string_view name);

/// uniform swaps each gene between the parents with probability 1/2.
/// line places the child on the line through both parents,
/// p1 + lambda (p2 - p1) with one lambda ~ U(-0.5, 1.5) shared by all real
/// genes and clamped to the bounds; integer genes are swapped as in uniform.
enum class CrossoverOperator { Uniform, Line };

std::string_view crossover_operator_name(CrossoverOperator c);
CrossoverOperator parse_crossover_operator(std::string_view name);

struct GaConfig {
  std::size_t population = 100;
  std::size_t max_generations = 1000;
  double mutation_prob = 0.10;
  MutationOperator mutation_operator = MutationOperator::UniformReset;
  double crossover_prob = 0.5;
  CrossoverOperator crossover_operator = CrossoverOperator::Uniform;
  double elitism_ratio = 0.1;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::size_t stall_generations = 100;
  // Empty means the model kind's defaults.
  std::vector<models::GeneSpec> bounds;

  void validate(models::ModelKind kind) const;
  std::vector<models::GeneSpec> genes_for(models::ModelKind kind) const;
};

/// What the simulator needs besides the genes. Not part of the result so
/// that outputs do not depend on the thread count.
struct FitnessContext {
  sim::SimLimits limits;
  double dt = 1.0;
  unsigned threads = 1;
  // Non-calibrated constants (e.g. linear ACC d0, improved-IDM flag).
  std::optional<models::ModelParams> base;
};

/// Large but finite score given to parameter vectors whose simulation fails.
inline constexpr double kFailedFitness = 1e6;

/// Pooled spacing NRMSE over all segments.
double fitness(models::ModelKind kind, std::span<const double> genes,
               const std::vector<cleaning::FollowingSegment>& segments, const FitnessContext& ctx = {});

struct GaResult {
  std::vector<double> best_genes;
  double best_fitness = 0.0;
  std::vector<double> trace;  // best-so-far fitness after each generation
  std::size_t generations_run = 0;
};

/// Called after each generation is scored (generation 0 is the initial
/// population) with the whole population and its fitness.
using GenerationObserver =
    std::function<void(std::size_t generation, const std::vector<std::vector<double>>& population,
                       const std::vector<double>& fitness)>;

GaResult ga_calibrate(models::ModelKind kind, const std::vector<cleaning::FollowingSegment>& segments,
                      const GaConfig& config, std::uint64_t seed, const FitnessContext& ctx = {},
                      const GenerationObserver& observer = {});

struct SeedOutcome {
  std::uint64_t seed = 0;
  double fitness = 0.0;
  models::ModelParams params;
  std::size_t generations_run = 0;
};

struct CalibrationResult {
  models::ModelKind kind = models::ModelKind::Idm;
  models::ModelParams best_params;
  double fitness = 0.0;
  std::vector<SeedOutcome> per_seed;
  std::size_t generations_run = 0;  // of the winning seed
  std::vector<double> trace;        // of the winning seed
};

struct CalibrationReport {
  CalibrationResult result;
  GofReport calibration;
  GofReport validation;
  std::vector<std::string> calibration_ids;
  std::vector<std::string> validation_ids;
};

CalibrationReport calibrate_and_validate(models::ModelKind kind,
                                         const std::vector<cleaning::FollowingSegment>& segments,
                                         const GaConfig& config, double split_fraction,
                                         std::uint64_t split_seed, const FitnessContext& ctx = {});

/// Simulates `params` over `segments` and scores them.
GofReport evaluate(const models::ModelParams& params, const std::vector<cleaning::FollowingSegment>& segments,
                   const FitnessContext& ctx = {});

}  // namespace cfcal::calib
