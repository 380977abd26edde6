#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cfcal::models {

/// Intelligent Driver Model parameters, feet and seconds.
struct IdmParams {
  double a = 2.76;       // max acceleration, ft/s^2
  int delta = 1;         // acceleration exponent
  double v0 = 20.0;      // desired speed, ft/s
  double s0 = 9.89;      // jam distance, ft
  double T = 2.79;       // desired time gap, s
  double b = 24.58;      // desired deceleration (magnitude), ft/s^2

  void validate() const;
};

/// IDM blended with the constant-acceleration heuristic through the
/// coolness factor c. Called "IIDM" in the calibration tables; `improved`
/// switches the IDM term to the two-regime improved-IDM form.
struct BlendParams {
  IdmParams idm{1.214, 3, 18.742, 9.892, 2.980, 24.846};
  double c = 0.959;
  bool improved = false;

  void validate() const;
};

/// Linear gap/speed-error ACC controller.
struct AccParams {
  double k1 = 0.01;    // 1/s^2, gain on gap error
  double k2 = 0.43;    // 1/s, gain on speed difference
  double t_des = 4.96; // desired time gap, s
  double d0 = 15.0;    // vehicle length in the gap error, ft (not calibrated)

  void validate() const;
};

enum class ModelKind { Idm, Blend, LinearAcc };

std::string_view kind_name(ModelKind kind);
ModelKind parse_kind(std::string_view name);

using ModelParams = std::variant<IdmParams, BlendParams, AccParams>;

ModelKind kind_of(const ModelParams& p);
void validate(const ModelParams& p);

/// Car-following state. dv = v - v_l is derived.
struct CfState {
  double s = 0.0;    // spacing, ft
  double v = 0.0;    // follower speed, ft/s
  double v_l = 0.0;  // leader speed, ft/s
  double a_l = 0.0;  // leader acceleration, ft/s^2
  double x_l = 0.0;  // leader position, ft
  double x_f = 0.0;  // follower position, ft

  double dv() const { return v - v_l; }
};

/// Desired dynamic gap s*.
double desired_gap(const IdmParams& p, double v, double dv);

/// Raw (unclamped) IDM acceleration. Throws a domain error for s <= 0.
double idm_accel(const IdmParams& p, double s, double v, double dv);

/// Two-regime improved IDM.
double improved_idm_accel(const IdmParams& p, double s, double v, double dv);

/// Constant-acceleration heuristic with the leader acceleration capped at a.
double cah_accel(const IdmParams& p, double s, double v, double v_l, double a_l);

double blend_accel(const BlendParams& p, const CfState& st);

double linear_acc_accel(const AccParams& p, const CfState& st);

double model_accel(const ModelParams& p, const CfState& st);

/// Spacing at which IDM gives zero acceleration at matched speeds.
double equilibrium_spacing(const IdmParams& p, double v);

// ---------------------------------------------------------------------------
// Gene encoding for calibration.

struct GeneSpec {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  bool integer = false;
};

/// Default search bounds per model kind, in gene order:
///   idm:        a, delta, v0, s0, T, b
///   blend:      a, delta, v0, s0, T, b, c
///   linear_acc: t_des, k1, k2
std::vector<GeneSpec> default_genes(ModelKind kind);

/// Builds parameters from a gene vector. Integer genes are rounded; `base`
/// supplies non-calibrated constants (d0, improved flag).
ModelParams decode_genes(ModelKind kind, std::span<const double> genes,
                         const std::optional<ModelParams>& base = std::nullopt);

std::vector<double> encode_genes(const ModelParams& p);

}  // namespace cfcal::models
