#include "cfcal/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cfcal/error.hpp"

namespace cfcal::models {

namespace {

void require_positive_gap(double s) {
  if (!(s > 0.0)) fail(ErrorKind::Domain, "spacing must be positive, got " + std::to_string(s));
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

void IdmParams::validate() const {
  if (!(a > 0.0 && v0 > 0.0 && s0 > 0.0 && T > 0.0 && b > 0.0) || delta < 1) {
    fail(ErrorKind::Config, "IDM parameters must satisfy a, v0, s0, T, b > 0 and delta >= 1");
  }
}

void BlendParams::validate() const {
  idm.validate();
  if (!(c >= 0.0 && c <= 1.0)) fail(ErrorKind::Config, "coolness factor must lie in [0, 1]");
}

void AccParams::validate() const {
  if (!(k1 > 0.0 && k2 > 0.0 && t_des > 0.0) || !(d0 >= 0.0)) {
    fail(ErrorKind::Config, "linear ACC parameters must satisfy k1, k2, t_des > 0 and d0 >= 0");
  }
}

std::string_view kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Idm: return "idm";
    case ModelKind::Blend: return "blend";
    case ModelKind::LinearAcc: return "linear_acc";
  }
  return "?";
}

ModelKind parse_kind(std::string_view name) {
  if (name == "idm") return ModelKind::Idm;
  // "iidm" is the name the calibration tables use for the blend.
  if (name == "blend" || name == "iidm") return ModelKind::Blend;
  if (name == "linear_acc" || name == "acc") return ModelKind::LinearAcc;
  fail(ErrorKind::Domain, "unknown model kind '" + std::string(name) + "'");
}

ModelKind kind_of(const ModelParams& p) { return static_cast<ModelKind>(p.index()); }

void validate(const ModelParams& p) {
  std::visit([](const auto& m) { m.validate(); }, p);
}

double desired_gap(const IdmParams& p, double v, double dv) {
  return p.s0 + std::max(0.0, v * p.T + v * dv / (2.0 * std::sqrt(p.a * p.b)));
}

double idm_accel(const IdmParams& p, double s, double v, double dv) {
  require_positive_gap(s);
  const double z = desired_gap(p, v, dv) / s;
  return p.a * (1.0 - ipow(v / p.v0, p.delta) - z * z);
}

double improved_idm_accel(const IdmParams& p, double s, double v, double dv) {
  require_positive_gap(s);
  const double z = desired_gap(p, v, dv) / s;
  if (v <= p.v0) {
    const double a_free = p.a * (1.0 - ipow(v / p.v0, p.delta));
    if (z >= 1.0) return p.a * (1.0 - z * z);
    if (a_free <= 0.0) return 0.0;
    return a_free * (1.0 - std::pow(z, 2.0 * p.a / a_free));
  }
  const double a_free = -p.b * (1.0 - std::pow(p.v0 / v, p.a * p.delta / p.b));
  if (z >= 1.0) return a_free + p.a * (1.0 - z * z);
  return a_free;
}

double cah_accel(const IdmParams& p, double s, double v, double v_l, double a_l) {
  require_positive_gap(s);
  const double a_eff = std::min(a_l, p.a);
  const double denom = v_l * v_l - 2.0 * s * a_eff;
  // denom == 0 only for a stopped leader with a_eff == 0, where the first
  // branch degenerates to 0/0; the second branch is its limit.
  if (v_l * (v - v_l) <= -2.0 * s * a_eff && denom > 0.0) {
    return v * v * a_eff / denom;
  }
  const double closing = v - v_l;
  const double step = closing > 0.0 ? 1.0 : 0.0;
  return a_eff - step * closing * closing / (2.0 * s);
}

double blend_accel(const BlendParams& p, const CfState& st) {
  const double a_i = p.improved ? improved_idm_accel(p.idm, st.s, st.v, st.dv())
                                : idm_accel(p.idm, st.s, st.v, st.dv());
  const double a_c = cah_accel(p.idm, st.s, st.v, st.v_l, st.a_l);
  if (a_i >= a_c) return a_i;
  return (1.0 - p.c) * a_i + p.c * (a_c + p.idm.b * std::tanh((a_i - a_c) / p.idm.b));
}

double linear_acc_accel(const AccParams& p, const CfState& st) {
  const double gap_error = st.x_l - st.x_f - p.d0 - p.t_des * st.v;
  return p.k1 * gap_error + p.k2 * (st.v_l - st.v);
}

double model_accel(const ModelParams& p, const CfState& st) {
  struct Visitor {
    const CfState& st;
    double operator()(const IdmParams& m) const { return idm_accel(m, st.s, st.v, st.dv()); }
    double operator()(const BlendParams& m) const { return blend_accel(m, st); }
    double operator()(const AccParams& m) const { return linear_acc_accel(m, st); }
  };
  return std::visit(Visitor{st}, p);
}

double equilibrium_spacing(const IdmParams& p, double v) {
  if (!(v >= 0.0) || !(v < p.v0)) {
    fail(ErrorKind::Domain, "no finite equilibrium for v=" + std::to_string(v) + " (v0=" + std::to_string(p.v0) + ")");
  }
  return (p.s0 + v * p.T) / std::sqrt(1.0 - ipow(v / p.v0, p.delta));
}

std::vector<GeneSpec> default_genes(ModelKind kind) {
  std::vector<GeneSpec> idm{
      {"a", 0.33, 17.4, false}, {"delta", 1.0, 10.0, true}, {"v0", 1.0, 137.0, false},
      {"s0", 0.5, 33.0, false}, {"T", 0.1, 5.0, false},     {"b", 0.33, 26.0, false},
  };
  switch (kind) {
    case ModelKind::Idm:
      return idm;
    case ModelKind::Blend:
      idm.push_back({"c", 0.0, 1.0, false});
      return idm;
    case ModelKind::LinearAcc:
      return {{"t_des", 0.1, 9.0, false}, {"k1", 0.001, 1.0, false}, {"k2", 0.001, 1.0, false}};
  }
  return {};
}

ModelParams decode_genes(ModelKind kind, std::span<const double> g, const std::optional<ModelParams>& base) {
  const auto expected = default_genes(kind).size();
  if (g.size() != expected) {
    fail(ErrorKind::Config, std::string(kind_name(kind)) + " expects " + std::to_string(expected) +
                                " genes, got " + std::to_string(g.size()));
  }
  auto idm_from = [&] {
    return IdmParams{g[0], static_cast<int>(std::lround(g[1])), g[2], g[3], g[4], g[5]};
  };
  switch (kind) {
    case ModelKind::Idm:
      return idm_from();
    case ModelKind::Blend: {
      BlendParams p;
      p.idm = idm_from();
      p.c = g[6];
      if (base && std::holds_alternative<BlendParams>(*base)) p.improved = std::get<BlendParams>(*base).improved;
      return p;
    }
    case ModelKind::LinearAcc: {
      AccParams p;
      if (base && std::holds_alternative<AccParams>(*base)) p = std::get<AccParams>(*base);
      p.t_des = g[0];
      p.k1 = g[1];
      p.k2 = g[2];
      return p;
    }
  }
  fail(ErrorKind::Config, "unknown model kind");
}

std::vector<double> encode_genes(const ModelParams& p) {
  struct Visitor {
    std::vector<double> operator()(const IdmParams& m) const {
      return {m.a, static_cast<double>(m.delta), m.v0, m.s0, m.T, m.b};
    }
    std::vector<double> operator()(const BlendParams& m) const {
      auto g = (*this)(m.idm);
      g.push_back(m.c);
      return g;
    }
    std::vector<double> operator()(const AccParams& m) const { return {m.t_des, m.k1, m.k2}; }
  };
  return std::visit(Visitor{}, p);
}

}  // namespace cfcal::models
